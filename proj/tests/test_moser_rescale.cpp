#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mcflab/moser.hpp"
#include "mcflab/rescale.hpp"

using namespace mcflab;

TEST_CASE("iteration schedule values for n = 4") {
    const IterationSchedule sched = iteration_schedule(4, 2.0, 1.0);
    CHECK(sched.mu == Catch::Approx(1.5).epsilon(1e-15));
    CHECK(sched.p(0) == Catch::Approx(3.0).epsilon(1e-15));
    CHECK(sched.p(1) == Catch::Approx(4.5).epsilon(1e-15));
    CHECK(sched.radius(0) == Catch::Approx(1.0).epsilon(1e-15));  // R_0 = R
    CHECK(sched.tau(0) == Catch::Approx(2.0 / 3.0).epsilon(1e-14));
    // radii decrease towards R/2, times increase towards t
    for (int k = 1; k < 20; ++k) {
        CHECK(sched.radius(k) < sched.radius(k - 1));
        CHECK(sched.radius(k) > 0.5);
        CHECK(sched.tau(k) > sched.tau(k - 1));
        CHECK(sched.tau(k) < 2.0);
        CHECK(sched.p(k) == Catch::Approx(sched.mu * sched.p(k - 1)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(iteration_schedule(2, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(iteration_schedule(3, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(iteration_schedule(3, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("exponent sums converge to their closed forms") {
    for (int n : {3, 4, 5}) {
        const IterationSchedule sched = iteration_schedule(n, 1.0, 1.0);
        const int m = 60 * n;
        CHECK(sched.partial_sum_inv_p(m) == Catch::Approx(sched.sum_inv_p()).margin(1e-12));
        CHECK(sched.partial_sum_k_over_p(m) ==
              Catch::Approx(sched.sum_k_over_p()).margin(1e-9));
        CHECK(sched.sum_inv_p() == 1.0);
        CHECK(sched.sum_k_over_p() == 0.5 * n);
    }
}

TEST_CASE("beta constant") {
    CHECK(beta_constant(0.0, AmbientSpace::space_form(3, 0)) == 0.0);
    CHECK(beta_constant(2.0, AmbientSpace::space_form(3, 1)) ==
          Catch::Approx(2.0 * (4.0 + 3.0)).epsilon(1e-15));
    CHECK(beta_constant(1.0, AmbientSpace::space_form(4, -1)) ==
          Catch::Approx(2.0).epsilon(1e-15));  // K2 = 0 in hyperbolic ambients
    CHECK_THROWS_AS(beta_constant(-1.0, AmbientSpace::space_form(3, 0)),
                    std::invalid_argument);
}

TEST_CASE("beta bounds the growth of H^2 pointwise") {
    for (int c : {0, 1}) {
        const ExactSphereFlow f =
            (c == 0) ? euclidean_sphere_flow(3, 1.0) : spaceform_sphere_flow(3, 1, 3.0);
        const double t_hi = 0.5 * f.T();
        const double supA = f.H(t_hi) / std::sqrt(3.0);
        const double beta = beta_constant(supA, f.ambient);
        for (double frac : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
            const double t = frac * t_hi;
            const double H = f.H(t);
            CHECK(2.0 * H * f.dHdt(t) <= beta * H * H * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("Lp functional agrees with the space-time norm accumulation") {
    for (int n : {3, 4}) {
        const ExactSphereFlow f = euclidean_sphere_flow(n, 1.0);
        const double p = 0.5 * (n + 2.0);  // 2p = n + 2
        const double t_end = 0.6 * f.T();
        const double lp = lp_functional(f, p, 0.0, t_end);
        const double acc = spacetime_norm(f, static_cast<double>(n + 2), t_end).accumulated;
        CHECK(lp == Catch::Approx(acc).epsilon(1e-8));
    }
    const ExactSphereFlow f = euclidean_sphere_flow(3, 1.0);
    CHECK_THROWS_AS(lp_functional(f, 0.5, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(lp_functional(f, 2.0, 0.1, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(lp_functional(f, 2.0, 0.0, f.T()), ExistenceTimeExceeded);
}

TEST_CASE("stream Lp functional on an exactly shrinking cylinder") {
    // H(t) = (n-1)/rho(t) with rho^2 = 1 - 2(n-1)t; compare the snapshot
    // trapezoid against adaptive quadrature of the closed form
    ProfileFlow flow = ProfileFlow::cylinder(3, 1.0, 2.0, 32);
    std::vector<GeometrySnapshot> stream;
    std::vector<SurfaceOfRevolution> surfaces;
    std::vector<double> times;
    while (flow.alive() && flow.time() < 0.05) {
        stream.push_back(flow.snapshot());
        surfaces.push_back(flow.surface());
        times.push_back(flow.time());
        flow.step();
    }
    REQUIRE(times.size() >= 10);
    const double p = 2.5;
    const double got = lp_functional(stream, surfaces, p, 0.0, -1.0, 1.0);
    const double expect = integrate_adaptive(
        [&](double t) {
            const double rho = std::sqrt(1.0 - 4.0 * t);
            const double H = 2.0 / rho;
            const double area = unit_sphere_area(2) * rho * rho * 2.0;
            return std::pow(H * H, p) * area;
        },
        0.0, times.back(), 1e-12);
    CHECK(got == Catch::Approx(expect).epsilon(1e-3));
}

TEST_CASE("axis cutoff and time ramp") {
    const AxisCutoff eta(0.0, 1.0, 2.0);
    CHECK(eta(0.0) == 1.0);
    CHECK(eta(0.9) == 1.0);
    CHECK(eta(1.5) == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(eta(-1.5) == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(eta(2.5) == 0.0);
    CHECK(eta.slope_bound() == 1.0);
    CHECK(eta.dx(1.5) == -1.0);
    CHECK(eta.dx(-1.5) == 1.0);
    CHECK(eta.dx(0.5) == 0.0);
    CHECK_THROWS_AS(AxisCutoff(0.0, 2.0, 1.0), std::invalid_argument);

    const TimeRamp psi(1.0, 2.0);
    CHECK(psi(0.5) == 0.0);
    CHECK(psi(1.5) == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(psi(3.0) == 1.0);
    CHECK(psi.slope(1.5) == 1.0);
    CHECK(psi.slope(0.5) == 0.0);
    CHECK_THROWS_AS(TimeRamp(2.0, 2.0), std::invalid_argument);
}

TEST_CASE("closed-manifold energy inequality holds with nonnegative margin") {
    for (int c : {-1, 0, 1}) {
        const ExactSphereFlow f =
            (c == 0) ? euclidean_sphere_flow(3, 1.0) : spaceform_sphere_flow(3, c, c == -1 ? 6.0 : 3.0);
        const double p = 0.5 * (f.n() + 2.0);
        const EnergyResidualRecord rec = local_energy_check(f, p, 0.0, 0.5 * f.T());
        INFO("c=" << c << " min residual " << rec.min_residual);
        CHECK(rec.min_residual >= 0.0);
        CHECK(rec.beta > 0.0);
        CHECK(rec.residuals.size() == 65);
    }
    const ExactSphereFlow f = euclidean_sphere_flow(3, 1.0);
    CHECK_THROWS_AS(local_energy_check(f, 0.5, 0.0, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(local_energy_check(f, 2.0, 0.1, 0.05), std::invalid_argument);
}

TEST_CASE("localized energy inequality on a shrinking cylinder stream") {
    ProfileFlow flow = ProfileFlow::cylinder(3, 1.0, 4.0, 128);
    std::vector<SurfaceOfRevolution> surfaces;
    std::vector<double> times;
    while (flow.alive() && flow.time() < 0.1) {
        surfaces.push_back(flow.surface());
        times.push_back(flow.time());
        flow.step();
    }
    REQUIRE(surfaces.size() >= 20);
    const AxisCutoff eta(0.0, 0.8, 1.6);
    const AmbientSpace amb = AmbientSpace::space_form(3, 0);
    const EnergyResidualRecord rec = local_energy_check(surfaces, times, 2.5, eta, amb);
    CHECK(rec.min_residual > 0.0);

    // with the time ramp the inequality holds away from the ramp kinks (a
    // step straddling a kink sees the ramp derivative one side only)
    const TimeRamp psi(0.02, 0.06);
    const EnergyResidualRecord ramped = local_energy_check(surfaces, times, 2.5, eta, amb, &psi);
    double max_dt = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) max_dt = std::max(max_dt, times[k] - times[k - 1]);
    double min_interior = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ramped.residuals.size(); ++k) {
        const double tm = ramped.times[k];
        if (std::abs(tm - psi.tau) < 2.0 * max_dt || std::abs(tm - psi.tau_p) < 2.0 * max_dt)
            continue;
        min_interior = std::min(min_interior, ramped.residuals[k]);
    }
    CHECK(min_interior >= 0.0);

    CHECK_THROWS_AS(local_energy_check({surfaces[0]}, {times[0]}, 2.5, eta, amb),
                    std::invalid_argument);
}

TEST_CASE("comparison ball volumes") {
    CHECK(comparison_ball_volume(3, 0.0, 2.0) ==
          Catch::Approx(unit_ball_volume(3) * 8.0).epsilon(1e-14));
    // hyperbolic balls are larger than flat ones of the same radius
    for (double r : {0.5, 1.0, 2.0})
        CHECK(comparison_ball_volume(3, -1.0, r) > comparison_ball_volume(3, 0.0, r));
    // small-radius agreement with the flat volume
    CHECK(comparison_ball_volume(3, -1.0, 1e-3) ==
          Catch::Approx(unit_ball_volume(3) * 1e-9).epsilon(1e-5));
    CHECK_THROWS_AS(comparison_ball_volume(3, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(comparison_ball_volume(3, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("admissible radius") {
    const SobolevConstants constants = SobolevConstants::canonical(3);
    SECTION("flat ambient: conditions vacuous") {
        const AdmissibleRadius r = admissible_radius(AmbientSpace::space_form(3, 0), 0.0, constants);
        CHECK(r.unbounded);
        CHECK(std::isinf(r.value));
    }
    SECTION("round ambient with flat comparison: R' = (n+1)^{-1/n}") {
        const AdmissibleRadius r = admissible_radius(AmbientSpace::space_form(3, 1), 0.0, constants);
        CHECK_FALSE(r.unbounded);
        CHECK(r.critical_volume == Catch::Approx(unit_ball_volume(3) / 4.0).epsilon(1e-12));
        CHECK(r.value == Catch::Approx(std::pow(4.0, -1.0 / 3.0)).epsilon(1e-9));
    }
    SECTION("negative curvature lower bound shrinks the radius") {
        const AdmissibleRadius flat_cmp =
            admissible_radius(AmbientSpace::space_form(3, 1), 0.0, constants);
        const AdmissibleRadius hyp_cmp =
            admissible_radius(AmbientSpace::space_form(3, 1), -1.0, constants);
        CHECK(hyp_cmp.value < flat_cmp.value);
        CHECK(hyp_cmp.value > 0.0);
    }
    CHECK_THROWS_AS(admissible_radius(AmbientSpace::space_form(3, 1), 0.5, constants),
                    std::invalid_argument);
}

TEST_CASE("sup bound ratio is scale invariant") {
    // under r0 -> lambda r0: lhs scales by lambda^{-2}, the L^{n+2} space-time
    // norm is invariant, so ratio * lambda^2 is constant across the family
    double reference = 0.0;
    for (double lambda : {1.0, 2.0, 4.0}) {
        const ExactSphereFlow f = euclidean_sphere_flow(3, lambda);
        const SupBoundRecord rec = sup_bound_check(f, 0.5 * f.T());
        const double invariant = rec.ratio * lambda * lambda;
        if (reference == 0.0) reference = invariant;
        CHECK(invariant == Catch::Approx(reference).epsilon(1e-6));
        CHECK(rec.lhs > 0.0);
        CHECK(rec.rhs_norm > 0.0);
    }
    const ExactSphereFlow f = euclidean_sphere_flow(3, 1.0);
    CHECK_THROWS_AS(sup_bound_check(f, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sup_bound_check(f, f.T()), std::invalid_argument);
}

TEST_CASE("parabolic rescaling normalizes H^2 at the window end") {
    // r0 = 4, n = 3: H(t) = 3 / sqrt(16 - 6t) reaches 1 at t = 7/6
    const ExactSphereFlow f = euclidean_sphere_flow(3, 4.0);
    const double t_i = 7.0 / 6.0;
    const RescaleResult res = rescale(f, t_i);
    REQUIRE(res.flow.has_value());
    CHECK_FALSE(res.needs_later_time);
    CHECK(res.Q == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(res.flow->H2(1.0) == Catch::Approx(1.0).epsilon(1e-12));
    // identity rescaling: base time recovered
    CHECK(res.flow->base_time(1.0) == Catch::Approx(t_i).epsilon(1e-14));

    // a genuinely rescaled window: H^2 normalized to 1 and bounded by 1 before
    const double t_late = f.time_reaching_H2(25.0);
    const RescaleResult late = rescale(f, t_late);
    REQUIRE(late.flow.has_value());
    CHECK(late.Q == Catch::Approx(25.0).epsilon(1e-12));
    CHECK(late.flow->H2(1.0) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(late.flow->max_H2_on_window() <= 1.0 + 1e-12);
    for (double s : {0.0, 0.25, 0.5, 0.75})
        CHECK(late.flow->H2(s) <= late.flow->H2(1.0) + 1e-12);
    // umbilic: all principal curvatures are H/n
    CHECK(late.flow->min_principal(1.0) == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    // volumes transform by Q^{n/2}
    CHECK(late.flow->volume(1.0) ==
          Catch::Approx(f.volume(t_late) * std::pow(25.0, 1.5)).epsilon(1e-12));
}

TEST_CASE("rescaling refuses windows that start too early") {
    const ExactSphereFlow f = euclidean_sphere_flow(3, 4.0);
    // H(0) = 3/4: Q < 1
    const RescaleResult early = rescale(f, 0.0);
    CHECK(early.needs_later_time);
    CHECK_FALSE(early.flow.has_value());
    // Q >= 1 but the window [t_i - 1/Q, t_i] would leave [0, T)
    const ExactSphereFlow g = euclidean_sphere_flow(3, 1.0);
    const RescaleResult tight = rescale(g, 0.01);
    CHECK(tight.needs_later_time);
    CHECK_THROWS_AS(rescale(g, g.T()), ExistenceTimeExceeded);
}

TEST_CASE("blow-up sequence of an exact flow") {
    const ExactSphereFlow f = euclidean_sphere_flow(3, 1.0);
    std::vector<double> times;
    for (int i = 1; i <= 5; ++i) times.push_back(f.T() * (1.0 - std::pow(4.0, -i)));
    const auto seq = blowup_sequence(f, times);
    REQUIRE(seq.size() == 5);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(seq[i].t == times[i]);
        CHECK(seq[i].Q == Catch::Approx(f.H(times[i]) * f.H(times[i])).epsilon(1e-14));
        if (i > 0) CHECK(seq[i].Q > seq[i - 1].Q);
    }
    CHECK_THROWS_AS(blowup_sequence(f, {}), std::invalid_argument);
    CHECK_THROWS_AS(blowup_sequence(f, {0.1, 0.05}), std::invalid_argument);
    CHECK_THROWS_AS(blowup_sequence(f, {0.1, f.T()}), ExistenceTimeExceeded);
}

TEST_CASE("blow-up sequence from a recorded history") {
    std::vector<FlowSample> hist;
    for (int i = 0; i < 10; ++i) {
        FlowSample s;
        s.t = 0.1 * i;
        s.max_H2 = (i == 3 || i == 4) ? 5.0 : 1.0 + 0.1 * i;  // tie at i = 3, 4
        s.location = static_cast<double>(i);
        hist.push_back(s);
    }
    const auto seq = blowup_sequence(hist, {0.2, 0.45, 0.9});
    REQUIRE(seq.size() == 3);
    CHECK(seq[0].Q == Catch::Approx(1.2).epsilon(1e-14));
    // the earliest maximizer wins the tie
    CHECK(seq[1].t == Catch::Approx(0.3).epsilon(1e-14));
    CHECK(seq[1].location == 3.0);
    CHECK(seq[2].Q == 5.0);
    CHECK_THROWS_AS(blowup_sequence(hist, {-0.5}), std::invalid_argument);
    CHECK_THROWS_AS(blowup_sequence(std::vector<FlowSample>{}, {0.1}), std::invalid_argument);
    // unsorted query times break the monotone-Q invariant
    CHECK_THROWS_AS(blowup_sequence(hist, {0.45, 0.2}), std::logic_error);
}

TEST_CASE("tail integrals vanish along the blow-up sequence at subcritical exponents") {
    const ExactSphereFlow f = euclidean_sphere_flow(3, 1.0);
    std::vector<double> times;
    for (int i = 1; i <= 5; ++i) times.push_back(f.T() * (1.0 - std::pow(4.0, -i)));
    const auto seq = blowup_sequence(f, times);
    const NormVanishingRecord rec = norm_vanishing_check(f, seq, 4.0);
    CHECK(rec.vanishing);
    REQUIRE(rec.tails.size() == 5);
    for (std::size_t i = 1; i < rec.tails.size(); ++i) {
        CHECK(rec.tails[i] < rec.tails[i - 1]);
        // euclidean dyadic times halve the tail each step
        CHECK(rec.tails[i] / rec.tails[i - 1] == Catch::Approx(0.5).margin(0.1));
    }
    // at the sharp exponent the norm diverges; the check must refuse
    CHECK_THROWS_AS(norm_vanishing_check(f, seq, 5.0), std::domain_error);
}

TEST_CASE("H^2 lower-bound margin is preserved in a hyperbolic ambient") {
    const ExactSphereFlow f = spaceform_sphere_flow(3, -1, 6.0);
    const H2MarginRecord rec = h2_lower_bound_monitor(f, 0.9 * f.T());
    CHECK(rec.initial_condition_holds);
    CHECK(rec.initial_margin == Catch::Approx(36.0 - 9.0).epsilon(1e-12));
    CHECK(rec.preserved);
    CHECK(rec.min_margin >= rec.initial_margin * (1.0 - 1e-12));
    // flat case: margin is just H^2, always preserved
    const ExactSphereFlow g = euclidean_sphere_flow(3, 1.0);
    CHECK(h2_lower_bound_monitor(g, 0.5 * g.T()).preserved);
    CHECK_THROWS_AS(h2_lower_bound_monitor(g, g.T()), std::invalid_argument);
    CHECK_THROWS_AS(h2_lower_bound_monitor(g, 0.0), std::invalid_argument);
}
