#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "mcflab/exact_solutions.hpp"
#include "mcflab/geodesic_sphere_ode.hpp"
#include "mcflab/profile_flow.hpp"

using namespace mcflab;

TEST_CASE("geodesic sphere step: identity at dt = 0 and input validation") {
    const AmbientSpace amb = AmbientSpace::space_form(3, 0);
    const GeodesicSphereStep s = step_geodesic_sphere(amb, 0.7, 0.0);
    CHECK(s.rho == 0.7);
    CHECK_FALSE(s.crossed_zero);
    CHECK_THROWS_AS(step_geodesic_sphere(amb, 0.0, 0.1), std::domain_error);
    CHECK_THROWS_AS(step_geodesic_sphere(amb, 0.7, -0.1), std::invalid_argument);
    const AmbientSpace round = AmbientSpace::space_form(3, 1);
    CHECK_THROWS_AS(step_geodesic_sphere(round, kPi, 0.1), std::domain_error);
}

TEST_CASE("geodesic sphere step brackets the collapse time") {
    // euclidean lifetime of a radius-rho sphere is exactly rho^2 / (2n)
    const AmbientSpace amb = AmbientSpace::space_form(3, 0);
    const double rho = 0.1;
    const double T = rho * rho / 6.0;
    const GeodesicSphereStep s = step_geodesic_sphere(amb, rho, 10.0 * T);
    REQUIRE(s.crossed_zero);
    CHECK(s.t_cross_lo <= T);
    CHECK(s.t_cross_hi >= T - 1e-7 * T);  // bracket is exact up to integrator tolerance
    CHECK(s.t_cross_hi - s.t_cross_lo < T);  // a genuine bracket, not [0, dt]
}

TEST_CASE("radial ODE tracks the closed form in a flat ambient") {
    const AmbientSpace amb = AmbientSpace::space_form(3, 0);
    const auto samples = integrate_geodesic_sphere(amb, 1.0, 0.1);
    REQUIRE(samples.size() >= 2);
    CHECK(samples.back().first == Catch::Approx(0.1).epsilon(1e-14));
    CHECK(samples.back().second == Catch::Approx(std::sqrt(0.4)).margin(1e-9));
    const ExactSphereFlow f = euclidean_sphere_flow(3, 1.0);
    for (const auto& [t, r] : samples)
        CHECK(r == Catch::Approx(f.geodesic_radius(t)).epsilon(1e-8));
}

TEST_CASE("radial ODE tracks the closed form until H = 100 in a round ambient") {
    const ExactSphereFlow f = spaceform_sphere_flow(3, 1, 3.0);
    const AmbientSpace amb = f.ambient;
    const auto samples = integrate_geodesic_sphere(amb, f.geodesic_radius(0.0), f.T(), 100.0);
    REQUIRE(samples.size() >= 10);
    double max_rel = 0.0;
    for (const auto& [t, r] : samples) {
        const double exact = f.geodesic_radius(t);
        max_rel = std::max(max_rel, std::abs(r - exact) / exact);
    }
    CHECK(max_rel < 1e-8);
    // stopped because H reached 100, not because time ran out
    const double H_end = 3.0 * cot_c(1, samples.back().second);
    CHECK(H_end >= 100.0 * (1.0 - 1e-6));
    CHECK(samples.back().first < f.T());
}

TEST_CASE("profile flow: shrinking sphere reaches its exact extinction time") {
    // 1/max|A|^2 = (r0^2 - 2nt)/n is linear in t for the round sphere, so the
    // extrapolated extinction estimate should converge to r0^2/(2n) = 1/6.
    double errs[2];
    std::size_t res[2] = {48, 96};
    for (int k = 0; k < 2; ++k) {
        ProfileFlow flow = ProfileFlow::sphere(3, 1.0, res[k]);
        const SingularityReport rep = flow.run_until(1e9);
        REQUIRE_FALSE(flow.alive());
        CHECK(rep.detected);
        errs[k] = std::abs(rep.t_sing_estimate - 1.0 / 6.0);
        CHECK(errs[k] < 0.01);
        CHECK(std::abs(rep.location) < 0.2);
    }
    // quadratic profiles are spatially exact, so both resolutions sit at the
    // time-discretization noise floor well below the 1e-2 tolerance above
    CHECK(errs[0] < 1e-4);
    CHECK(errs[1] < 1e-4);
}

TEST_CASE("profile flow: cylinder shrinks exactly") {
    // for constant rho the w-equation is dw/dt = -2(n-1), which RK4 integrates
    // exactly; rho(t) = sqrt(rho0^2 - 2(n-1)t) to rounding accuracy
    ProfileFlow flow = ProfileFlow::cylinder(3, 1.0, 2.0, 32);
    flow.run_until(0.1);
    const double t = flow.time();
    REQUIRE(t >= 0.1);
    const double exact = std::sqrt(1.0 - 4.0 * t);
    for (std::size_t i = 0; i <= flow.intervals(); ++i)
        CHECK(flow.rho_at(i) == Catch::Approx(exact).epsilon(1e-12));
    const auto g = flow.geometry_at(flow.intervals() / 2);
    CHECK(std::abs(g.kappa1) < 1e-10);
    CHECK(g.kappa2 == Catch::Approx(1.0 / exact).epsilon(1e-12));
}

TEST_CASE("profile flow: dumbbell develops a neck singularity at the middle") {
    for (std::size_t m : {128, 192}) {
        ProfileFlow flow = ProfileFlow::dumbbell(3, 1.0, 0.35, 2.0, m);
        const SingularityReport rep = flow.run_until(1e9);
        REQUIRE_FALSE(flow.alive());
        CHECK(rep.detected);
        CHECK(rep.reason == SingularityReport::Reason::blow_up);
        CHECK(std::abs(rep.location) <= 0.2);  // neck sits at x = 0
        CHECK(rep.t_sing_estimate > 0.0);
    }
}

TEST_CASE("profile flow invariants along the dumbbell run") {
    ProfileFlow flow = ProfileFlow::dumbbell(3, 1.0, 0.35, 2.0, 128);
    const double area0 = flow.total_area();
    for (int i = 0; i < 200 && flow.alive(); ++i) flow.step();

    // area decreases monotonically under the flow
    const auto& hist = flow.history();
    REQUIRE(hist.size() >= 10);
    for (std::size_t i = 1; i < hist.size(); ++i) CHECK(hist[i].area < hist[i - 1].area);
    CHECK(flow.total_area() < area0);

    // the initial reflection symmetry is preserved to rounding accuracy
    const auto& w = flow.w();
    const std::size_t m = flow.intervals();
    for (std::size_t i = 0; i <= m / 2; ++i)
        CHECK(w[i] == Catch::Approx(w[m - i]).margin(1e-12));
    CHECK(flow.axis_hi() == Catch::Approx(-flow.axis_lo()).margin(1e-12));

    // rho stays positive at interior points
    for (std::size_t i = 1; i < m; ++i) CHECK(flow.rho_at(i) > 0.0);
}

TEST_CASE("profile flow: convex data stays convex") {
    ProfileFlow flow = ProfileFlow::sphere(3, 1.0, 64);
    for (int i = 0; i < 100 && flow.alive(); ++i) flow.step();
    CHECK(flow.min_principal() > -1e-6);
}

TEST_CASE("initial data round-trips through the text format") {
    ProfileFlow flow = ProfileFlow::dumbbell(4, 1.0, 0.4, 1.5, 64);
    std::stringstream buf;
    flow.save_initial(buf);
    ProfileFlow loaded = ProfileFlow::load(buf);
    CHECK(loaded.n() == 4);
    CHECK(loaded.boundary() == ProfileBoundary::cap);
    REQUIRE(loaded.intervals() == flow.intervals());
    for (std::size_t i = 0; i <= flow.intervals(); ++i)
        CHECK(loaded.rho_at(i) == Catch::Approx(flow.rho_at(i)).margin(1e-13));
}

TEST_CASE("profile parsing rejects malformed input") {
    {
        std::stringstream in("bad header\n0 1\n1 1\n");
        CHECK_THROWS_AS(ProfileFlow::load(in), std::runtime_error);
    }
    {
        std::stringstream in("# n=3 boundary=weird\n0 1\n1 1\n");
        CHECK_THROWS_AS(ProfileFlow::load(in), std::runtime_error);
    }
    {
        std::stringstream in("# n=3 boundary=reflect\n0 1\nnot a number\n");
        CHECK_THROWS_AS(ProfileFlow::load(in), std::runtime_error);
    }
    {
        std::stringstream in("");
        CHECK_THROWS_AS(ProfileFlow::load(in), std::runtime_error);
    }
}

TEST_CASE("from_profile validates its arguments") {
    std::vector<double> x(33), rho(33, 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
    CHECK_NOTHROW(ProfileFlow::from_profile(3, x, rho, ProfileBoundary::reflect));
    CHECK_THROWS_AS(ProfileFlow::from_profile(2, x, rho, ProfileBoundary::reflect),
                    std::invalid_argument);
    std::vector<double> short_x(x.begin(), x.begin() + 8), short_r(rho.begin(), rho.begin() + 8);
    CHECK_THROWS_AS(ProfileFlow::from_profile(3, short_x, short_r, ProfileBoundary::reflect),
                    std::invalid_argument);
    std::vector<double> bad_x = x;
    bad_x[5] = bad_x[4];  // not increasing
    CHECK_THROWS_AS(ProfileFlow::from_profile(3, bad_x, rho, ProfileBoundary::reflect),
                    std::invalid_argument);
    std::vector<double> bad_rho = rho;
    bad_rho[10] = 0.0;
    CHECK_THROWS_AS(ProfileFlow::from_profile(3, x, bad_rho, ProfileBoundary::reflect),
                    std::invalid_argument);
}

TEST_CASE("singularity detection from flow samples") {
    SECTION("constant curvature history is not flagged") {
        std::vector<FlowSample> hist;
        for (int i = 0; i < 10; ++i) {
            FlowSample s;
            s.t = 0.01 * i;
            s.max_A = 2.0;
            hist.push_back(s);
        }
        const SingularityReport rep = detect_singularity(hist);
        CHECK_FALSE(rep.detected);
    }
    SECTION("closed-form sphere history extrapolates to T = 1/6") {
        const ExactSphereFlow f = euclidean_sphere_flow(3, 1.0);
        std::vector<FlowSample> hist;
        for (int i = 0; i < 42; ++i) {
            const double t = f.T() * (0.5 + 0.012 * i);
            FlowSample s;
            s.t = t;
            s.max_A = f.H(t) / std::sqrt(3.0);  // |A| = H / sqrt(n) on a sphere
            hist.push_back(s);
        }
        const SingularityReport rep = detect_singularity(hist);
        CHECK(rep.detected);
        CHECK(rep.t_sing_estimate == Catch::Approx(1.0 / 6.0).epsilon(0.02));
    }
    SECTION("too little history throws") {
        std::vector<FlowSample> hist(1);
        CHECK_THROWS_AS(detect_singularity(hist), std::invalid_argument);
    }
}
