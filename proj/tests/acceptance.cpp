// Acceptance battery: one pass/fail line per criterion, exit 1 on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mcflab/exact_solutions.hpp"
#include "mcflab/geodesic_sphere_ode.hpp"
#include "mcflab/integral_norms.hpp"
#include "mcflab/moser.hpp"
#include "mcflab/profile_flow.hpp"
#include "mcflab/rescale.hpp"
#include "mcflab/sobolev.hpp"

using namespace mcflab;

namespace {

struct Criterion {
    std::string name;
    double time_budget;  // seconds; 0 = untimed
    std::function<bool(std::string&)> run;
};

ExactSphereFlow make_flow(int n, int c) {
    if (c == 0) return euclidean_sphere_flow(n, 1.0);
    return spaceform_sphere_flow(n, c, c == 1 ? static_cast<double>(n) : 2.0 * n);
}

double ode_tracking_error(const ExactSphereFlow& flow, double H_stop) {
    const auto samples = integrate_geodesic_sphere(flow.ambient, flow.geodesic_radius(0.0),
                                                   2.0 * flow.T(), H_stop);
    double max_rel = 0.0;
    for (const auto& [t, rho] : samples) {
        const double exact = flow.geodesic_radius(t);
        const double H_ode = flow.n() * cot_c(flow.c(), rho);
        max_rel = std::max(max_rel, std::abs(H_ode - flow.H(t)) / flow.H(t));
        (void)exact;
    }
    return max_rel;
}

// --- criterion 1: euclidean shrinking sphere ---------------------------------
bool criterion1(std::string& detail) {
    const ExactSphereFlow f = euclidean_sphere_flow(3, 1.0);
    const bool T_ok = std::abs(f.T() - 1.0 / 6.0) <= 1e-12;
    const double err = ode_tracking_error(f, 100.0);
    std::ostringstream os;
    os << "T=" << f.T() << " ode_rel_err=" << err;
    detail = os.str();
    return T_ok && err <= 1e-6;
}

// --- criterion 2: curved-ambient shrinking spheres ---------------------------
bool criterion2(std::string& detail) {
    bool ok = true;
    std::ostringstream os;
    {
        const ExactSphereFlow f = spaceform_sphere_flow(3, 1, 3.0);
        ok = ok && f.d && std::abs(*f.d - 0.5) <= 1e-12;
        ok = ok && std::abs(f.T() - std::log(2.0) / 6.0) <= 1e-12;
        ok = ok && std::abs(f.H(0.0) - 3.0) <= 1e-12 * 3.0;
        const double err = ode_tracking_error(f, 100.0);
        ok = ok && err <= 1e-8;
        os << "c=+1: d=" << *f.d << " ode_rel_err=" << err;
    }
    {
        const ExactSphereFlow f = spaceform_sphere_flow(3, -1, 6.0);
        ok = ok && f.d && std::abs(*f.d - 4.0 / 3.0) <= 1e-12;
        ok = ok && std::abs(f.T() - std::log(4.0 / 3.0) / 6.0) <= 1e-12;
        const double err = ode_tracking_error(f, 100.0);
        ok = ok && err <= 1e-8;
        const H2MarginRecord m = h2_lower_bound_monitor(f, 0.999 * f.T());
        ok = ok && m.initial_condition_holds && m.preserved;
        os << "; c=-1: d=" << *f.d << " ode_rel_err=" << err
           << " min(H^2-n^2)=" << m.min_margin;
    }
    detail = os.str();
    return ok;
}

// --- criterion 3: sharp-exponent classification matrix -----------------------
bool criterion3(std::string& detail) {
    int mistakes = 0;
    double max_expo_err = 0.0;
    for (int c : {-1, 0, 1}) {
        for (int n : {3, 4, 5}) {
            const ExactSphereFlow f = make_flow(n, c);
            const auto horizons = dyadic_horizons(f.T());
            for (int k = 0; k <= 3; ++k) {
                const double alpha = n + k;
                const DivergenceVerdict v = classify_divergence(f, alpha, horizons);
                const bool want_finite = alpha < n + 2;
                const bool got_finite = v.classification == DivergenceVerdict::Class::finite;
                if (v.classification == DivergenceVerdict::Class::inconclusive ||
                    want_finite != got_finite)
                    ++mistakes;
                if (c == 0)
                    max_expo_err = std::max(
                        max_expo_err, std::abs(v.fitted_exponent - 0.5 * (n - alpha)));
            }
        }
    }
    std::ostringstream os;
    os << "misclassifications=" << mistakes << "/36 max_flat_exponent_err=" << max_expo_err;
    detail = os.str();
    return mistakes == 0 && max_expo_err <= 0.05;
}

// --- criterion 4: extrapolated norm limit ------------------------------------
bool criterion4(std::string& detail) {
    const ExactSphereFlow f = euclidean_sphere_flow(3, 1.0);
    const DivergenceVerdict v = classify_divergence(f, 4.0, dyadic_horizons(f.T()));
    const double expected = std::pow(54.0 * kPi * kPi, 0.25);
    const double err = std::abs(v.fitted_limit_or_rate - expected) / expected;
    std::ostringstream os;
    os << "limit=" << v.fitted_limit_or_rate << " expected=" << expected << " rel_err=" << err;
    detail = os.str();
    return v.classification == DivergenceVerdict::Class::finite && err <= 1e-4;
}

// --- criterion 5: evolution-equation residual convergence --------------------
bool criterion5(std::string& detail) {
    std::ostringstream os;
    bool ok = true;
    for (int c : {-1, 0, 1}) {
        const ExactSphereFlow f = make_flow(3, c);
        const double t = 0.3 * f.T();
        const double dt = 1e-3 * f.T();
        auto residual = [&](double h) {
            std::vector<GeometrySnapshot> seq = {f.snapshot_at(t - h), f.snapshot_at(t),
                                                 f.snapshot_at(t + h)};
            return std::max(max_abs(evolution_residual_H(seq, t, f.ambient)),
                            max_abs(evolution_residual_metric(seq, t)));
        };
        const double r1 = residual(dt), r2 = residual(0.5 * dt);
        const double order = std::log2(r1 / r2);
        ok = ok && order >= 1.8 && order <= 2.2;
        os << "c=" << c << ": order=" << order << "  ";
    }
    detail = os.str();
    return ok;
}

// --- criterion 6: Sobolev inequality battery ----------------------------------
bool criterion6(std::string& detail) {
    const int n = 3;
    const AmbientSpace amb = AmbientSpace::space_form(n, 0);
    const SobolevConstants constants = SobolevConstants::canonical(n);
    // independent arrangement of C(3, 3/4)
    const double expected = std::exp(std::log(0.5 * kPi) + std::log(2.0) - std::log(0.75) -
                                     std::log(0.25) / 3.0 + std::log(1.5) -
                                     std::log(4.0 * kPi / 3.0) / 3.0);
    const bool const_ok = std::abs(constants.C() - expected) <= 1e-12 * expected;

    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> axis(0.6, 1.4), center(-0.5, 0.5), wid(0.4, 1.2),
        flr(0.0, 0.8), tf(0.5, 5.0), coin(0.0, 1.0);
    int violations = 0, total = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const double a = axis(rng);
        const double b = (coin(rng) < 0.5) ? a : axis(rng);
        const double x0 = center(rng) * a, width = wid(rng) * a, floor_v = flr(rng);
        const double t_free = tf(rng);
        const SurfaceOfRevolution surf = SurfaceOfRevolution::ellipsoid(n, a, b, 96);
        const TestFunction f = make_test_function(surf, [&](double x) {
            const double u = (x - x0) / width;
            const double bump = std::max(0.0, 1.0 - u * u);
            return floor_v + bump * bump;
        });
        const double tol = 1e-3;  // PL-gradient discretization slack
        const InequalityRecord ms = michael_simon_check(surf, f, constants, amb, tol);
        const GradientBoundRecord grad = gradient_lower_bound_check(surf, f, t_free, constants, amb, tol);
        if (!(ms.holds && grad.main.holds && grad.intermediate.holds)) ++violations;
        ++total;
    }
    std::ostringstream os;
    os << "violations=" << violations << "/" << total << " C(3,3/4)=" << constants.C();
    detail = os.str();
    return const_ok && violations == 0 && total >= 500;
}

// --- criterion 7: iteration bookkeeping and energy inequality -----------------
bool criterion7(std::string& detail) {
    bool ok = true;
    std::ostringstream os;
    for (int n : {3, 4, 5}) {
        const IterationSchedule sched = iteration_schedule(n, 1.0, 1.0);
        ok = ok && std::abs(sched.partial_sum_inv_p(60 * n) - 1.0) <= 1e-12;
    }
    double min_res = std::numeric_limits<double>::infinity();
    double max_xerr = 0.0;
    for (int c : {-1, 0, 1}) {
        const ExactSphereFlow f = make_flow(3, c);
        const double p = 2.5, T0 = 0.5 * f.T();
        const EnergyResidualRecord rec = local_energy_check(f, p, 0.0, T0);
        min_res = std::min(min_res, rec.min_residual);
        const double lp = lp_functional(f, p, 0.0, T0);
        const double acc = spacetime_norm(f, 5.0, T0).accumulated;
        max_xerr = std::max(max_xerr, std::abs(lp - acc) / acc);
    }
    ok = ok && min_res >= 0.0 && max_xerr <= 1e-8;
    os << "min_energy_residual=" << min_res << " lp_cross_err=" << max_xerr;
    detail = os.str();
    return ok;
}

// --- criterion 8: rescaling normalization and tail vanishing ------------------
bool criterion8(std::string& detail) {
    const ExactSphereFlow f = euclidean_sphere_flow(3, 1.0);
    std::vector<double> times;
    for (int i = 1; i <= 6; ++i) times.push_back(f.T() * (1.0 - std::pow(4.0, -i)));
    bool ok = true;
    double max_norm_err = 0.0, max_window = 0.0, min_principal = 1e300;
    for (double t : times) {
        const RescaleResult r = rescale(f, t);
        if (!r.flow) { ok = false; continue; }
        max_norm_err = std::max(max_norm_err, std::abs(r.flow->H2(1.0) - 1.0));
        max_window = std::max(max_window, r.flow->max_H2_on_window() - 1.0);
        min_principal = std::min(min_principal, r.flow->min_principal(1.0));
    }
    ok = ok && max_norm_err <= 1e-12 && max_window <= 1e-9 && min_principal >= 0.0;
    const auto seq = blowup_sequence(f, times);
    const NormVanishingRecord rec = norm_vanishing_check(f, seq, 4.0);
    ok = ok && rec.vanishing;
    std::ostringstream os;
    os << "norm_err=" << max_norm_err << " window_excess=" << max_window
       << " tail_last/first=" << rec.tails.back() / rec.tails.front();
    detail = os.str();
    return ok;
}

// --- criterion 9: dumbbell neck pinch and criterion blow-up -------------------
bool criterion9(std::string& detail) {
    ProfileFlow flow = ProfileFlow::dumbbell(3, 1.0, 0.35, 2.0, 256);
    const SingularityReport rep = flow.run_until(1e9);
    bool ok = rep.detected && std::abs(rep.location) <= 0.2;

    std::vector<std::pair<double, double>> inner;
    for (const auto& s : flow.history()) inner.emplace_back(s.t, s.inner_Hn2);
    const double t_end = inner.back().first;
    const double t90 = 0.9 * std::min(rep.t_sing_estimate, t_end);
    auto trapz = [&](double t_hi) {
        double acc = 0.0;
        for (std::size_t i = 1; i < inner.size(); ++i) {
            if (inner[i - 1].first >= t_hi) break;
            const double t1 = std::min(inner[i].first, t_hi);
            double y1 = inner[i].second;
            if (t1 < inner[i].first) {
                const double fr = (t1 - inner[i - 1].first) / (inner[i].first - inner[i - 1].first);
                y1 = inner[i - 1].second + fr * (inner[i].second - inner[i - 1].second);
            }
            acc += 0.5 * (inner[i - 1].second + y1) * (t1 - inner[i - 1].first);
        }
        return acc;
    };
    const double upto90 = trapz(t90);
    const double total = trapz(t_end + 1.0);
    const double ratio = upto90 > 0.0 ? total / upto90 : 0.0;
    ok = ok && ratio >= 10.0;
    std::ostringstream os;
    os << "neck_location=" << rep.location << " t_sing=" << rep.t_sing_estimate
       << " blowup_ratio=" << ratio;
    detail = os.str();
    return ok;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"euclidean shrinking sphere: exact T and ODE tracking", 1.0, criterion1},
        {"curved-ambient shrinking spheres: closed forms and margins", 2.0, criterion2},
        {"finite/divergent classification matrix across n, c, alpha", 30.0, criterion3},
        {"extrapolated L4 space-time norm limit", 5.0, criterion4},
        {"second-order evolution residual convergence", 5.0, criterion5},
        {"Sobolev inequality battery (500 admissible pairs)", 60.0, criterion6},
        {"iteration schedule sums and localized energy inequality", 10.0, criterion7},
        {"blow-up rescaling normalization and tail vanishing", 10.0, criterion8},
        {"dumbbell neck pinch and criterion blow-up ratio", 120.0, criterion9},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = criteria[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = criteria[i].time_budget <= 0.0 || secs <= criteria[i].time_budget;
        if (!in_budget) {
            detail += " [exceeded time budget]";
            pass = false;
        }
        std::printf("[%s] criterion %zu: %s (%.2fs) %s\n", pass ? "pass" : "FAIL", i + 1,
                    criteria[i].name.c_str(), secs, detail.c_str());
        if (!pass) ++failures;
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
