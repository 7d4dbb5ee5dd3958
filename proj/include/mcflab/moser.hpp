#ifndef MCFLAB_MOSER_HPP
#define MCFLAB_MOSER_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mcflab/exact_solutions.hpp"
#include "mcflab/integral_norms.hpp"
#include "mcflab/profile_flow.hpp"
#include "mcflab/quadrature.hpp"
#include "mcflab/sobolev.hpp"
#include "mcflab/space_form.hpp"

namespace mcflab {

// Moser iteration bookkeeping:
//   mu = 1 + 2/n, p_k = (n+2)/2 mu^k,
//   tau_k = (1 - mu^{-(k+1)}) t, R_k = (R/2)(1 + mu^{-k/2}).
// The exponent sums have closed forms: sum 1/p_k = 1, sum k/p_k = n/2.
struct IterationSchedule {
    int n = 3;
    double t = 0.0;
    double R = 0.0;
    double mu = 0.0;

    IterationSchedule(int n_, double t_, double R_) : n(n_), t(t_), R(R_) {
        if (n < 3) throw std::invalid_argument("IterationSchedule: n must be >= 3");
        if (t <= 0.0 || R <= 0.0)
            throw std::invalid_argument("IterationSchedule: t and R must be positive");
        mu = 1.0 + 2.0 / n;
    }

    double p(int k) const { return 0.5 * (n + 2.0) * std::pow(mu, k); }
    double tau(int k) const { return (1.0 - std::pow(mu, -(k + 1))) * t; }
    double radius(int k) const { return 0.5 * R * (1.0 + std::pow(mu, -0.5 * k)); }

    double sum_inv_p() const { return 1.0; }
    double sum_k_over_p() const { return 0.5 * n; }

    double partial_sum_inv_p(int m) const {
        double s = 0.0;
        for (int k = 0; k <= m; ++k) s += 1.0 / p(k);
        return s;
    }
    double partial_sum_k_over_p(int m) const {
        double s = 0.0;
        for (int k = 0; k <= m; ++k) s += k / p(k);
        return s;
    }
};

inline IterationSchedule iteration_schedule(int n, double t, double R) {
    return IterationSchedule(n, t, R);
}

// The constant beta with d(H^2)/dt <= Lap H^2 + beta H^2: the H^2 evolution
// gives 2 H^2 (|A|^2 + Ric(nu,nu)) <= 2 (sup|A|^2 + n K2) H^2.
inline double beta_constant(double sup_A, const AmbientSpace& amb) {
    if (sup_A < 0.0) throw std::invalid_argument("beta_constant: sup|A| must be nonnegative");
    return 2.0 * (sup_A * sup_A + amb.n * amb.K2);
}

// L(p, t_start, .) = int_{t_start}^{t_end} int f^p with f = H^2, over the
// whole manifold of an exact flow.
inline double lp_functional(const ExactSphereFlow& flow, double p, double t_start,
                            double t_end, double rel_tol = 1e-10) {
    if (p < 1.0) throw std::invalid_argument("lp_functional: p must be >= 1");
    if (t_start < 0.0 || t_end < t_start)
        throw std::invalid_argument("lp_functional: bad time window");
    if (t_end >= flow.T()) throw ExistenceTimeExceeded(flow.T());
    return integrate_adaptive(
        [&](double t) { return flow.inner_integral(t, 2.0 * p); }, t_start, t_end, rel_tol);
}

// Stream variant over snapshots, restricted to an axis interval [x_lo, x_hi]
// when given (profile flows).
inline double lp_functional(const std::vector<GeometrySnapshot>& stream,
                            const std::vector<SurfaceOfRevolution>& surfaces, double p,
                            double t_start, double x_lo, double x_hi) {
    if (stream.size() != surfaces.size() || stream.size() < 2)
        throw std::invalid_argument("lp_functional: need >= 2 matching snapshots");
    std::vector<std::pair<double, double>> inner;
    for (std::size_t k = 0; k < stream.size(); ++k) {
        if (stream[k].time < t_start) continue;
        double s = 0.0;
        for (std::size_t i = 0; i < surfaces[k].size(); ++i)
            if (surfaces[k].x[i] >= x_lo && surfaces[k].x[i] <= x_hi)
                s += std::pow(stream[k].points[i].H * stream[k].points[i].H, p) *
                     stream[k].points[i].weight;
        inner.emplace_back(stream[k].time, s);
    }
    double acc = 0.0;
    for (std::size_t k = 1; k < inner.size(); ++k)
        acc += 0.5 * (inner[k].second + inner[k - 1].second) *
               (inner[k].first - inner[k - 1].first);
    return acc;
}

// Axis-interval cutoff: eta = 1 on [center-R, center+R], 0 outside
// [center-Rp, center+Rp], linear in between (|d eta/dx| = 1/(Rp - R)).
struct AxisCutoff {
    double center = 0.0;
    double R = 0.0;
    double Rp = 0.0;

    AxisCutoff(double center_, double R_, double Rp_) : center(center_), R(R_), Rp(Rp_) {
        if (!(0.0 < R && R < Rp)) throw std::invalid_argument("AxisCutoff: need 0 < R < R'");
    }
    double operator()(double x) const {
        const double d = std::abs(x - center);
        if (d <= R) return 1.0;
        if (d >= Rp) return 0.0;
        return (Rp - d) / (Rp - R);
    }
    double slope_bound() const { return 1.0 / (Rp - R); }
    double dx(double x) const {
        const double d = std::abs(x - center);
        if (d <= R || d >= Rp) return 0.0;
        return (x > center ? -1.0 : 1.0) / (Rp - R);
    }
};

// The piecewise-linear time ramp: 0 up to tau, linear on [tau, tau'], 1 after.
struct TimeRamp {
    double tau = 0.0;
    double tau_p = 0.0;
    TimeRamp(double tau_, double tau_p_) : tau(tau_), tau_p(tau_p_) {
        if (!(tau < tau_p)) throw std::invalid_argument("TimeRamp: need tau < tau'");
    }
    double operator()(double t) const {
        if (t <= tau) return 0.0;
        if (t >= tau_p) return 1.0;
        return (t - tau) / (tau_p - tau);
    }
    double slope(double t) const { return (t > tau && t < tau_p) ? 1.0 / (tau_p - tau) : 0.0; }
};

struct EnergyResidualRecord {
    // residual_k = RHS_k - LHS_k of the localized energy inequality at step k;
    // nonnegative residuals mean the inequality holds.
    std::vector<double> residuals;
    std::vector<double> times;
    double min_residual = 0.0;
    double beta = 0.0;
};

// Closed-manifold case (eta == 1) along an exact flow: the localized energy
// inequality (no cutoff terms) reduces to d/dt int f^p <= beta p int f^p
// with f = H^2, checked on a uniform time grid of [t_lo, t_hi].
inline EnergyResidualRecord local_energy_check(const ExactSphereFlow& flow, double p,
                                               double t_lo, double t_hi,
                                               std::size_t steps = 64) {
    if (p < 1.0) throw std::invalid_argument("local_energy_check: p must be >= 1");
    if (!(0.0 <= t_lo && t_lo < t_hi && t_hi < flow.T()))
        throw std::invalid_argument("local_energy_check: bad time window");
    EnergyResidualRecord rec;
    // sup |A| over the window: umbilic, |A| = H / sqrt(n), H increasing
    const double supA = std::abs(flow.H(t_hi)) / std::sqrt(static_cast<double>(flow.n()));
    rec.beta = beta_constant(supA, flow.ambient);
    auto energy = [&](double t) { return flow.inner_integral(t, 2.0 * p); };
    const double dt = (t_hi - t_lo) / static_cast<double>(steps);
    rec.min_residual = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = t_lo + dt * static_cast<double>(k);
        // analytic d/dt(H^{2p} V): V' = -H^2 V for umbilic spheres
        const double H = flow.H(t);
        const double dE = energy(t) * (2.0 * p * flow.dHdt(t) / H - H * H);
        const double residual = rec.beta * p * energy(t) - dE;
        rec.residuals.push_back(residual);
        rec.times.push_back(t);
        rec.min_residual = std::min(rec.min_residual, residual);
    }
    return rec;
}

// Discrete localized energy inequality on a profile-flow snapshot stream:
//   d/dt int f^p eta^2 + int |grad(f^{p/2} eta)|^2
//     <= 2 int |grad eta|^2 f^p + beta p int f^p eta^2,
// optionally multiplied through by the time ramp psi (with the psi' term on
// the right). Time derivatives are centered between consecutive snapshots.
inline EnergyResidualRecord local_energy_check(const std::vector<SurfaceOfRevolution>& surfaces,
                                               const std::vector<double>& times, double p,
                                               const AxisCutoff& eta, const AmbientSpace& amb,
                                               const TimeRamp* psi = nullptr) {
    if (surfaces.size() != times.size() || surfaces.size() < 2)
        throw std::invalid_argument("local_energy_check: need >= 2 snapshots");
    EnergyResidualRecord rec;
    double supA = 0.0;
    for (const auto& s : surfaces)
        for (std::size_t i = 0; i < s.size(); ++i) supA = std::max(supA, std::sqrt(s.a_norm2(i)));
    rec.beta = beta_constant(supA, amb);

    struct Terms { double energy, grad_term, cutoff_term; };
    auto eval = [&](const SurfaceOfRevolution& s) {
        Terms tm{0.0, 0.0, 0.0};
        std::vector<double> fp_eta(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double H = s.mean_curvature(i);
            const double f = H * H;
            const double e = eta(s.x[i]);
            fp_eta[i] = std::pow(f, 0.5 * p) * e;
            const double w = s.weight(i);
            tm.energy += std::pow(f, p) * e * e * w;
            // |grad eta| on the surface: |eta'(x)| |dx/ds| <= |eta'(x)|
            const double geta = std::abs(eta.dx(s.x[i])) * std::abs(s.xp(i)) /
                                std::sqrt(s.g_meridian(i));
            tm.cutoff_term += geta * geta * std::pow(f, p) * w;
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double g = s.gradient_norm(fp_eta, i);
            tm.grad_term += g * g * s.weight(i);
        }
        return tm;
    };

    std::vector<Terms> terms(surfaces.size());
    for (std::size_t k = 0; k < surfaces.size(); ++k) terms[k] = eval(surfaces[k]);

    rec.min_residual = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < surfaces.size(); ++k) {
        const double dt = times[k + 1] - times[k];
        if (!(dt > 0.0)) throw std::invalid_argument("local_energy_check: times not increasing");
        const double tm = 0.5 * (times[k] + times[k + 1]);
        const double E = 0.5 * (terms[k].energy + terms[k + 1].energy);
        const double G = 0.5 * (terms[k].grad_term + terms[k + 1].grad_term);
        const double D = 0.5 * (terms[k].cutoff_term + terms[k + 1].cutoff_term);
        double lhs, rhs;
        if (psi) {
            const double psim = (*psi)(tm);
            lhs = ((*psi)(times[k + 1]) * terms[k + 1].energy -
                   (*psi)(times[k]) * terms[k].energy) / dt + psim * G;
            rhs = 2.0 * psim * D + (rec.beta * p * psim + psi->slope(tm)) * E;
        } else {
            lhs = (terms[k + 1].energy - terms[k].energy) / dt + G;
            rhs = 2.0 * D + rec.beta * p * E;
        }
        rec.residuals.push_back(rhs - lhs);
        rec.times.push_back(tm);
        rec.min_residual = std::min(rec.min_residual, rhs - lhs);
    }
    return rec;
}

// Volume of the geodesic ball of radius r in the n-dimensional space form of
// curvature K <= 0: n omega_n int_0^r (sinh(sqrt(-K) s)/sqrt(-K))^{n-1} ds.
inline double comparison_ball_volume(int n, double K, double r) {
    if (K > 0.0) throw std::invalid_argument("comparison_ball_volume: K must be <= 0");
    if (r < 0.0) throw std::invalid_argument("comparison_ball_volume: r must be >= 0");
    const double wn = unit_ball_volume(n);
    if (K == 0.0) return wn * std::pow(r, n);
    const double s = std::sqrt(-K);
    return n * wn *
           integrate_adaptive([&](double u) { return std::pow(std::sinh(s * u) / s, n - 1); },
                              0.0, r, 1e-12);
}

struct AdmissibleRadius {
    double value = 0.0;
    bool unbounded = false;  // conditions vacuous (K2 = 0 and iN = inf)
    double critical_volume = 0.0;
};

// Largest R' whose Bishop-Gromov comparison volume Vol_K(B(R')) satisfies
// both admissibility conditions (bisection to relative 1e-10).
inline AdmissibleRadius admissible_radius(const AmbientSpace& amb, double K_lower,
                                          const SobolevConstants& constants) {
    if (K_lower > 0.0)
        throw std::invalid_argument("admissible_radius: K must be a non-positive constant");
    AdmissibleRadius out;
    const int n = constants.n;
    const double wn = constants.omega_n();

    double v_crit = std::numeric_limits<double>::infinity();
    if (amb.K2 > 0.0)
        v_crit = wn / (n + 1.0) * std::pow(amb.K2, -0.5 * n);
    if (!std::isinf(amb.iN) && amb.K2 > 0.0) {
        const double half = 0.5 * amb.iN * std::sqrt(amb.K2);
        if (half < 0.5 * kPi) {
            const double v2 = wn / (n + 1.0) *
                              std::pow(std::sin(half) / std::sqrt(amb.K2), n);
            v_crit = std::min(v_crit, v2);
        }
    } else if (!std::isinf(amb.iN) && amb.K2 == 0.0) {
        // flat limit of condition (11): 2 (n+1)^{1/n} (V/wn)^{1/n} <= iN
        const double v2 = wn / (n + 1.0) * std::pow(0.5 * amb.iN, n);
        v_crit = std::min(v_crit, v2);
    }
    out.critical_volume = v_crit;
    if (std::isinf(v_crit)) {
        out.unbounded = true;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }

    // bracket, then bisect Vol_K(B(r)) = v_crit
    double lo = 0.0, hi = 1.0;
    while (comparison_ball_volume(n, K_lower, hi) < v_crit) hi *= 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-10 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (comparison_ball_volume(n, K_lower, mid) <= v_crit) lo = mid; else hi = mid;
    }
    out.value = lo;
    return out;
}

struct SupBoundRecord {
    double lhs = 0.0;       // max over [T0/2, T0] of H^2
    double rhs_norm = 0.0;  // ( int_0^{T0} int |H|^{n+2} )^{2/(n+2)}
    double ratio = 0.0;     // lhs / rhs_norm, the empirical C3
};

// Sup-bound shape: the sup of H^2 on [T0/2, T0] against the L^{n+2}
// space-time norm; reports the empirical ratio instead of asserting a constant.
inline SupBoundRecord sup_bound_check(const ExactSphereFlow& flow, double T0) {
    if (!(T0 > 0.0 && T0 < flow.T()))
        throw std::invalid_argument("sup_bound_check: T0 must be strictly inside [0, T)");
    SupBoundRecord rec;
    // H^2 is monotone increasing along shrinking spheres
    rec.lhs = flow.H(T0) * flow.H(T0);
    const double norm = spacetime_norm(flow, static_cast<double>(flow.n()) + 2.0, T0).accumulated;
    rec.rhs_norm = std::pow(norm, 2.0 / (flow.n() + 2.0));
    rec.ratio = rec.lhs / rec.rhs_norm;
    return rec;
}

} // namespace mcflab

#endif // MCFLAB_MOSER_HPP
