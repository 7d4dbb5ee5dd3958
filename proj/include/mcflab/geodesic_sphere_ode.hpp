#ifndef MCFLAB_GEODESIC_SPHERE_ODE_HPP
#define MCFLAB_GEODESIC_SPHERE_ODE_HPP

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mcflab/space_form.hpp"

namespace mcflab {

// Radial reduction of mean curvature flow for geodesic spheres:
//   d rho / dt = -H(rho) = -n cot_c(rho).
namespace detail {

inline double sphere_rate(const AmbientSpace& amb, double rho) {
    return -static_cast<double>(amb.n) * cot_c(amb.c, rho);
}

// One classic RK4 step; throws if an intermediate stage leaves the domain.
inline double rk4_sphere(const AmbientSpace& amb, double rho, double dt) {
    const double k1 = sphere_rate(amb, rho);
    const double k2 = sphere_rate(amb, rho + 0.5 * dt * k1);
    const double k3 = sphere_rate(amb, rho + 0.5 * dt * k2);
    const double k4 = sphere_rate(amb, rho + dt * k3);
    return rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace detail

struct GeodesicSphereStep {
    double rho = 0.0;            // radius after the step (valid if !crossed_zero)
    double error_estimate = 0.0; // step-doubling estimate of the local error
    bool crossed_zero = false;   // radius would vanish inside the step
    double t_cross_lo = 0.0;     // bracketing of the singular time within [0, dt]
    double t_cross_hi = 0.0;
};

// One high-order ODE step with a step-doubling error estimate. If the radius
// would cross zero within dt, the singular time is bracketed instead.
inline GeodesicSphereStep step_geodesic_sphere(const AmbientSpace& amb, double rho, double dt) {
    amb.validate();
    if (rho <= 0.0) throw std::domain_error("step_geodesic_sphere: rho must be positive");
    if (amb.c == 1 && rho >= kPi)
        throw std::domain_error("step_geodesic_sphere: rho must be < pi for c = +1");
    if (dt < 0.0) throw std::invalid_argument("step_geodesic_sphere: dt must be nonnegative");

    GeodesicSphereStep out;
    if (dt == 0.0) { out.rho = rho; return out; }

    // A single RK4 substep of size h is trustworthy while h stays well below
    // the curvature time scale rho^2 / (2n).
    auto safe_step = [&](double r) { return 0.05 * r * r / amb.n; };

    // First try the plain step with step-doubling error estimate.
    if (dt <= safe_step(rho)) {
        const double one = detail::rk4_sphere(amb, rho, dt);
        const double half = detail::rk4_sphere(amb, detail::rk4_sphere(amb, rho, 0.5 * dt), 0.5 * dt);
        if (one > 0.0 && half > 0.0) {
            out.rho = half;  // keep the more accurate value
            out.error_estimate = std::abs(one - half) / 15.0;
            return out;
        }
    }

    // Substep adaptively. If the radius collapses inside [0, dt], bracket the
    // singular time: once rho <= eps, the remaining lifetime is below rho^2
    // (it equals rho^2/(2n) (1 + O(c rho^2)) for every ambient).
    double t = 0.0, r = rho, err = 0.0;
    const double r_floor = 1e-7 * rho;
    while (t < dt) {
        if (r <= r_floor) {
            out.crossed_zero = true;
            out.t_cross_lo = t;
            out.t_cross_hi = t + r * r;
            return out;
        }
        const double h = std::min(safe_step(r), dt - t);
        const double one = detail::rk4_sphere(amb, r, h);
        const double half = detail::rk4_sphere(amb, detail::rk4_sphere(amb, r, 0.5 * h), 0.5 * h);
        err += std::abs(one - half) / 15.0;
        r = half;
        t += h;
    }
    out.rho = r;
    out.error_estimate = err;
    return out;
}

// Adaptive integration of the radial ODE from rho0 over [0, t_end], stopping
// early once H = n cot_c(rho) reaches H_stop (if H_stop > 0). Returns sampled
// (t, rho) pairs including both endpoints actually reached.
inline std::vector<std::pair<double, double>> integrate_geodesic_sphere(
        const AmbientSpace& amb, double rho0, double t_end,
        double H_stop = 0.0, double rel_tol = 1e-12) {
    amb.validate();
    if (rho0 <= 0.0) throw std::domain_error("integrate_geodesic_sphere: rho0 must be positive");
    std::vector<std::pair<double, double>> samples;
    samples.emplace_back(0.0, rho0);

    double t = 0.0, rho = rho0;
    // curvature time scale ~ rho^2 / (2n); start well below it
    double dt = rho * rho / (2.0 * amb.n) * 1e-2;
    while (t < t_end) {
        if (H_stop > 0.0 && amb.n * cot_c(amb.c, rho) >= H_stop) break;
        dt = std::min(dt, t_end - t);
        GeodesicSphereStep s = step_geodesic_sphere(amb, rho, dt);
        if (s.crossed_zero) {
            dt = std::max(0.5 * s.t_cross_lo, 1e-300);
            if (dt <= 1e-18 * rho0 * rho0) break;
            continue;
        }
        const double tol = rel_tol * std::max(rho, 1e-12);
        if (s.error_estimate > tol) { dt *= 0.5; continue; }
        t += dt;
        rho = s.rho;
        samples.emplace_back(t, rho);
        if (s.error_estimate < 0.02 * tol) dt *= 2.0;
        dt = std::min(dt, rho * rho / (2.0 * amb.n) * 0.25);
        if (dt <= 0.0) break;
    }
    return samples;
}

} // namespace mcflab

#endif // MCFLAB_GEODESIC_SPHERE_ODE_HPP
