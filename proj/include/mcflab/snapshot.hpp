#ifndef MCFLAB_SNAPSHOT_HPP
#define MCFLAB_SNAPSHOT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcflab/space_form.hpp"

namespace mcflab {

// One sample point of a discrete hypersurface. The induced metric and the
// second fundamental form are stored in coordinates that diagonalize both
// (meridian + rotational directions for everything this library produces),
// so only the diagonal coefficients are kept. Both indices of h are down;
// traces always go through the inverse metric.
struct SamplePoint {
    std::vector<double> g;  // diagonal metric coefficients, length n
    std::vector<double> h;  // diagonal second fundamental form coefficients
    double H = 0.0;         // mean curvature as stored by the producer
    double weight = 0.0;    // discrete area measure dmu
    double lap_H = 0.0;     // Laplace-Beltrami of H (zero when H is constant)

    double trace_h() const {
        double s = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) s += h[j] / g[j];
        return s;
    }
    double a_norm2() const {
        double s = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double k = h[j] / g[j];
            s += k * k;
        }
        return s;
    }
    double min_principal() const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < g.size(); ++j) m = std::min(m, h[j] / g[j]);
        return m;
    }
};

// A hypersurface-at-time snapshot.
struct GeometrySnapshot {
    int n = 3;
    double time = 0.0;
    int nu_orientation = +1;   // +1: outward normal, H > 0 for round spheres
    double tolerance = 1e-10;  // declared trace-consistency tolerance
    std::vector<SamplePoint> points;

    double total_measure() const {
        double s = 0.0;
        for (const auto& p : points) s += p.weight;
        return s;
    }

    bool constant_H(double tol = 1e-12) const {
        if (points.empty()) return true;
        double lo = points.front().H, hi = lo;
        for (const auto& p : points) {
            lo = std::min(lo, p.H);
            hi = std::max(hi, p.H);
        }
        return hi - lo <= tol * std::max(1.0, std::abs(hi));
    }

    void validate() const {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            if (p.g.size() != static_cast<std::size_t>(n) || p.h.size() != p.g.size())
                throw std::invalid_argument("GeometrySnapshot: coefficient length != n at point " +
                                            std::to_string(i));
            if (p.weight <= 0.0)
                throw std::invalid_argument("GeometrySnapshot: nonpositive measure weight at point " +
                                            std::to_string(i));
            for (double gj : p.g)
                if (gj <= 0.0)
                    throw std::invalid_argument("GeometrySnapshot: metric not positive definite at point " +
                                                std::to_string(i));
            const double tr = p.trace_h();
            if (std::abs(tr - p.H) > tolerance * std::max(1.0, std::abs(p.H)))
                throw std::invalid_argument("GeometrySnapshot: trace of h differs from H at point " +
                                            std::to_string(i));
        }
    }
};

// Umbilic geodesic-sphere snapshot: h_ij = (H/n) g_ij with H = n cot_c(radius),
// total measure equal to the geodesic-sphere area in the space form.
inline GeometrySnapshot umbilic_sphere_geometry(const AmbientSpace& amb, double radius,
                                                std::size_t num_points = 32) {
    amb.validate();
    if (radius <= 0.0) throw std::invalid_argument("umbilic_sphere_geometry: radius must be positive");
    if (amb.c == 1 && radius >= kPi)
        throw std::invalid_argument("umbilic_sphere_geometry: radius must be < pi for c = +1");
    if (num_points == 0) throw std::invalid_argument("umbilic_sphere_geometry: need at least one point");

    const double H = amb.n * cot_c(amb.c, radius);
    const double s = sin_c(amb.c, radius);
    const double area = unit_sphere_area(amb.n) * std::pow(s, amb.n);

    GeometrySnapshot snap;
    snap.n = amb.n;
    snap.tolerance = 1e-12;
    SamplePoint p;
    p.g.assign(amb.n, s * s);
    p.h.assign(amb.n, (H / amb.n) * s * s);
    p.H = H;
    p.weight = area / static_cast<double>(num_points);
    snap.points.assign(num_points, p);
    return snap;
}

// ---------------------------------------------------------------------------
// Surfaces of revolution: profile (x(theta), rho(theta)) rotated around the
// axis in R^{n+1}. Parametrized with x' > 0 so the normal (-rho', x')/|..|
// points away from the axis. Principal curvatures:
//   kappa_1 = (x'' rho' - rho'' x') / g^{3/2}   (meridian)
//   kappa_2 = x' / (rho sqrt(g))                (n-1 rotational directions)
// with g = x'^2 + rho'^2. For a graph rho(x) these reduce to the usual
//   kappa_1 = -rho'' / (1+rho'^2)^{3/2}, kappa_2 = 1 / (rho sqrt(1+rho'^2)).
// ---------------------------------------------------------------------------
struct SurfaceOfRevolution {
    int n = 3;
    std::vector<double> theta;  // strictly increasing parameter
    std::vector<double> x;      // axis coordinate, strictly increasing
    std::vector<double> rho;    // distance from the axis, > 0 at samples

    std::size_t size() const { return theta.size(); }

    // Central differences in theta; second-order one-sided stencils at ends.
    static double d1(const std::vector<double>& t, const std::vector<double>& v, std::size_t i) {
        const std::size_t m = v.size() - 1;
        if (i == 0) {
            const double h0 = t[1] - t[0], h1 = t[2] - t[1];
            return (-(2 * h0 + h1) / (h0 * (h0 + h1))) * v[0] + ((h0 + h1) / (h0 * h1)) * v[1] -
                   (h0 / (h1 * (h0 + h1))) * v[2];
        }
        if (i == m) {
            const double h0 = t[m - 1] - t[m - 2], h1 = t[m] - t[m - 1];
            return (h1 / (h0 * (h0 + h1))) * v[m - 2] - ((h0 + h1) / (h0 * h1)) * v[m - 1] +
                   ((h0 + 2 * h1) / (h1 * (h0 + h1))) * v[m];
        }
        const double hl = t[i] - t[i - 1], hr = t[i + 1] - t[i];
        return (v[i + 1] * hl * hl - v[i - 1] * hr * hr + v[i] * (hr * hr - hl * hl)) /
               (hl * hr * (hl + hr));
    }

    static double d2(const std::vector<double>& t, const std::vector<double>& v, std::size_t i) {
        const std::size_t m = v.size() - 1;
        std::size_t j = std::min(std::max<std::size_t>(i, 1), m - 1);
        const double hl = t[j] - t[j - 1], hr = t[j + 1] - t[j];
        return 2.0 * (v[j - 1] * hr - v[j] * (hl + hr) + v[j + 1] * hl) / (hl * hr * (hl + hr));
    }

    double xp(std::size_t i) const { return d1(theta, x, i); }
    double rhop(std::size_t i) const { return d1(theta, rho, i); }
    double g_meridian(std::size_t i) const {
        const double a = xp(i), b = rhop(i);
        return a * a + b * b;
    }
    double kappa1(std::size_t i) const {
        const double a = xp(i), b = rhop(i);
        const double app = d2(theta, x, i), bpp = d2(theta, rho, i);
        const double g = a * a + b * b;
        return (app * b - bpp * a) / (g * std::sqrt(g));
    }
    double kappa2(std::size_t i) const { return xp(i) / (rho[i] * std::sqrt(g_meridian(i))); }
    double mean_curvature(std::size_t i) const { return kappa1(i) + (n - 1) * kappa2(i); }
    double a_norm2(std::size_t i) const {
        const double k1 = kappa1(i), k2 = kappa2(i);
        return k1 * k1 + (n - 1) * k2 * k2;
    }

    // Mass-lumped quadrature weight: A(S^{n-1}) rho^{n-1} sqrt(g) dtheta.
    double weight(std::size_t i) const {
        const std::size_t m = size() - 1;
        double dth;
        if (i == 0) dth = 0.5 * (theta[1] - theta[0]);
        else if (i == m) dth = 0.5 * (theta[m] - theta[m - 1]);
        else dth = 0.5 * (theta[i + 1] - theta[i - 1]);
        return unit_sphere_area(n - 1) * std::pow(rho[i], n - 1) * std::sqrt(g_meridian(i)) * dth;
    }

    double total_area() const {
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) s += weight(i);
        return s;
    }

    double integrate(const std::vector<double>& field) const {
        if (field.size() != size())
            throw std::invalid_argument("SurfaceOfRevolution::integrate: field size mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) s += field[i] * weight(i);
        return s;
    }

    // |grad v| for a scalar field sampled on theta (v varies along the
    // meridian only).
    double gradient_norm(const std::vector<double>& v, std::size_t i) const {
        return std::abs(d1(theta, v, i)) / std::sqrt(g_meridian(i));
    }

    // Laplace-Beltrami of a meridian field:
    //   (rho^{n-1} sqrt(g))^{-1} d/dtheta ( rho^{n-1} g^{-1/2} dv/dtheta ).
    std::vector<double> laplacian(const std::vector<double>& v) const {
        const std::size_t m = size();
        std::vector<double> flux(m), out(m);
        for (std::size_t i = 0; i < m; ++i)
            flux[i] = std::pow(rho[i], n - 1) / std::sqrt(g_meridian(i)) * d1(theta, v, i);
        for (std::size_t i = 0; i < m; ++i)
            out[i] = d1(theta, flux, i) / (std::pow(rho[i], n - 1) * std::sqrt(g_meridian(i)));
        return out;
    }

    GeometrySnapshot snapshot(double time = 0.0) const {
        GeometrySnapshot snap;
        snap.n = n;
        snap.time = time;
        snap.tolerance = 1e-9;
        snap.points.resize(size());
        std::vector<double> Hfield(size());
        for (std::size_t i = 0; i < size(); ++i) Hfield[i] = mean_curvature(i);
        std::vector<double> lap = laplacian(Hfield);
        for (std::size_t i = 0; i < size(); ++i) {
            SamplePoint& p = snap.points[i];
            const double g = g_meridian(i), r2 = rho[i] * rho[i];
            p.g.assign(n, r2);
            p.h.assign(n, kappa2(i) * r2);
            p.g[0] = g;
            p.h[0] = kappa1(i) * g;
            p.H = Hfield[i];
            p.weight = weight(i);
            p.lap_H = lap[i];
        }
        return snap;
    }

    // Round n-sphere of radius r, poles excluded.
    static SurfaceOfRevolution sphere(int n, double r, std::size_t m = 64) {
        return ellipsoid(n, r, r, m);
    }

    // Ellipsoid of revolution with semi-axis a along the axis, b across.
    static SurfaceOfRevolution ellipsoid(int n, double a, double b, std::size_t m = 64) {
        if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("ellipsoid: semi-axes must be positive");
        if (m < 8) throw std::invalid_argument("ellipsoid: need at least 8 samples");
        SurfaceOfRevolution s;
        s.n = n;
        s.theta.resize(m);
        s.x.resize(m);
        s.rho.resize(m);
        // open parametrization keeping rho > 0
        const double t0 = kPi / (2.0 * static_cast<double>(m));
        for (std::size_t i = 0; i < m; ++i) {
            const double t = t0 + (kPi - 2.0 * t0) * static_cast<double>(i) / static_cast<double>(m - 1);
            s.theta[i] = t;
            s.x[i] = -a * std::cos(t);
            s.rho[i] = b * std::sin(t);
        }
        return s;
    }

    // Straight cylinder of radius r over an axis interval [x0, x1].
    static SurfaceOfRevolution cylinder(int n, double r, double x0, double x1, std::size_t m = 64) {
        if (r <= 0.0 || x1 <= x0) throw std::invalid_argument("cylinder: bad parameters");
        SurfaceOfRevolution s;
        s.n = n;
        s.theta.resize(m);
        s.x.resize(m);
        s.rho.assign(m, r);
        for (std::size_t i = 0; i < m; ++i) {
            const double t = x0 + (x1 - x0) * static_cast<double>(i) / static_cast<double>(m - 1);
            s.theta[i] = t;
            s.x[i] = t;
        }
        return s;
    }
};

// ---------------------------------------------------------------------------
// Evolution-equation residual checks (space-form ambient, where the
// curvature-derivative terms vanish identically).
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t locate_time(const std::vector<GeometrySnapshot>& seq, double t) {
    if (seq.size() < 3)
        throw std::invalid_argument("evolution residual: need at least three snapshots");
    for (std::size_t i = 1; i < seq.size(); ++i)
        if (!(seq[i].time > seq[i - 1].time))
            throw std::invalid_argument("evolution residual: snapshots not time-ordered");
    if (t < seq.front().time || t > seq.back().time)
        throw std::invalid_argument("evolution residual: t outside snapshot range");
    std::size_t best = 1;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < seq.size(); ++i) {
        const double d = std::abs(seq[i].time - t);
        if (d < dist) { dist = d; best = i; }
    }
    return best;
}

} // namespace detail

// Pointwise residual of dH/dt = Lap H + H(|A|^2 + nc), by central time
// differencing around the snapshot closest to t.
inline std::vector<double> evolution_residual_H(const std::vector<GeometrySnapshot>& seq,
                                                double t, const AmbientSpace& amb) {
    const std::size_t k = detail::locate_time(seq, t);
    const GeometrySnapshot& lo = seq[k - 1];
    const GeometrySnapshot& mid = seq[k];
    const GeometrySnapshot& hi = seq[k + 1];
    const double dt2 = hi.time - lo.time;
    std::vector<double> res(mid.points.size());
    for (std::size_t i = 0; i < mid.points.size(); ++i) {
        const double dHdt = (hi.points[i].H - lo.points[i].H) / dt2;
        const auto& p = mid.points[i];
        res[i] = std::abs(dHdt - p.lap_H - p.H * (p.a_norm2() + amb.ricci_normal()));
    }
    return res;
}

// Pointwise residual of dg_ij/dt = -2 H h_ij, maximized over the diagonal
// coefficients.
inline std::vector<double> evolution_residual_metric(const std::vector<GeometrySnapshot>& seq,
                                                     double t) {
    const std::size_t k = detail::locate_time(seq, t);
    const GeometrySnapshot& lo = seq[k - 1];
    const GeometrySnapshot& mid = seq[k];
    const GeometrySnapshot& hi = seq[k + 1];
    const double dt2 = hi.time - lo.time;
    std::vector<double> res(mid.points.size(), 0.0);
    for (std::size_t i = 0; i < mid.points.size(); ++i) {
        const auto& p = mid.points[i];
        for (std::size_t j = 0; j < p.g.size(); ++j) {
            const double dgdt = (hi.points[i].g[j] - lo.points[i].g[j]) / dt2;
            res[i] = std::max(res[i], std::abs(dgdt + 2.0 * p.H * p.h[j]));
        }
    }
    return res;
}

// Pinching ratio f0 = |A|^2 / H^2; refuses vanishing H.
inline std::vector<double> pinching_ratio(const GeometrySnapshot& snap) {
    std::vector<double> f0(snap.points.size());
    for (std::size_t i = 0; i < snap.points.size(); ++i) {
        const double H = snap.points[i].H;
        if (H == 0.0)
            throw std::domain_error("pinching_ratio: H vanishes at sample point " + std::to_string(i));
        f0[i] = snap.points[i].a_norm2() / (H * H);
    }
    return f0;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace mcflab

#endif // MCFLAB_SNAPSHOT_HPP
