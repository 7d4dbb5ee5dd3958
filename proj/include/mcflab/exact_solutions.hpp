#ifndef MCFLAB_EXACT_SOLUTIONS_HPP
#define MCFLAB_EXACT_SOLUTIONS_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "mcflab/snapshot.hpp"
#include "mcflab/space_form.hpp"

namespace mcflab {

struct ExistenceTimeExceeded : std::domain_error {
    double T;
    explicit ExistenceTimeExceeded(double T_)
        : std::domain_error("time at or beyond maximal existence time T = " + std::to_string(T_)),
          T(T_) {}
};

// Closed-form shrinking geodesic-sphere solution of mean curvature flow in a
// space form, valid on [0, T).
//
//   c = 0:   r(t) = sqrt(r0^2 - 2nt),  H(t) = n / r(t),  T = r0^2 / (2n)
//   c = +-1: H(t) = sqrt( n^2 c d e^{2nct} / (1 - d e^{2nct}) ),
//            d = H0^2 / (H0^2 + n^2 c),
//            T = -ln(d)/(2n) for c = +1, T = ln(d)/(2n) for c = -1.
//
// The geodesic radius is always rho(t) = arccot_c(H(t)/n); the scaled radius
// r(t) = r0 sqrt(H0^2 + n^2 c) / sqrt(H(t)^2 + n^2 c) is kept for reporting.
class ExactSphereFlow {
public:
    AmbientSpace ambient;
    double H0 = 0.0;  // initial mean curvature
    double r0 = 0.0;  // initial (geodesic) radius
    double V0 = 0.0;  // initial total area
    std::optional<double> d;  // absent for c = 0

    static ExactSphereFlow euclidean(int n, double r0) {
        if (n < 3) throw std::invalid_argument("euclidean_sphere_flow: n must be >= 3");
        if (r0 <= 0.0) throw std::invalid_argument("euclidean_sphere_flow: r0 must be positive");
        ExactSphereFlow f;
        f.ambient = AmbientSpace::space_form(n, 0);
        f.r0 = r0;
        f.H0 = n / r0;
        f.V0 = unit_sphere_area(n) * std::pow(r0, n);
        f.T_ = r0 * r0 / (2.0 * n);
        return f;
    }

    static ExactSphereFlow space_form(int n, int c, double H0) {
        if (c == 0) {
            if (H0 <= 0.0) throw std::invalid_argument("spaceform_sphere_flow: H0 must be positive");
            return euclidean(n, n / H0);
        }
        if (c != 1 && c != -1)
            throw std::invalid_argument("spaceform_sphere_flow: c must be -1, 0 or +1");
        if (c == 1 && H0 <= 0.0)
            throw std::invalid_argument("spaceform_sphere_flow: need H0 > 0 for c = +1");
        if (c == -1 && H0 * H0 <= static_cast<double>(n) * n)
            throw std::invalid_argument("spaceform_sphere_flow: need H0^2 > n^2 for c = -1");
        ExactSphereFlow f;
        f.ambient = AmbientSpace::space_form(n, c);
        f.H0 = H0;
        f.d = H0 * H0 / (H0 * H0 + static_cast<double>(n) * n * c);
        f.T_ = (c == 1) ? -std::log(*f.d) / (2.0 * n) : std::log(*f.d) / (2.0 * n);
        f.r0 = arccot_c(c, H0 / n);
        f.V0 = unit_sphere_area(n) * std::pow(sin_c(c, f.r0), n);
        return f;
    }

    double T() const { return T_; }
    int n() const { return ambient.n; }
    int c() const { return ambient.c; }

    double H(double t) const {
        require_in_range(t);
        const int nn = ambient.n;
        if (ambient.c == 0) return nn / std::sqrt(r0 * r0 - 2.0 * nn * t);
        const double e = *d * std::exp(2.0 * nn * ambient.c * t);
        return std::sqrt(static_cast<double>(nn) * nn * ambient.c * e / (1.0 - e));
    }

    // dH/dt along the flow; differentiating the closed forms gives
    // H' = H (H^2/n + nc) in all three ambients.
    double dHdt(double t) const {
        const double h = H(t);
        return h * (h * h / ambient.n + ambient.ricci_normal());
    }

    // Geodesic radius rho(t) with H = n cot_c(rho).
    double geodesic_radius(double t) const { return arccot_c(ambient.c, H(t) / ambient.n); }

    // The scaled radius of the Example: r0 sqrt(H0^2+n^2c)/sqrt(H^2+n^2c).
    double radius_scaled(double t) const {
        const double nn = ambient.n;
        return r0 * std::sqrt(H0 * H0 + nn * nn * ambient.c) /
               std::sqrt(H(t) * H(t) + nn * nn * ambient.c);
    }

    double volume(double t) const {
        const double nn = ambient.n;
        if (ambient.c == 0) return V0 * std::pow(H0 / H(t), nn);
        return V0 * std::pow((H0 * H0 + nn * nn * ambient.c) / (H(t) * H(t) + nn * nn * ambient.c),
                             0.5 * nn);
    }

    // Space integral of |H|^alpha at time t (H is spatially constant).
    double inner_integral(double t, double alpha) const {
        return std::pow(std::abs(H(t)), alpha) * volume(t);
    }

    // First time with H(t)^2 >= M; exists for every M >= H0^2.
    double time_reaching_H2(double M) const {
        if (M <= H0 * H0) return 0.0;
        const int nn = ambient.n;
        if (ambient.c == 0) return (r0 * r0 - nn * nn / M) / (2.0 * nn);
        // invert H^2 = n^2 c e / (1 - e), e = d exp(2nct)
        const double e = M / (M + static_cast<double>(nn) * nn * ambient.c);
        return std::log(e / *d) / (2.0 * nn * ambient.c);
    }

    GeometrySnapshot snapshot_at(double t, std::size_t num_points = 32) const {
        if (t >= T_) throw ExistenceTimeExceeded(T_);
        if (t < 0.0) throw std::invalid_argument("snapshot_at: t must be nonnegative");
        GeometrySnapshot snap = umbilic_sphere_geometry(ambient, geodesic_radius(t), num_points);
        snap.time = t;
        return snap;
    }

private:
    double T_ = 0.0;

    void require_in_range(double t) const {
        if (t < 0.0 || t >= T_) throw ExistenceTimeExceeded(T_);
    }
};

inline ExactSphereFlow euclidean_sphere_flow(int n, double r0) {
    return ExactSphereFlow::euclidean(n, r0);
}

inline ExactSphereFlow spaceform_sphere_flow(int n, int c, double H0) {
    return ExactSphereFlow::space_form(n, c, H0);
}

} // namespace mcflab

#endif // MCFLAB_EXACT_SOLUTIONS_HPP
