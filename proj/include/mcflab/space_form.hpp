#ifndef MCFLAB_SPACE_FORM_HPP
#define MCFLAB_SPACE_FORM_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mcflab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
    if (n < 1) throw std::invalid_argument("unit_ball_volume: n must be >= 1");
    return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// Area of the unit n-sphere S^n embedded in R^{n+1}.
inline double unit_sphere_area(int n) {
    if (n < 1) throw std::invalid_argument("unit_sphere_area: n must be >= 1");
    return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

// Generalized trigonometric functions of a space form with curvature c.
// sin_c solves y'' + c y = 0, y(0)=0, y'(0)=1; cot_c = cos_c / sin_c.
inline double sin_c(int c, double r) {
    switch (c) {
        case 1:  return std::sin(r);
        case 0:  return r;
        case -1: return std::sinh(r);
        default: throw std::invalid_argument("sin_c: c must be -1, 0 or +1");
    }
}

inline double cos_c(int c, double r) {
    switch (c) {
        case 1:  return std::cos(r);
        case 0:  return 1.0;
        case -1: return std::cosh(r);
        default: throw std::invalid_argument("cos_c: c must be -1, 0 or +1");
    }
}

inline double cot_c(int c, double r) {
    if (r <= 0.0) throw std::domain_error("cot_c: r must be positive");
    switch (c) {
        case 1:  return std::cos(r) / std::sin(r);
        case 0:  return 1.0 / r;
        case -1: return std::cosh(r) / std::sinh(r);
        default: throw std::invalid_argument("cot_c: c must be -1, 0 or +1");
    }
}

// Inverse of cot_c on (0, pi) for c=+1, (0, inf) otherwise.
// For c=-1 the argument must exceed 1.
inline double arccot_c(int c, double v) {
    switch (c) {
        case 1:  return std::atan2(1.0, v);
        case 0:
            if (v <= 0.0) throw std::domain_error("arccot_c: need v > 0 for c = 0");
            return 1.0 / v;
        case -1:
            if (v <= 1.0) throw std::domain_error("arccot_c: need v > 1 for c = -1");
            return std::atanh(1.0 / v);
        default: throw std::invalid_argument("arccot_c: c must be -1, 0 or +1");
    }
}

// Ambient space form F^{n+1}(c) together with the curvature bounds
// -K1 <= K_N <= K2 and the injectivity radius lower bound i_N.
struct AmbientSpace {
    int n = 3;        // intrinsic dimension of the hypersurface
    int c = 0;        // constant sectional curvature, one of -1, 0, +1
    double K1 = 0.0;  // |lower| curvature bound, K_N >= -K1
    double K2 = 0.0;  // upper curvature bound, K_N <= K2
    double iN = std::numeric_limits<double>::infinity();

    static AmbientSpace space_form(int n, int c) {
        if (n < 3) throw std::invalid_argument("AmbientSpace: n must be >= 3");
        if (c != -1 && c != 0 && c != 1)
            throw std::invalid_argument("AmbientSpace: c must be -1, 0 or +1");
        AmbientSpace a;
        a.n = n;
        a.c = c;
        a.K1 = std::max(0.0, static_cast<double>(-c));
        a.K2 = std::max(0.0, static_cast<double>(c));
        a.iN = (c == 1) ? kPi : std::numeric_limits<double>::infinity();
        return a;
    }

    void validate() const {
        if (n < 3) throw std::invalid_argument("AmbientSpace: n must be >= 3");
        if (K1 < 0.0 || K2 < 0.0)
            throw std::invalid_argument("AmbientSpace: curvature bounds must be nonnegative");
        if (iN <= 0.0)
            throw std::invalid_argument("AmbientSpace: injectivity radius must be positive");
        if (static_cast<double>(c) < -K1 || static_cast<double>(c) > K2)
            throw std::invalid_argument("AmbientSpace: need -K1 <= c <= K2");
    }

    // Ricci curvature of the ambient in the normal direction: nc in a space form.
    double ricci_normal() const { return static_cast<double>(n) * c; }
};

} // namespace mcflab

#endif // MCFLAB_SPACE_FORM_HPP
