#ifndef MCFLAB_SOBOLEV_HPP
#define MCFLAB_SOBOLEV_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mcflab/snapshot.hpp"
#include "mcflab/space_form.hpp"

namespace mcflab {

// Constants of the Michael-Simon-type Sobolev inequality:
//   C(n, a) = (1/2) pi 2^{n-2} a^{-1} (1-a)^{-1/n} (n/(n-1)) omega_n^{-1/n},
// with the pi/2 factor omitted when the curvature bound b is imaginary.
// The free parameter a lives in (0, 1) and is unrelated to the norm exponent
// alpha of the space-time norms.
struct SobolevConstants {
    int n = 3;
    double alpha_free = 0.75;
    bool b_real = true;

    SobolevConstants(int n_, double alpha_free_, bool b_real_ = true)
        : n(n_), alpha_free(alpha_free_), b_real(b_real_) {
        if (n < 2) throw std::invalid_argument("SobolevConstants: n must be >= 2");
        if (!(alpha_free > 0.0 && alpha_free < 1.0))
            throw std::invalid_argument("SobolevConstants: free parameter must be in (0, 1)");
    }

    // Canonical normalization: C(n) = C(n, n/(n+1)).
    static SobolevConstants canonical(int n, bool b_real = true) {
        return SobolevConstants(n, static_cast<double>(n) / (n + 1.0), b_real);
    }

    double omega_n() const { return unit_ball_volume(n); }

    double C() const {
        const double base = std::pow(2.0, n - 2) / alpha_free *
                            std::pow(1.0 - alpha_free, -1.0 / n) *
                            (static_cast<double>(n) / (n - 1.0)) *
                            std::pow(omega_n(), -1.0 / n);
        return b_real ? 0.5 * kPi * base : base;
    }
};

// A nonnegative C^1 test function sampled on a surface of revolution.
struct TestFunction {
    std::vector<double> values;
    std::vector<double> gradient_norm;
    double support_volume = 0.0;

    void validate(double total_measure) const {
        for (double v : values)
            if (v < 0.0) throw std::invalid_argument("TestFunction: values must be nonnegative");
        if (support_volume > total_measure * (1.0 + 1e-12))
            throw std::invalid_argument("TestFunction: support volume exceeds total measure");
    }
};

// Sample a function of the axis coordinate onto a surface of revolution; the
// discrete gradient is the piecewise-linear meridian derivative.
inline TestFunction make_test_function(const SurfaceOfRevolution& surf,
                                       const std::function<double(double)>& h_of_x) {
    TestFunction f;
    const std::size_t m = surf.size();
    f.values.resize(m);
    f.gradient_norm.resize(m);
    for (std::size_t i = 0; i < m; ++i) f.values[i] = h_of_x(surf.x[i]);
    for (std::size_t i = 0; i < m; ++i) {
        f.gradient_norm[i] = surf.gradient_norm(f.values, i);
        if (f.values[i] > 0.0) f.support_volume += surf.weight(i);
    }
    f.validate(surf.total_area());
    return f;
}

struct AdmissibilityResult {
    bool pass = false;
    double cond1_lhs = 0.0;   // must be <= 1
    double margin1 = 0.0;     // 1 - cond1_lhs
    double rho0 = 0.0;        // admissible geodesic radius (case split on b real/imaginary)
    double margin2 = 0.0;     // iN - 2 rho0 (infinite when iN = inf)
    bool cond2_vacuous = false;
    bool arcsine_domain_ok = true;
    bool failed_condition1 = false;
    bool failed_condition2 = false;
};

// Admissibility of a support volume for the Sobolev inequalities, with
// b^2 = K2 (b imaginary when K2 = 0, which drops the arcsine).
inline AdmissibilityResult admissibility(const AmbientSpace& amb, double support_volume,
                                         const SobolevConstants& constants) {
    if (amb.K2 < 0.0) throw std::invalid_argument("admissibility: K2 must be nonnegative");
    if (support_volume <= 0.0)
        throw std::invalid_argument("admissibility: support volume must be positive");
    AdmissibilityResult r;
    const double wn = constants.omega_n();
    const double vol_ratio = std::pow(support_volume / wn, 1.0 / constants.n);
    const double size = std::pow(1.0 - constants.alpha_free, -1.0 / constants.n) * vol_ratio;

    r.cond1_lhs = amb.K2 * size * size;
    r.margin1 = 1.0 - r.cond1_lhs;
    r.failed_condition1 = r.cond1_lhs > 1.0;

    if (amb.K2 > 0.0) {
        const double arg = std::sqrt(amb.K2) * size;
        if (arg > 1.0) {
            // arcsine leaves its domain: the radius rho0 is undefined
            r.arcsine_domain_ok = false;
            r.failed_condition2 = true;
            r.pass = false;
            return r;
        }
        r.rho0 = std::asin(arg) / std::sqrt(amb.K2);
    } else {
        r.rho0 = size;  // imaginary b
    }
    if (std::isinf(amb.iN)) {
        r.cond2_vacuous = true;
        r.margin2 = std::numeric_limits<double>::infinity();
    } else {
        r.margin2 = amb.iN - 2.0 * r.rho0;
        r.failed_condition2 = r.margin2 < 0.0;
    }
    r.pass = !r.failed_condition1 && !r.failed_condition2;
    return r;
}

struct InequalityRecord {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    bool holds = false;
};

// Michael-Simon check:
//   ( int h^{n/(n-1)} )^{(n-1)/n}  <=  C(n, a) int ( |grad h| + h |H| ).
// Refuses to certify when admissibility fails.
inline InequalityRecord michael_simon_check(const SurfaceOfRevolution& surf,
                                            const TestFunction& h,
                                            const SobolevConstants& constants,
                                            const AmbientSpace& amb,
                                            double rel_tolerance = 0.0) {
    InequalityRecord rec;
    const std::size_t m = surf.size();
    if (h.values.size() != m)
        throw std::invalid_argument("michael_simon_check: test function size mismatch");
    bool all_zero = true;
    for (double v : h.values) all_zero = all_zero && v == 0.0;
    if (!all_zero) {
        const AdmissibilityResult adm = admissibility(amb, h.support_volume, constants);
        if (!adm.pass)
            throw std::domain_error("michael_simon_check: admissibility conditions fail");
    }
    const double n = constants.n;
    double lhs_int = 0.0, rhs_int = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = surf.weight(i);
        lhs_int += std::pow(h.values[i], n / (n - 1.0)) * w;
        rhs_int += (h.gradient_norm[i] +
                    h.values[i] * std::abs(surf.mean_curvature(i))) * w;
    }
    rec.lhs = std::pow(lhs_int, (n - 1.0) / n);
    rec.rhs = constants.C() * rhs_int;
    rec.slack = rec.rhs - rec.lhs;
    rec.holds = rec.slack >= -rel_tolerance * std::max(rec.rhs, 1e-300);
    return rec;
}

struct GradientBoundRecord {
    InequalityRecord main;      // grad-norm lower bound form
    double H0 = 0.0;            // max H over the snapshot
    double chain_residual = 0.0;  // substitution-chain reproduction error
    InequalityRecord intermediate;  // the g = f^{2(n-1)/(n-2)} display
};

// Gradient lower bound check:
//   ||grad f||_2^2 >= (n-2)^2 / (4 (n-1)^2 (1+t)) *
//       [ C(n)^{-2} ||f||_{2n/(n-2)}^2 - H0^2 (1 + 1/t) ||f||_2^2 ].
// Also re-derives the intermediate display obtained by substituting
// g = f^{2(n-1)/(n-2)} into the Michael-Simon inequality and verifies the
// substitution chain on the discrete data.
inline GradientBoundRecord gradient_lower_bound_check(const SurfaceOfRevolution& surf, const TestFunction& f,
                                   double t_free, const SobolevConstants& constants,
                                   const AmbientSpace& amb, double rel_tolerance = 0.0) {
    const int n = constants.n;
    if (n < 3) throw std::invalid_argument("gradient_lower_bound_check: n must be >= 3");
    if (t_free <= 0.0) throw std::invalid_argument("gradient_lower_bound_check: t must be positive");
    if (f.values.size() != surf.size())
        throw std::invalid_argument("gradient_lower_bound_check: test function size mismatch");
    bool all_zero = true;
    for (double v : f.values) all_zero = all_zero && v == 0.0;
    if (!all_zero) {
        const AdmissibilityResult adm = admissibility(amb, f.support_volume, constants);
        if (!adm.pass) throw std::domain_error("gradient_lower_bound_check: admissibility conditions fail");
    }

    GradientBoundRecord rec;
    const double Cn = constants.C();
    const double p_crit = 2.0 * n / (n - 2.0);
    double grad2 = 0.0, f2 = 0.0, fcrit = 0.0;
    for (std::size_t i = 0; i < surf.size(); ++i) {
        const double w = surf.weight(i);
        grad2 += f.gradient_norm[i] * f.gradient_norm[i] * w;
        f2 += f.values[i] * f.values[i] * w;
        fcrit += std::pow(f.values[i], p_crit) * w;
        rec.H0 = std::max(rec.H0, surf.mean_curvature(i));
    }
    const double f_crit_norm2 = std::pow(fcrit, 2.0 / p_crit);
    const double prefactor = (n - 2.0) * (n - 2.0) /
                             (4.0 * (n - 1.0) * (n - 1.0) * (1.0 + t_free));
    rec.main.lhs = grad2;
    rec.main.rhs = prefactor * (f_crit_norm2 / (Cn * Cn) -
                                rec.H0 * rec.H0 * (1.0 + 1.0 / t_free) * f2);
    // lower-bound form: holds when lhs >= rhs
    rec.main.slack = rec.main.lhs - rec.main.rhs;
    rec.main.holds = rec.main.slack >= -rel_tolerance * std::max(std::abs(rec.main.rhs), 1e-300);

    // substitution chain: g = f^{2(n-1)/(n-2)} into the Michael-Simon form
    // gives ( int f^{2n/(n-2)} )^{(n-1)/n}
    //   <= (2(n-1)/(n-2)) C(n) int f^{n/(n-2)} |grad f| + C(n) int H f^{2(n-1)/(n-2)}
    const double expo = 2.0 * (n - 1.0) / (n - 2.0);
    TestFunction g;
    g.values.resize(surf.size());
    g.gradient_norm.resize(surf.size());
    double direct_rhs = 0.0;
    for (std::size_t i = 0; i < surf.size(); ++i) {
        g.values[i] = std::pow(f.values[i], expo);
        // chain rule on the PL gradient
        g.gradient_norm[i] = expo * std::pow(f.values[i], expo - 1.0) * f.gradient_norm[i];
        if (g.values[i] > 0.0) g.support_volume += surf.weight(i);
        direct_rhs += (expo * std::pow(f.values[i], n / (n - 2.0)) * f.gradient_norm[i] +
                       std::abs(surf.mean_curvature(i)) * g.values[i]) * surf.weight(i);
    }
    double g_lhs_int = 0.0, g_rhs_int = 0.0;
    for (std::size_t i = 0; i < surf.size(); ++i) {
        const double w = surf.weight(i);
        g_lhs_int += std::pow(g.values[i], n / (n - 1.0)) * w;
        g_rhs_int += (g.gradient_norm[i] +
                      g.values[i] * std::abs(surf.mean_curvature(i))) * w;
    }
    rec.intermediate.lhs = std::pow(g_lhs_int, (n - 1.0) / n);
    rec.intermediate.rhs = Cn * g_rhs_int;
    rec.intermediate.slack = rec.intermediate.rhs - rec.intermediate.lhs;
    rec.intermediate.holds = rec.intermediate.slack >= -rel_tolerance * rec.intermediate.rhs;
    rec.chain_residual = std::abs(g_rhs_int - direct_rhs) /
                         std::max(std::abs(g_rhs_int), 1e-300);
    return rec;
}

} // namespace mcflab

#endif // MCFLAB_SOBOLEV_HPP
