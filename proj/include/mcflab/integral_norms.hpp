#ifndef MCFLAB_INTEGRAL_NORMS_HPP
#define MCFLAB_INTEGRAL_NORMS_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mcflab/exact_solutions.hpp"
#include "mcflab/quadrature.hpp"
#include "mcflab/snapshot.hpp"

namespace mcflab {

// Accumulated space-time data for || H ||_{alpha, M x [0, t_horizon]}.
struct NormTrace {
    double alpha = 2.0;
    std::vector<std::pair<double, double>> samples;  // (t, int_M |H|^alpha dmu)
    double accumulated = 0.0;                        // int_0^{t_horizon} of the above
    double t_horizon = 0.0;

    double norm() const { return std::pow(accumulated, 1.0 / alpha); }

    void validate() const {
        for (std::size_t i = 1; i < samples.size(); ++i)
            if (!(samples[i].first > samples[i - 1].first))
                throw std::invalid_argument("NormTrace: samples not strictly increasing in t");
        if (accumulated < 0.0) throw std::invalid_argument("NormTrace: negative accumulation");
    }
};

// Space-time norm of an exact sphere flow up to t_end < T. The inner space
// integral is H(t)^alpha V(t); the time integral uses adaptive quadrature.
inline NormTrace spacetime_norm(const ExactSphereFlow& flow, double alpha, double t_end,
                                std::size_t sample_count = 129, double rel_tol = 1e-9) {
    if (alpha < 1.0) throw std::invalid_argument("spacetime_norm: alpha must be >= 1");
    if (t_end < 0.0 || t_end >= flow.T())
        throw ExistenceTimeExceeded(flow.T());
    NormTrace trace;
    trace.alpha = alpha;
    trace.t_horizon = t_end;
    if (t_end == 0.0) return trace;
    trace.accumulated = integrate_adaptive(
        [&](double t) { return flow.inner_integral(t, alpha); }, 0.0, t_end, rel_tol);
    trace.samples.reserve(sample_count);
    for (std::size_t i = 0; i < sample_count; ++i) {
        const double t = t_end * static_cast<double>(i) / static_cast<double>(sample_count - 1);
        trace.samples.emplace_back(t, flow.inner_integral(t, alpha));
    }
    return trace;
}

// Stream variant: trapezoidal in t over the snapshots' discrete measures.
inline NormTrace spacetime_norm(const std::vector<GeometrySnapshot>& stream, double alpha) {
    if (alpha < 1.0) throw std::invalid_argument("spacetime_norm: alpha must be >= 1");
    if (stream.empty()) throw std::invalid_argument("spacetime_norm: empty snapshot stream");
    NormTrace trace;
    trace.alpha = alpha;
    trace.t_horizon = stream.back().time;
    for (const auto& snap : stream) {
        double inner = 0.0;
        for (const auto& p : snap.points) inner += std::pow(std::abs(p.H), alpha) * p.weight;
        if (!trace.samples.empty() && !(snap.time > trace.samples.back().first))
            throw std::invalid_argument("spacetime_norm: stream not time-ordered");
        trace.samples.emplace_back(snap.time, inner);
    }
    for (std::size_t i = 1; i < trace.samples.size(); ++i)
        trace.accumulated += 0.5 * (trace.samples[i].second + trace.samples[i - 1].second) *
                             (trace.samples[i].first - trace.samples[i - 1].first);
    return trace;
}

// Same, from precomputed (t, inner integral) pairs (e.g. a profile-flow
// history).
inline NormTrace spacetime_norm(const std::vector<std::pair<double, double>>& inner_samples,
                                double alpha) {
    NormTrace trace;
    trace.alpha = alpha;
    trace.samples = inner_samples;
    trace.validate();
    if (!inner_samples.empty()) trace.t_horizon = inner_samples.back().first;
    for (std::size_t i = 1; i < trace.samples.size(); ++i)
        trace.accumulated += 0.5 * (trace.samples[i].second + trace.samples[i - 1].second) *
                             (trace.samples[i].first - trace.samples[i - 1].first);
    return trace;
}

struct DivergenceVerdict {
    enum class Class { finite, divergent, inconclusive };
    Class classification = Class::inconclusive;
    // growth exponent q of the inner integral: int_M |H|^alpha dmu ~ (T-t)^q
    double fitted_exponent = 0.0;
    // finite case: extrapolated norm limit; divergent case: q (the rate)
    double fitted_limit_or_rate = 0.0;
    double confidence = 0.0;  // max |residual| of the log-log fit
};

inline const char* to_string(DivergenceVerdict::Class c) {
    switch (c) {
        case DivergenceVerdict::Class::finite: return "finite";
        case DivergenceVerdict::Class::divergent: return "divergent";
        default: return "inconclusive";
    }
}

// The inner integral is integrable up to T iff its growth exponent q in
// (T - t)^q exceeds -1; the sharp case alpha = n+2 has q = -1 exactly.
// Exponents are classified against the midpoint between -1 and the nearest
// sub-sharp exponent -1/2.
inline constexpr double kDivergenceExponentThreshold = -0.75;
inline constexpr double kFitResidualThreshold = 0.25;

inline std::vector<double> dyadic_horizons(double T, double eps0 = 0.0, int levels = 8) {
    if (levels < 3) throw std::invalid_argument("dyadic_horizons: need >= 3 levels");
    if (eps0 <= 0.0) eps0 = T / 4.0;
    std::vector<double> eps(levels);
    for (int k = 0; k < levels; ++k) eps[k] = eps0 * std::pow(2.0, -k);
    return eps;
}

// Classify || H ||_{alpha, M x [0,T)} as finite or divergent from dyadic
// horizons T - eps_k, via a log-log fit of the inner integral against eps.
inline DivergenceVerdict classify_divergence(const ExactSphereFlow& flow, double alpha,
                                             const std::vector<double>& horizons) {
    if (horizons.size() < 3)
        throw std::invalid_argument("classify_divergence: need >= 3 horizons");
    for (std::size_t k = 1; k < horizons.size(); ++k)
        if (!(horizons[k] < horizons[k - 1]))
            throw std::invalid_argument("classify_divergence: horizons must decrease");
    if (!(horizons.front() < flow.T()) || !(horizons.back() > 0.0))
        throw std::invalid_argument("classify_divergence: horizons out of range");

    std::vector<double> log_eps, log_inner;
    for (double eps : horizons) {
        log_eps.push_back(std::log(eps));
        log_inner.push_back(std::log(flow.inner_integral(flow.T() - eps, alpha)));
    }
    const LineFit fit = fit_line(log_eps, log_inner);

    DivergenceVerdict v;
    v.fitted_exponent = fit.slope;
    v.confidence = fit.max_residual;
    if (fit.max_residual > kFitResidualThreshold) {
        v.classification = DivergenceVerdict::Class::inconclusive;
        return v;
    }
    if (fit.slope <= kDivergenceExponentThreshold) {
        v.classification = DivergenceVerdict::Class::divergent;
        v.fitted_limit_or_rate = fit.slope;
        return v;
    }
    v.classification = DivergenceVerdict::Class::finite;
    // limit = accumulated up to the finest horizon plus the fitted power tail
    const double eps_min = horizons.back();
    const double accumulated = spacetime_norm(flow, alpha, flow.T() - eps_min).accumulated;
    const double tail = flow.inner_integral(flow.T() - eps_min, alpha) * eps_min / (fit.slope + 1.0);
    v.fitted_limit_or_rate = std::pow(accumulated + tail, 1.0 / alpha);
    return v;
}

// Stream-mode classification for numerical flows: (t, inner integral) samples
// plus a singular-time estimate from detect_singularity.
inline DivergenceVerdict classify_divergence(const std::vector<std::pair<double, double>>& samples,
                                             double t_sing, const std::vector<double>& horizons) {
    if (horizons.size() < 3)
        throw std::invalid_argument("classify_divergence: need >= 3 horizons");
    std::vector<double> log_eps, log_inner;
    for (double eps : horizons) {
        const double t = t_sing - eps;
        // nearest recorded sample at or before t
        const std::pair<double, double>* best = nullptr;
        for (const auto& s : samples)
            if (s.first <= t) best = &s;
        if (!best || best->second <= 0.0) continue;
        const double le = std::log(t_sing - best->first);
        // coarse sampling can map several horizons to the same snapshot
        if (!log_eps.empty() && le == log_eps.back()) continue;
        log_eps.push_back(le);
        log_inner.push_back(std::log(best->second));
    }
    DivergenceVerdict v;
    if (log_eps.size() < 3) return v;  // inconclusive
    const LineFit fit = fit_line(log_eps, log_inner);
    v.fitted_exponent = fit.slope;
    v.confidence = fit.max_residual;
    if (fit.max_residual > kFitResidualThreshold) return v;
    v.classification = fit.slope <= kDivergenceExponentThreshold
                           ? DivergenceVerdict::Class::divergent
                           : DivergenceVerdict::Class::finite;
    v.fitted_limit_or_rate = fit.slope;
    return v;
}

struct HolderRecord {
    double lhs_norm = 0.0;        // || H ||_{n+2}
    double rhs_bound = 0.0;       // || H ||_alpha * vol^{1/(n+2) - 1/alpha}
    double spacetime_volume = 0.0;
    double slack_ratio = 0.0;     // rhs / lhs
    bool holds = false;
};

// Numerical verification of the Hoelder reduction: for alpha > n+2,
// || H ||_{n+2} <= || H ||_alpha * vol(M x [0,t_end])^{1/(n+2) - 1/alpha}.
inline HolderRecord holder_reduction_check(const ExactSphereFlow& flow, double alpha,
                                           double t_end, double quad_tol = 1e-10) {
    const int n = flow.n();
    if (!(alpha > n + 2))
        throw std::invalid_argument("holder_reduction_check: need alpha > n + 2");
    HolderRecord rec;
    rec.lhs_norm = spacetime_norm(flow, static_cast<double>(n + 2), t_end).norm();
    const double alpha_norm = spacetime_norm(flow, alpha, t_end).norm();
    rec.spacetime_volume =
        integrate_adaptive([&](double t) { return flow.volume(t); }, 0.0, t_end, quad_tol);
    rec.rhs_bound = alpha_norm * std::pow(rec.spacetime_volume,
                                          1.0 / (n + 2.0) - 1.0 / alpha);
    rec.slack_ratio = rec.rhs_bound / rec.lhs_norm;
    rec.holds = rec.lhs_norm <= rec.rhs_bound * (1.0 + 1e-12);
    return rec;
}

// Stream variant over discrete snapshots.
inline HolderRecord holder_reduction_check(const std::vector<GeometrySnapshot>& stream,
                                           int n, double alpha) {
    if (!(alpha > n + 2))
        throw std::invalid_argument("holder_reduction_check: need alpha > n + 2");
    HolderRecord rec;
    rec.lhs_norm = spacetime_norm(stream, static_cast<double>(n + 2)).norm();
    const double alpha_norm = spacetime_norm(stream, alpha).norm();
    std::vector<std::pair<double, double>> vols;
    for (const auto& s : stream) vols.emplace_back(s.time, s.total_measure());
    for (std::size_t i = 1; i < vols.size(); ++i)
        rec.spacetime_volume +=
            0.5 * (vols[i].second + vols[i - 1].second) * (vols[i].first - vols[i - 1].first);
    rec.rhs_bound = alpha_norm * std::pow(rec.spacetime_volume, 1.0 / (n + 2.0) - 1.0 / alpha);
    rec.slack_ratio = rec.rhs_bound / rec.lhs_norm;
    rec.holds = rec.lhs_norm <= rec.rhs_bound * (1.0 + 1e-9);
    return rec;
}

} // namespace mcflab

#endif // MCFLAB_INTEGRAL_NORMS_HPP
