#ifndef MCFLAB_RESCALE_HPP
#define MCFLAB_RESCALE_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcflab/exact_solutions.hpp"
#include "mcflab/integral_norms.hpp"
#include "mcflab/profile_flow.hpp"
#include "mcflab/space_form.hpp"

namespace mcflab {

// Parabolic rescaling about (x_i, t_i) with Q = H^2(x_i, t_i): lengths scale
// by sqrt(Q), curvatures by 1/sqrt(Q), and time by s -> (s - 1)/Q + t_i, so
// the rescaled window s in [0, 1] covers base times [t_i - 1/Q, t_i].
class RescaledFlow {
public:
    ExactSphereFlow base;
    double Q = 1.0;
    double t_center = 0.0;

    RescaledFlow(const ExactSphereFlow& base_, double Q_, double t_center_)
        : base(base_), Q(Q_), t_center(t_center_) {
        if (Q <= 0.0) throw std::invalid_argument("RescaledFlow: Q must be positive");
    }

    double base_time(double s) const { return (s - 1.0) / Q + t_center; }

    double H(double s) const { return base.H(base_time(s)) / std::sqrt(Q); }
    double H2(double s) const { const double h = H(s); return h * h; }

    // Umbilic spheres have all principal curvatures H/n.
    double min_principal(double s) const { return H(s) / base.n(); }

    double volume(double s) const {
        return base.volume(base_time(s)) * std::pow(Q, 0.5 * base.n());
    }

    // max over a uniform s-grid of [0, 1]; 1 + normalization error for exact
    // flows (H^2 is increasing, so the max sits at s = 1).
    double max_H2_on_window(std::size_t grid = 65) const {
        double m = 0.0;
        for (std::size_t i = 0; i < grid; ++i)
            m = std::max(m, H2(static_cast<double>(i) / static_cast<double>(grid - 1)));
        return m;
    }
};

struct RescaleResult {
    std::optional<RescaledFlow> flow;
    // Q < 1 or Q t_i < 1: the normalization needs a later base time.
    bool needs_later_time = false;
    double Q = 0.0;
};

inline RescaleResult rescale(const ExactSphereFlow& flow, double t_i) {
    if (t_i < 0.0 || t_i >= flow.T()) throw ExistenceTimeExceeded(flow.T());
    RescaleResult out;
    const double h = flow.H(t_i);
    out.Q = h * h;
    if (out.Q < 1.0 || out.Q * t_i < 1.0) {
        out.needs_later_time = true;
        return out;
    }
    out.flow.emplace(flow, out.Q, t_i);
    return out;
}

struct BlowupPoint {
    std::size_t x_index = 0;  // spatial maximizer (0 for spatially constant H)
    double location = 0.0;    // axis coordinate for profile flows
    double t = 0.0;           // temporal maximizer within [0, t^(i)]
    double Q = 0.0;           // max of H^2 over M x [0, t^(i)]
};

// Space-time maximizers of H^2 up to each requested time. Exact flows have
// spatially constant, strictly increasing H, so t_i = t^(i) and Q = H^2(t^(i)).
inline std::vector<BlowupPoint> blowup_sequence(const ExactSphereFlow& flow,
                                                const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("blowup_sequence: empty times");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("blowup_sequence: times must increase");
    std::vector<BlowupPoint> seq;
    for (double t : times) {
        if (t < 0.0 || t >= flow.T()) throw ExistenceTimeExceeded(flow.T());
        BlowupPoint p;
        p.t = t;
        const double h = flow.H(t);
        p.Q = h * h;
        seq.push_back(p);
    }
    return seq;
}

// Profile-flow history variant: maximizes the recorded max H^2 over samples
// with t <= t^(i); ties resolve to the earliest sample.
inline std::vector<BlowupPoint> blowup_sequence(const std::vector<FlowSample>& history,
                                                const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("blowup_sequence: empty times");
    if (history.empty()) throw std::invalid_argument("blowup_sequence: empty history");
    std::vector<BlowupPoint> seq;
    for (double t : times) {
        BlowupPoint p;
        bool found = false;
        for (const auto& s : history) {
            if (s.t > t) break;
            if (!found || s.max_H2 > p.Q) {
                p.Q = s.max_H2;
                p.t = s.t;
                p.location = s.location;
                found = true;
            }
        }
        if (!found) throw std::invalid_argument("blowup_sequence: time before first sample");
        seq.push_back(p);
    }
    for (std::size_t i = 1; i < seq.size(); ++i)
        if (seq[i].Q < seq[i - 1].Q)
            throw std::logic_error("blowup_sequence: Q must be non-decreasing");
    return seq;
}

struct NormVanishingRecord {
    double alpha = 0.0;
    std::vector<double> tails;  // int_{t_i}^{t_i + 1/Q_i} int |H|^alpha
    bool vanishing = false;     // tails decrease and the last is < the first / 4
};

// The tail integrals over [t_i, t_i + 1/Q_i] must tend to zero whenever the
// global space-time norm is finite. Divergent flows are refused: the whole
// point of the argument is that a normalized rescaling limit would force
// these tails to stay bounded away from zero.
inline NormVanishingRecord norm_vanishing_check(const ExactSphereFlow& flow,
                                                const std::vector<BlowupPoint>& sequence,
                                                double alpha) {
    if (sequence.empty()) throw std::invalid_argument("norm_vanishing_check: empty sequence");
    const DivergenceVerdict v = classify_divergence(flow, alpha, dyadic_horizons(flow.T()));
    if (v.classification != DivergenceVerdict::Class::finite)
        throw std::domain_error(
            "norm_vanishing_check: the space-time norm at alpha = " + std::to_string(alpha) +
            " is not finite; tail integrals cannot vanish");
    NormVanishingRecord rec;
    rec.alpha = alpha;
    for (const auto& p : sequence) {
        const double t_hi = std::min(p.t + 1.0 / p.Q, std::nextafter(flow.T(), 0.0));
        rec.tails.push_back(integrate_adaptive(
            [&](double t) { return flow.inner_integral(t, alpha); }, p.t, t_hi, 1e-10));
    }
    rec.vanishing = true;
    for (std::size_t i = 1; i < rec.tails.size(); ++i)
        rec.vanishing = rec.vanishing && rec.tails[i] <= rec.tails[i - 1] * (1.0 + 1e-12);
    rec.vanishing = rec.vanishing && rec.tails.back() < 0.25 * rec.tails.front();
    return rec;
}

struct H2MarginRecord {
    double initial_margin = 0.0;         // H^2(0) - n^2 K1
    double min_margin = 0.0;             // min over the sampled window
    bool initial_condition_holds = false;
    bool preserved = false;              // margin never drops below its initial value
    std::vector<std::pair<double, double>> trace;  // (t, margin)
};

// Monitors the preserved lower bound H^2 > n^2 K1 on [0, t_end].
inline H2MarginRecord h2_lower_bound_monitor(const ExactSphereFlow& flow, double t_end,
                                             std::size_t steps = 128) {
    if (!(t_end > 0.0 && t_end < flow.T()))
        throw std::invalid_argument("h2_lower_bound_monitor: t_end must lie in (0, T)");
    const double n2K1 = static_cast<double>(flow.n()) * flow.n() * flow.ambient.K1;
    H2MarginRecord rec;
    rec.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = t_end * static_cast<double>(i) / static_cast<double>(steps);
        const double margin = flow.H(t) * flow.H(t) - n2K1;
        rec.trace.emplace_back(t, margin);
        rec.min_margin = std::min(rec.min_margin, margin);
    }
    rec.initial_margin = rec.trace.front().second;
    rec.initial_condition_holds = rec.initial_margin > 0.0;
    rec.preserved = rec.initial_condition_holds &&
                    rec.min_margin >= rec.initial_margin * (1.0 - 1e-12);
    return rec;
}

} // namespace mcflab

#endif // MCFLAB_RESCALE_HPP
