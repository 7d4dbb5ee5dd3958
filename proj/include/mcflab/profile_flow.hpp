#ifndef MCFLAB_PROFILE_FLOW_HPP
#define MCFLAB_PROFILE_FLOW_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcflab/snapshot.hpp"
#include "mcflab/space_form.hpp"

namespace mcflab {

enum class ProfileBoundary { cap, reflect };

inline const char* to_string(ProfileBoundary b) {
    return b == ProfileBoundary::cap ? "cap" : "reflect";
}

struct DtControl {
    double safety = 0.5;     // sigma in dt = sigma * min(dx^2/2, 1/(2 max|A|^2))
    double max_step = 1e-3;
    double blowup_A = 0.0;   // 0: default 1e6 / initial diameter
    double rho_floor = 0.0;  // 0: default 1e-6 * initial scale
};

struct SingularityReport {
    enum class Reason { none, blow_up, step_underflow, horizon_reached };
    bool detected = false;
    double t_sing_estimate = 0.0;
    double max_A = 0.0;
    double max_H2 = 0.0;
    double location = 0.0;  // axis coordinate of the curvature maximum
    Reason reason = Reason::none;
};

struct FlowSample {
    double t = 0.0;
    double max_A = 0.0;
    double max_H2 = 0.0;
    double location = 0.0;
    double area = 0.0;
    double inner_Hn2 = 0.0;  // int_M |H|^{n+2} dmu at this time
};

struct SingularityThresholds {
    double blowup_A = 0.0;   // 0 means: use the history's own scale (max_A quadrupled)
    int fit_window = 6;
};

// Fit max|A|(t) against C / sqrt(T - t), i.e. a linear fit of 1/max|A|^2
// versus t, and report blow-up when the curvature maximum exceeds the
// threshold with accelerating growth.
inline SingularityReport detect_singularity(const std::vector<FlowSample>& history,
                                            const SingularityThresholds& thr = {}) {
    if (history.size() < 2)
        throw std::invalid_argument("detect_singularity: need at least two snapshots");
    SingularityReport rep;
    const FlowSample& last = history.back();
    rep.max_A = last.max_A;
    rep.max_H2 = last.max_H2;
    rep.location = last.location;

    double threshold = thr.blowup_A;
    if (threshold <= 0.0) threshold = 4.0 * history.front().max_A;
    const bool growing = last.max_A > history[history.size() - 2].max_A;
    bool accelerating = growing;
    if (history.size() >= 3) {
        const double d1 = history[history.size() - 2].max_A - history[history.size() - 3].max_A;
        const double d2 = last.max_A - history[history.size() - 2].max_A;
        const double dt1 = history[history.size() - 2].t - history[history.size() - 3].t;
        const double dt2 = last.t - history[history.size() - 2].t;
        accelerating = growing && dt1 > 0.0 && dt2 > 0.0 && d2 / dt2 >= d1 / dt1;
    }
    rep.detected = last.max_A >= threshold && accelerating;

    // least-squares line through (t, 1/max|A|^2). Samples are picked at
    // distinct curvature levels walking back from the end: near the singular
    // time dt collapses, so a window of consecutive samples would have
    // degenerate abscissae.
    const std::size_t w =
        std::min<std::size_t>(history.size(), static_cast<std::size_t>(std::max(2, thr.fit_window)));
    std::vector<std::size_t> pick = {history.size() - 1};
    double level = last.max_A;
    for (std::size_t i = history.size() - 1; i > 0 && pick.size() < w;) {
        --i;
        if (history[i].max_A > 0.0 && history[i].max_A <= 0.8 * level) {
            pick.push_back(i);
            level = history[i].max_A;
        }
    }
    if (pick.size() < 2) pick.push_back(history.size() - 2);
    // abscissae centered at the last time for conditioning
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i : pick) {
        const double x = history[i].t - last.t;
        const double y = 1.0 / (history[i].max_A * history[i].max_A);
        st += x;
        sy += y;
        stt += x * x;
        sty += x * y;
    }
    const double nw = static_cast<double>(pick.size());
    const double denom = nw * stt - st * st;
    const double slope = (denom != 0.0) ? (nw * sty - st * sy) / denom : 0.0;
    const double inter = (sy - slope * st) / nw;
    rep.t_sing_estimate = (slope < 0.0) ? last.t - inter / slope : last.t;
    if (rep.detected) rep.reason = SingularityReport::Reason::blow_up;
    return rep;
}

// Rotationally symmetric mean curvature flow of a hypersurface of revolution
// in R^{n+1}. The profile rho(x, t) over the axis obeys
//   d rho / dt = rho'' / (1 + rho'^2) - (n-1) / rho.
// Internally the flow evolves w = rho^2, for which the equation
//   d w / dt = (4 w w'' - 2 w'^2) / (4 w + w'^2) - 2(n-1)
// stays regular at the poles of capped profiles (w = 0, w' != 0, where the
// right-hand side tends to -2n). Capped flows carry a moving axis interval
// [a(t), b(t)] whose ends follow the poles; the grid is uniform in the mapped
// coordinate xi in [0, 1].
class ProfileFlow {
public:
    static constexpr std::size_t kMinIntervals = 16;

    static ProfileFlow from_profile(int n, const std::vector<double>& x,
                                    const std::vector<double>& rho,
                                    ProfileBoundary boundary, DtControl ctl = {}) {
        if (n < 3) throw std::invalid_argument("ProfileFlow: n must be >= 3");
        if (x.size() != rho.size() || x.size() < kMinIntervals + 1)
            throw std::invalid_argument("ProfileFlow: need matching x/rho with >= 16 intervals");
        for (std::size_t i = 1; i < x.size(); ++i)
            if (!(x[i] > x[i - 1]))
                throw std::invalid_argument("ProfileFlow: axis samples must be increasing");
        ProfileFlow f;
        f.n_ = n;
        f.boundary_ = boundary;
        f.ctl_ = ctl;
        f.a_ = x.front();
        f.b_ = x.back();
        f.m_ = x.size() - 1;
        // resample onto the uniform mapped grid
        f.w_.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double xi = f.a_ + (f.b_ - f.a_) * static_cast<double>(i) / static_cast<double>(f.m_);
            const double r = interp(x, rho, xi);
            f.w_[i] = r * r;
        }
        if (boundary == ProfileBoundary::cap) {
            f.w_.front() = 0.0;
            f.w_.back() = 0.0;
        }
        for (std::size_t i = 1; i < f.m_; ++i)
            if (f.w_[i] <= 0.0)
                throw std::invalid_argument("ProfileFlow: rho must be positive at interior points");
        f.finish_setup();
        return f;
    }

    // Full round sphere of radius r: profile rho(x) = sqrt(r^2 - x^2).
    static ProfileFlow sphere(int n, double r, std::size_t m = 256, DtControl ctl = {}) {
        if (r <= 0.0) throw std::invalid_argument("ProfileFlow::sphere: r must be positive");
        ProfileFlow f;
        f.n_ = n;
        f.boundary_ = ProfileBoundary::cap;
        f.ctl_ = ctl;
        f.m_ = m;
        f.a_ = -r;
        f.b_ = r;
        f.w_.resize(m + 1);
        for (std::size_t i = 0; i <= m; ++i) {
            const double x = -r + 2.0 * r * static_cast<double>(i) / static_cast<double>(m);
            f.w_[i] = std::max(0.0, r * r - x * x);
        }
        f.w_.front() = 0.0;
        f.w_.back() = 0.0;
        f.finish_setup();
        return f;
    }

    static ProfileFlow cylinder(int n, double r, double length, std::size_t m = 64, DtControl ctl = {}) {
        if (r <= 0.0 || length <= 0.0) throw std::invalid_argument("ProfileFlow::cylinder: bad parameters");
        ProfileFlow f;
        f.n_ = n;
        f.boundary_ = ProfileBoundary::reflect;
        f.ctl_ = ctl;
        f.m_ = m;
        f.a_ = -0.5 * length;
        f.b_ = 0.5 * length;
        f.w_.assign(m + 1, r * r);
        f.finish_setup();
        return f;
    }

    // Two bulbs joined by a neck at x = 0: w(x) = C (1 - u^2)(u^2 + s^2) with
    // u = x / half_length, calibrated so max rho = bulb and rho(0) = neck.
    static ProfileFlow dumbbell(int n, double bulb, double neck, double half_length,
                                std::size_t m = 256, DtControl ctl = {}) {
        if (!(0.0 < neck && neck < bulb))
            throw std::invalid_argument("ProfileFlow::dumbbell: need 0 < neck < bulb");
        const double q = neck / bulb;
        // 2s/(1+s^2) = q, smaller root
        const double s = (1.0 - std::sqrt(1.0 - q * q)) / q;
        const double C = std::pow(2.0 * bulb / (1.0 + s * s), 2);
        ProfileFlow f;
        f.n_ = n;
        f.boundary_ = ProfileBoundary::cap;
        f.ctl_ = ctl;
        f.m_ = m;
        f.a_ = -half_length;
        f.b_ = half_length;
        f.w_.resize(m + 1);
        for (std::size_t i = 0; i <= m; ++i) {
            const double u = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(m);
            f.w_[i] = std::max(0.0, C * (1.0 - u * u) * (u * u + s * s));
        }
        f.w_.front() = 0.0;
        f.w_.back() = 0.0;
        f.finish_setup();
        return f;
    }

    int n() const { return n_; }
    ProfileBoundary boundary() const { return boundary_; }
    double time() const { return t_; }
    bool alive() const { return alive_; }
    const SingularityReport& report() const { return report_; }
    const DtControl& dt_control() const { return ctl_; }
    const std::vector<FlowSample>& history() const { return history_; }
    std::size_t intervals() const { return m_; }
    double axis_lo() const { return a_; }
    double axis_hi() const { return b_; }

    double x_at(std::size_t i) const {
        return a_ + (b_ - a_) * static_cast<double>(i) / static_cast<double>(m_);
    }
    double rho_at(std::size_t i) const { return std::sqrt(std::max(0.0, w_[i])); }
    const std::vector<double>& w() const { return w_; }

    double dx() const { return (b_ - a_) / static_cast<double>(m_); }

    struct PointGeometry {
        double kappa1 = 0.0, kappa2 = 0.0, H = 0.0, A2 = 0.0;
    };

    PointGeometry geometry_at(std::size_t i) const { return geometry(w_, dx(), i); }

    double max_abs_A() const {
        double m = 0.0;
        for (std::size_t i = 0; i <= m_; ++i)
            m = std::max(m, std::sqrt(geometry_at(i).A2));
        return m;
    }

    double min_principal() const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i <= m_; ++i) {
            const PointGeometry g = geometry_at(i);
            m = std::min(m, std::min(g.kappa1, g.kappa2));
        }
        return m;
    }

    // Total n-dimensional area, trapezoid quadrature of
    // A(S^{n-1}) rho^{n-1} sqrt(1+rho'^2) = A(S^{n-1}) w^{(n-2)/2} sqrt(w + w'^2/4).
    double total_area() const { return area(w_, dx()); }

    double inner_H_power(double alpha) const {
        const double h = dx();
        double s = 0.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            const double wgt = measure_weight(w_, h, i) * ((i == 0 || i == m_) ? 0.5 : 1.0);
            if (wgt == 0.0) continue;
            s += std::pow(std::abs(geometry_at(i).H), alpha) * wgt;
        }
        return s;
    }

    // One adaptive explicit step. Returns false (and marks the flow dead with
    // a singularity report) when the flow cannot continue.
    bool step() {
        if (!alive_) return false;
        const double h = dx();
        const double maxA = max_abs_A();
        if (maxA >= blowup_threshold()) { die(SingularityReport::Reason::blow_up); return false; }

        double dt = ctl_.safety * std::min({h * h / 2.0, 1.0 / (2.0 * maxA * maxA), ctl_.max_step});
        const double dt_floor = 1e-14 * std::max(t_, time_scale_);
        for (int attempt = 0; attempt < 48; ++attempt) {
            if (dt <= dt_floor) { die(SingularityReport::Reason::step_underflow); return false; }
            State next = rk4(dt);
            if (positive_interior(next.w)) {
                a_ = next.a;
                b_ = next.b;
                w_ = std::move(next.w);
                t_ += dt;
                record_sample();
                return true;
            }
            dt *= 0.5;  // never emit rho <= 0
        }
        die(SingularityReport::Reason::step_underflow);
        return false;
    }

    // Advance until t_horizon or death. Returns the report (reason
    // horizon_reached when the flow is still alive at the horizon).
    SingularityReport run_until(double t_horizon) {
        while (alive_ && t_ < t_horizon) step();
        if (alive_) {
            SingularityReport rep = current_report();
            rep.reason = SingularityReport::Reason::horizon_reached;
            return rep;
        }
        return report_;
    }

    SingularityReport current_report() const {
        if (history_.size() >= 2) {
            SingularityThresholds thr;
            thr.blowup_A = blowup_threshold();
            return detect_singularity(history_, thr);
        }
        SingularityReport rep;
        rep.max_A = max_abs_A();
        return rep;
    }

    // Interior profile as a surface of revolution (poles excluded for capped
    // flows since rho vanishes there).
    SurfaceOfRevolution surface() const {
        SurfaceOfRevolution s;
        s.n = n_;
        const std::size_t lo = (boundary_ == ProfileBoundary::cap) ? 1 : 0;
        const std::size_t hi = (boundary_ == ProfileBoundary::cap) ? m_ - 1 : m_;
        for (std::size_t i = lo; i <= hi; ++i) {
            s.theta.push_back(x_at(i));
            s.x.push_back(x_at(i));
            s.rho.push_back(rho_at(i));
        }
        return s;
    }

    GeometrySnapshot snapshot() const {
        GeometrySnapshot snap = surface().snapshot(t_);
        snap.tolerance = 1e-6;
        return snap;
    }

    // --- plain-text interfaces ------------------------------------------
    // Initial data: header "# n=<int> boundary=<tag>" then "x rho" rows.
    static ProfileFlow load(std::istream& in, DtControl ctl = {}) {
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error("ProfileFlow::load: empty input");
        int n = 0;
        std::string tag;
        {
            std::istringstream h(line);
            std::string hash, kn, kb;
            h >> hash >> kn >> kb;
            if (hash != "#" || kn.rfind("n=", 0) != 0 || kb.rfind("boundary=", 0) != 0)
                throw std::runtime_error("ProfileFlow::load: bad header, expected '# n=<int> boundary=<tag>'");
            n = std::stoi(kn.substr(2));
            tag = kb.substr(9);
        }
        ProfileBoundary boundary;
        if (tag == "cap") boundary = ProfileBoundary::cap;
        else if (tag == "reflect") boundary = ProfileBoundary::reflect;
        else throw std::runtime_error("ProfileFlow::load: unknown boundary tag '" + tag + "'");
        std::vector<double> x, rho;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream row(line);
            double xv, rv;
            if (!(row >> xv >> rv)) throw std::runtime_error("ProfileFlow::load: bad data row: " + line);
            x.push_back(xv);
            rho.push_back(rv);
        }
        return from_profile(n, x, rho, boundary, ctl);
    }

    void save_initial(std::ostream& out) const {
        out << std::setprecision(17);
        out << "# n=" << n_ << " boundary=" << to_string(boundary_) << "\n";
        for (std::size_t i = 0; i <= m_; ++i)
            out << x_at(i) << " " << rho_at(i) << "\n";
    }

    void write_snapshot_csv(std::ostream& out) const {
        out << "x,rho,H,absA\n";
        for (std::size_t i = 0; i <= m_; ++i) {
            const PointGeometry g = geometry_at(i);
            out << x_at(i) << "," << rho_at(i) << "," << g.H << "," << std::sqrt(g.A2) << "\n";
        }
    }

    double blowup_threshold() const {
        // deep enough that the accumulated |H|^{n+2} integral visibly diverges
        return ctl_.blowup_A > 0.0 ? ctl_.blowup_A : 1e6 / initial_diameter_;
    }

private:
    int n_ = 3;
    ProfileBoundary boundary_ = ProfileBoundary::cap;
    DtControl ctl_;
    std::size_t m_ = 0;
    double a_ = 0.0, b_ = 0.0;
    std::vector<double> w_;
    double t_ = 0.0;
    bool alive_ = true;
    SingularityReport report_;
    std::vector<FlowSample> history_;
    double initial_diameter_ = 1.0;
    double time_scale_ = 1.0;

    struct State {
        double a, b;
        std::vector<double> w;
    };

    void finish_setup() {
        double wmax = 0.0;
        for (double w : w_) wmax = std::max(wmax, w);
        initial_diameter_ = std::max(b_ - a_, 2.0 * std::sqrt(wmax));
        time_scale_ = initial_diameter_ * initial_diameter_ / (2.0 * n_);
        record_sample();
    }

    static double interp(const std::vector<double>& x, const std::vector<double>& y, double xi) {
        if (xi <= x.front()) return y.front();
        if (xi >= x.back()) return y.back();
        const auto it = std::upper_bound(x.begin(), x.end(), xi);
        const std::size_t k = static_cast<std::size_t>(it - x.begin());
        const double t = (xi - x[k - 1]) / (x[k] - x[k - 1]);
        return (1.0 - t) * y[k - 1] + t * y[k];
    }

    // d/dx and d2/dx2 on a uniform grid with reflection ghosts where needed.
    double wx(const std::vector<double>& w, double h, std::size_t i) const {
        if (i == 0) {
            if (boundary_ == ProfileBoundary::reflect) return 0.0;
            return (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h);
        }
        if (i == m_) {
            if (boundary_ == ProfileBoundary::reflect) return 0.0;
            return (3.0 * w[m_] - 4.0 * w[m_ - 1] + w[m_ - 2]) / (2.0 * h);
        }
        return (w[i + 1] - w[i - 1]) / (2.0 * h);
    }

    double wxx(const std::vector<double>& w, double h, std::size_t i) const {
        if (i == 0) {
            if (boundary_ == ProfileBoundary::reflect) return 2.0 * (w[1] - w[0]) / (h * h);
            return (2.0 * w[0] - 5.0 * w[1] + 4.0 * w[2] - w[3]) / (h * h);
        }
        if (i == m_) {
            if (boundary_ == ProfileBoundary::reflect) return 2.0 * (w[m_ - 1] - w[m_]) / (h * h);
            return (2.0 * w[m_] - 5.0 * w[m_ - 1] + 4.0 * w[m_ - 2] - w[m_ - 3]) / (h * h);
        }
        return (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h);
    }

    PointGeometry geometry(const std::vector<double>& w, double h, std::size_t i) const {
        PointGeometry g;
        const double wi = std::max(0.0, w[i]);
        const double d1 = wx(w, h, i);
        const double d2 = wxx(w, h, i);
        const double denom = 4.0 * wi + d1 * d1;
        if (denom <= 0.0) return g;  // degenerate point; caller handles death
        const double sq = std::sqrt(denom);
        g.kappa2 = 2.0 / sq;
        g.kappa1 = -2.0 * (2.0 * wi * d2 - d1 * d1) / (denom * sq);
        g.H = g.kappa1 + (n_ - 1) * g.kappa2;
        g.A2 = g.kappa1 * g.kappa1 + (n_ - 1) * g.kappa2 * g.kappa2;
        return g;
    }

    static double measure_weight_impl(int n, double w, double wx, double h) {
        if (w <= 0.0) return 0.0;
        return unit_sphere_area(n - 1) * std::pow(w, 0.5 * (n - 2)) *
               std::sqrt(w + 0.25 * wx * wx) * h;
    }

    double measure_weight(const std::vector<double>& w, double h, std::size_t i) const {
        return measure_weight_impl(n_, std::max(0.0, w[i]), wx(w, h, i), h);
    }

    double area(const std::vector<double>& w, double h) const {
        double s = 0.0;
        for (std::size_t i = 0; i <= m_; ++i)
            s += measure_weight(w, h, i) * ((i == 0 || i == m_) ? 0.5 : 1.0);
        return s;
    }

    // Right-hand side of the w-equation, including the mesh-motion advection
    // term for capped flows.
    void rhs(const State& s, double& da, double& db, std::vector<double>& dw) const {
        const double h = (s.b - s.a) / static_cast<double>(m_);
        dw.assign(m_ + 1, 0.0);
        da = db = 0.0;
        if (boundary_ == ProfileBoundary::cap) {
            // at a pole (w = 0, w' != 0) the equation gives dw/dt = -2n, so
            // the pole position moves with da/dt = -(dw/dt)/w' = 2n / w'
            const double wxa = wx(s.w, h, 0);
            const double wxb = wx(s.w, h, m_);
            da = 2.0 * n_ / wxa;
            db = 2.0 * n_ / wxb;
        }
        const std::size_t lo = (boundary_ == ProfileBoundary::cap) ? 1 : 0;
        const std::size_t hi = (boundary_ == ProfileBoundary::cap) ? m_ - 1 : m_;
        for (std::size_t i = lo; i <= hi; ++i) {
            const double wi = s.w[i];
            const double d1 = wx(s.w, h, i);
            const double d2 = wxx(s.w, h, i);
            const double F = (4.0 * wi * d2 - 2.0 * d1 * d1) / (4.0 * wi + d1 * d1) -
                             2.0 * (n_ - 1);
            const double xi = static_cast<double>(i) / static_cast<double>(m_);
            const double xdot = da * (1.0 - xi) + db * xi;
            dw[i] = F + xdot * d1;
        }
    }

    State rk4(double dt) const {
        State s0{a_, b_, w_};
        double da1, db1, da2, db2, da3, db3, da4, db4;
        std::vector<double> k1, k2, k3, k4;
        rhs(s0, da1, db1, k1);
        State s{s0.a + 0.5 * dt * da1, s0.b + 0.5 * dt * db1, s0.w};
        axpy(s.w, s0.w, 0.5 * dt, k1);
        rhs(s, da2, db2, k2);
        s.a = s0.a + 0.5 * dt * da2;
        s.b = s0.b + 0.5 * dt * db2;
        axpy(s.w, s0.w, 0.5 * dt, k2);
        rhs(s, da3, db3, k3);
        s.a = s0.a + dt * da3;
        s.b = s0.b + dt * db3;
        axpy(s.w, s0.w, dt, k3);
        rhs(s, da4, db4, k4);
        State out{s0.a + dt / 6.0 * (da1 + 2 * da2 + 2 * da3 + da4),
                  s0.b + dt / 6.0 * (db1 + 2 * db2 + 2 * db3 + db4), s0.w};
        for (std::size_t i = 0; i <= m_; ++i)
            out.w[i] = s0.w[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        return out;
    }

    static void axpy(std::vector<double>& out, const std::vector<double>& base, double c,
                     const std::vector<double>& v) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = base[i] + c * v[i];
    }

    bool positive_interior(const std::vector<double>& w) const {
        for (std::size_t i = 1; i < m_; ++i)
            if (!(w[i] > 0.0)) return false;
        if (boundary_ == ProfileBoundary::reflect)
            return w.front() > 0.0 && w.back() > 0.0;
        return true;
    }

    void record_sample() {
        FlowSample s;
        s.t = t_;
        s.area = total_area();
        s.inner_Hn2 = inner_H_power(static_cast<double>(n_) + 2.0);
        double maxA2 = -1.0;
        std::size_t arg = 0;
        double maxH2 = 0.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            const PointGeometry g = geometry_at(i);
            if (g.A2 > maxA2) { maxA2 = g.A2; arg = i; }
            maxH2 = std::max(maxH2, g.H * g.H);
        }
        s.max_A = std::sqrt(std::max(0.0, maxA2));
        s.max_H2 = maxH2;
        s.location = x_at(arg);
        history_.push_back(s);
    }

    void die(SingularityReport::Reason reason) {
        alive_ = false;
        if (history_.size() >= 2) {
            SingularityThresholds thr;
            // a hard stop at the blow-up ceiling is a singularity by fiat; a
            // step underflow is judged against the history's own growth
            if (reason == SingularityReport::Reason::blow_up) thr.blowup_A = blowup_threshold();
            report_ = detect_singularity(history_, thr);
        } else {
            report_ = SingularityReport{};
        }
        report_.reason = reason;
        if (reason == SingularityReport::Reason::blow_up) report_.detected = true;
    }
};

} // namespace mcflab

#endif // MCFLAB_PROFILE_FLOW_HPP
