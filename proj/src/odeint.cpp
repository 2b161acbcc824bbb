#include "tsr/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsr {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84;
// Error weights: 5th-order minus embedded 4th-order solution.
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;
// Continuous-extension weights (Hairer & Wanner DOPRI5 dense output).
constexpr double D1 = -12715105075.0 / 11282082432.0, D3 = 87487479700.0 / 32700410799.0,
                 D4 = -10690763975.0 / 1880347072.0, D5 = 701980252875.0 / 199316789632.0,
                 D6 = -1453857185.0 / 822651844.0, D7 = 69997945.0 / 29380423.0;

bool finite(const Vec& v) { return v.allFinite(); }

}  // namespace

std::size_t Trajectory::locate(double t) const {
    const double slack = 1e-9 * (1.0 + std::abs(t_end()) + std::abs(t0));
    if (t < times.front() - slack || t > times.back() + slack)
        throw std::out_of_range("Trajectory::at: t outside sampled range");
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = (it == times.begin()) ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    if (i + 1 >= times.size()) i = times.size() - 2;
    return i;
}

Vec Trajectory::at(double t) const {
    if (times.size() == 1) return states.front();
    const std::size_t i = locate(t);
    const double h = times[i + 1] - times[i];
    const double th = std::clamp((t - times[i]) / h, 0.0, 1.0);
    if (!dense_.empty()) {
        const auto& r = dense_[i];
        const double th1 = 1.0 - th;
        return r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])));
    }
    // Cubic Hermite.
    const double th2 = th * th, th3 = th2 * th;
    const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + th, h01 = -2 * th3 + 3 * th2,
                 h11 = th3 - th2;
    return h00 * states[i] + (h10 * h) * derivs[i] + h01 * states[i + 1] + (h11 * h) * derivs[i + 1];
}

Vec Trajectory::deriv_at(double t) const {
    if (times.size() == 1) return derivs.front();
    const std::size_t i = locate(t);
    const double h = times[i + 1] - times[i];
    const double th = std::clamp((t - times[i]) / h, 0.0, 1.0);
    if (!dense_.empty()) {
        const auto& r = dense_[i];
        // d/dθ of r0 + θ(r1 + (1−θ)(r2 + θ(r3 + (1−θ)r4)))
        const double th1 = 1.0 - th;
        Vec inner = r[3] + th1 * r[4];
        Vec d_inner = r[4] * -1.0;
        Vec mid = r[2] + th * inner;
        Vec d_mid = inner + th * d_inner;
        Vec dpoly = r[1] + th1 * mid + th * (-mid + th1 * d_mid);
        return dpoly / h;
    }
    const double th2 = th * th;
    const double g00 = (6 * th2 - 6 * th) / h, g10 = 3 * th2 - 4 * th + 1, g01 = (-6 * th2 + 6 * th) / h,
                 g11 = 3 * th2 - 2 * th;
    return g00 * states[i] + g10 * derivs[i] + g01 * states[i + 1] + g11 * derivs[i + 1];
}

Trajectory Trajectory::from_samples(std::vector<double> times, std::vector<Vec> states, std::vector<Vec> derivs,
                                    TerminalStatus status) {
    Trajectory tr;
    tr.t0 = times.front();
    tr.times = std::move(times);
    tr.states = std::move(states);
    tr.derivs = std::move(derivs);
    tr.status = status;
    return tr;
}

namespace {

struct Stepper {
    const Rhs& rhs;
    const IntegratorOptions& opts;
    int n;
    Vec k1, k2, k3, k4, k5, k6, k7, xtmp, xnew, err;

    explicit Stepper(const Rhs& rhs_, const IntegratorOptions& opts_, int n_)
        : rhs(rhs_), opts(opts_), n(n_) {
        for (Vec* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &xtmp, &xnew, &err}) v->resize(n);
    }

    // One trial step from (t, x) with k1 = rhs(t, x) already loaded.
    // Returns the scaled error norm; xnew/k7 hold the candidate result.
    // Stage times pass through `clock` so a segment never samples the rhs at
    // or past its right-end discontinuity.
    template <typename Clock>
    double attempt(double t, const Vec& x, double h, const Clock& clock) {
        xtmp = x + h * (A21 * k1);
        rhs(clock(t + C2 * h), xtmp, k2);
        xtmp = x + h * (A31 * k1 + A32 * k2);
        rhs(clock(t + C3 * h), xtmp, k3);
        xtmp = x + h * (A41 * k1 + A42 * k2 + A43 * k3);
        rhs(clock(t + C4 * h), xtmp, k4);
        xtmp = x + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4);
        rhs(clock(t + C5 * h), xtmp, k5);
        xtmp = x + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5);
        rhs(clock(t + h), xtmp, k6);
        xnew = x + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        rhs(clock(t + h), xnew, k7);
        err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        if (!finite(xnew) || !finite(err)) return std::numeric_limits<double>::infinity();
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(x[i]), std::abs(xnew[i]));
            const double r = err[i] / sc;
            acc += r * r;
        }
        return std::sqrt(acc / n);
    }
};

template <typename Clock>
double initial_step_guess(const Rhs& rhs, double t, const Vec& x, const Vec& f0, double span,
                          const IntegratorOptions& opts, const Clock& clock) {
    if (opts.initial_step > 0) return std::min(opts.initial_step, span);
    const double d0 = x.norm(), d1 = f0.norm();
    double h = (d0 > 1e-10 && d1 > 1e-10) ? 0.01 * d0 / d1 : 1e-6 * std::max(1.0, span);
    h = std::min(h, span);
    // Refine with one Euler probe.
    Vec x1 = x + h * f0, f1(x.size());
    rhs(clock(t + h), x1, f1);
    if (finite(f1)) {
        const double d2 = (f1 - f0).norm() / h;
        const double dm = std::max(d1, d2);
        if (dm > 1e-15) h = std::min(100 * h, std::pow(0.01 / dm, 1.0 / 5.0));
    }
    return std::min(h, span);
}

}  // namespace

Trajectory integrate(const Rhs& rhs, double t0, Vec x0, double T, const IntegratorOptions& opts) {
    if (!(T > t0)) throw std::invalid_argument("integrate: T must exceed t0");
    if (!(opts.rel_tol > 0) || !(opts.abs_tol > 0)) throw std::invalid_argument("integrate: tolerances must be positive");
    if (!(opts.blowup_threshold > 0)) throw std::invalid_argument("integrate: blowup_threshold must be positive");
    const int n = static_cast<int>(x0.size());

    // Segment boundaries: interior breakpoints split the horizon.
    std::vector<double> cuts{t0};
    for (double b : opts.breakpoints)
        if (b > t0 && b < T) cuts.push_back(b);
    cuts.push_back(T);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Trajectory tr;
    tr.t0 = t0;
    Stepper st(rhs, opts, n);
    Vec x = std::move(x0);

    tr.times.push_back(t0);
    tr.states.push_back(x);

    long steps = 0;
    double err_prev = 1.0;

    for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
        const double a = cuts[seg];
        const double b = cuts[seg + 1];
        const bool cut_is_breakpoint = seg + 2 < cuts.size();
        // Left-limit clock: within this segment the rhs is never sampled at or
        // past an interior breakpoint b.
        const double b_left = std::nextafter(b, a);
        auto clock = [&](double tau) { return cut_is_breakpoint ? std::min(tau, b_left) : std::min(tau, b); };

        double t = a;
        rhs(clock(t), x, st.k1);
        if (tr.derivs.empty())
            tr.derivs.push_back(st.k1);
        else
            tr.derivs.back() = st.k1;  // right-side limit at the breakpoint
        if (!finite(st.k1)) throw std::invalid_argument("integrate: rhs not finite at segment start");

        double h = initial_step_guess(rhs, t, x, st.k1, b - a, opts, clock);
        if (opts.max_step > 0) h = std::min(h, opts.max_step);

        while (t < b) {
            if (++steps > opts.max_steps) throw std::runtime_error("integrate: max step count exceeded");
            const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0);
            bool last = false;
            if (t + h >= b) {
                h = b - t;
                last = true;
            }
            const double err = st.attempt(t, x, h, clock);
            if (err <= 1.0) {
                t = last ? b : t + h;
                x = st.xnew;
                // Dense coefficients for [told, t].
                std::array<Vec, 5> r;
                const Vec& xold = tr.states.back();
                r[0] = xold;
                r[1] = x - xold;
                r[2] = h * st.k1 - r[1];
                r[3] = r[1] - h * st.k7 - r[2];
                r[4] = h * (D1 * st.k1 + D3 * st.k3 + D4 * st.k4 + D5 * st.k5 + D6 * st.k6 + D7 * st.k7);
                tr.dense_.push_back(std::move(r));
                tr.times.push_back(t);
                tr.states.push_back(x);
                tr.derivs.push_back(st.k7);
                if (x.norm() >= opts.blowup_threshold || !finite(x)) {
                    tr.status = TerminalStatus::BlowUp;
                    return tr;
                }
                st.k1 = st.k7;  // FSAL
                // PI controller.
                double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
                fac = std::clamp(fac, 0.2, 5.0);
                h *= fac;
                if (opts.max_step > 0) h = std::min(h, opts.max_step);
                err_prev = std::max(err, 1e-10);
            } else {
                double fac = std::isfinite(err) ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.1;
                h *= fac;
                if (h < h_min) throw StepSizeUnderflow(t, x.norm());
            }
        }
    }
    return tr;
}

}  // namespace tsr
