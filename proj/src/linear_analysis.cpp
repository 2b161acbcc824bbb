#include "tsr/linear_analysis.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsr {

std::size_t FundamentalMatrixTrace::locate(double t) const {
    const double slack = 1e-9 * (1.0 + std::abs(T) + std::abs(t0));
    if (t < times.front() - slack || t > times.back() + slack)
        throw std::out_of_range("FundamentalMatrixTrace: t outside horizon");
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = (it == times.begin()) ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    if (i + 1 >= times.size()) i = times.size() - 2;
    return i;
}

double FundamentalMatrixTrace::interp(const std::vector<double>& v, double t) const {
    if (times.size() == 1) return v.front();
    const std::size_t i = locate(t);
    const double h = times[i + 1] - times[i];
    const double th = std::clamp((t - times[i]) / h, 0.0, 1.0);
    return v[i] + th * (v[i + 1] - v[i]);
}

double FundamentalMatrixTrace::p_at(double t) const { return interp(p, t); }
double FundamentalMatrixTrace::c_at(double t) const { return interp(c, t); }
double FundamentalMatrixTrace::cum_p_at(double t) const { return interp(cum_p, t); }
double FundamentalMatrixTrace::w_norm_at(double t) const { return interp(sigma_max, t); }

Mat FundamentalMatrixTrace::w_at(double t) const {
    Mat out(n, n);
    for (int j = 0; j < n; ++j) out.col(j) = columns[j].at(t);
    return out;
}

FundamentalMatrixTrace fundamental_matrix(const std::vector<std::vector<TimeSignal>>& A, double t0, double T,
                                          const TraceOptions& opts) {
    if (!(T > t0)) throw std::invalid_argument("fundamental_matrix: T must exceed t0");
    const int n = static_cast<int>(A.size());
    FundamentalMatrixTrace tr;
    tr.t0 = t0;
    tr.T = T;
    tr.n = n;

    std::vector<double> bps;
    for (const auto& row : A)
        for (const auto& s : row) {
            auto b = s.breakpoints();
            bps.insert(bps.end(), b.begin(), b.end());
        }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

    IntegratorOptions integ = opts.integ;
    integ.breakpoints = bps;

    auto rhs = [&](double t, const Vec& col, Vec& dcol) {
        dcol.setZero();
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += A[i][j].eval(t) * col[j];
            dcol[i] = acc;
        }
    };

    tr.columns.reserve(n);
    for (int j = 0; j < n; ++j) {
        Vec e = Vec::Zero(n);
        e[j] = 1.0;
        tr.columns.push_back(integrate(rhs, t0, e, T, integ));
    }

    // Piecewise-uniform grid segmented at interior breakpoints.
    std::vector<double> cuts{t0};
    for (double b : bps)
        if (b > t0 && b < T) cuts.push_back(b);
    cuts.push_back(T);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
        const double a = cuts[seg], b = cuts[seg + 1];
        const int steps = std::max(2, static_cast<int>(std::ceil((b - a) / opts.grid_dt)));
        tr.segment_starts.push_back(tr.times.size());
        for (int i = (seg == 0 ? 0 : 1); i <= steps; ++i) tr.times.push_back(a + (b - a) * i / steps);
    }

    const std::size_t m = tr.times.size();
    tr.w.resize(m);
    tr.sigma_max.resize(m);
    tr.sigma_min.resize(m);
    tr.p.assign(m, 0.0);
    tr.c.resize(m);
    std::vector<double> log_smax(m);
    for (std::size_t i = 0; i < m; ++i) {
        tr.w[i] = tr.w_at(tr.times[i]);
        Eigen::JacobiSVD<Mat> svd(tr.w[i]);
        tr.sigma_max[i] = svd.singularValues()(0);
        tr.sigma_min[i] = svd.singularValues()(n - 1);
        tr.c[i] = tr.sigma_min[i] > 0 ? tr.sigma_max[i] / tr.sigma_min[i]
                                      : std::numeric_limits<double>::infinity();
        log_smax[i] = std::log(tr.sigma_max[i]);
    }
    tr.c_hat = *std::max_element(tr.c.begin(), tr.c.end());
    tr.c_cap_exceeded = tr.c_hat > opts.c_cap;

    // p by finite differences of ln sigma_max, one-sided at horizon ends and
    // across breakpoints so no stencil straddles a discontinuity.
    std::vector<std::size_t> seg_bounds = tr.segment_starts;
    seg_bounds.push_back(m);
    for (std::size_t s = 0; s + 1 < seg_bounds.size(); ++s) {
        const std::size_t lo = seg_bounds[s], hi = seg_bounds[s + 1] - 1;
        for (std::size_t i = lo; i <= hi; ++i) {
            if (i == lo)
                tr.p[i] = (log_smax[i + 1] - log_smax[i]) / (tr.times[i + 1] - tr.times[i]);
            else if (i == hi)
                tr.p[i] = (log_smax[i] - log_smax[i - 1]) / (tr.times[i] - tr.times[i - 1]);
            else
                tr.p[i] = (log_smax[i + 1] - log_smax[i - 1]) / (tr.times[i + 1] - tr.times[i - 1]);
        }
    }

    tr.cum_p.resize(m);
    tr.cum_p[0] = 0.0;
    for (std::size_t i = 1; i < m; ++i)
        tr.cum_p[i] = tr.cum_p[i - 1] + 0.5 * (tr.p[i] + tr.p[i - 1]) * (tr.times[i] - tr.times[i - 1]);
    return tr;
}

double transition_norm(const FundamentalMatrixTrace& trace, double t, double s) {
    if (s > t) throw std::invalid_argument("transition_norm: requires s <= t");
    const Mat wt = trace.w_at(t);
    const Mat ws = trace.w_at(s);
    Eigen::JacobiSVD<Mat> svd_s(ws);
    const auto& sv = svd_s.singularValues();
    if (sv(trace.n - 1) < 1e-12 * sv(0))
        throw std::runtime_error("transition_norm: w(s) numerically singular");
    const Mat W = wt * ws.inverse();
    Eigen::JacobiSVD<Mat> svd(W);
    return svd.singularValues()(0);
}

ExponentEstimate exponent_estimate(const FundamentalMatrixTrace& trace) {
    ExponentEstimate est;
    const std::size_t m = trace.times.size();
    double sup_avg = -std::numeric_limits<double>::infinity();
    double sxx = 0, sxy = 0, sx = 0, sy = 0;
    std::size_t cnt = 0;
    for (std::size_t i = 1; i < m; ++i) {
        const double dt = trace.times[i] - trace.t0;
        sup_avg = std::max(sup_avg, trace.cum_p[i] / dt);
        const double y = std::log(trace.sigma_max[i]);
        sx += dt;
        sy += y;
        sxx += dt * dt;
        sxy += dt * y;
        ++cnt;
    }
    est.lambda_hat = -sup_avg;
    const double denom = cnt * sxx - sx * sx;
    const double slope = denom != 0 ? (cnt * sxy - sx * sy) / denom : 0.0;
    est.v1 = -slope;
    est.valid = est.v1 > 0;
    if (est.valid) {
        double n1 = 1.0;  // ||w(t0)|| = 1
        for (std::size_t i = 0; i < m; ++i)
            n1 = std::max(n1, trace.sigma_max[i] * std::exp(est.v1 * (trace.times[i] - trace.t0)));
        est.N1 = n1;
    }
    return est;
}

EnvelopeRecursion envelope_recursion(double v1, double N1, double l, double F0, double x0_norm, int k_max,
                                     const std::vector<double>& grid) {
    if (!(v1 > 0)) throw std::invalid_argument("envelope_recursion: v1 must be positive");
    if (k_max < 1 || grid.size() < 2) throw std::invalid_argument("envelope_recursion: bad arguments");
    EnvelopeRecursion out;
    out.grid = grid;
    out.certificate_value = l * N1 * F0 / v1;
    out.certificate = out.certificate_value < 1.0;

    const double t0 = grid.front();
    std::vector<double> cur(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        cur[i] = N1 * ((x0_norm - F0 / v1) * std::exp(-v1 * (grid[i] - t0)) + F0 / v1);
    out.curves.push_back(cur);

    for (int k = 2; k <= k_max; ++k) {
        std::vector<double> next(grid.size(), 0.0);
        // I(t_{i+1}) = e^{-v1 dt} I(t_i) + trapezoid increment of the
        // exponentially weighted integrand; stable for long horizons.
        double I = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double dt = grid[i] - grid[i - 1];
            const double decay = std::exp(-v1 * dt);
            I = decay * I + 0.5 * dt * (decay * cur[i - 1] + cur[i]);
            next[i] = N1 * l * I;
        }
        out.curves.push_back(next);
        cur = std::move(next);
    }
    return out;
}

}  // namespace tsr
