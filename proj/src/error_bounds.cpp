#include "tsr/error_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsr {

double tail_sup(const Trajectory& tr, double fraction) {
    const double span = tr.t_end() - tr.t0;
    const double start = tr.t_end() - fraction * span;
    double sup = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        if (tr.times[i] >= start) sup = std::max(sup, tr.states[i].norm());
    return sup;
}

double SampledFunction::at(double t) const {
    if (times.size() == 1) return values.front();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = (it == times.begin()) ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    if (i + 1 >= times.size()) i = times.size() - 2;
    const double th = std::clamp((t - times[i]) / (times[i + 1] - times[i]), 0.0, 1.0);
    return values[i] + th * (values[i + 1] - values[i]);
}

namespace {

/// Integrates a scalar comparison equation, mapping blow-up and near-pole
/// step collapse to `escaped`.
BoundTrace run_scalar(const Rhs& rhs, double t0, double z0, double T, ErrorBoundMode mode,
                      const ComparisonOptions& opts, const std::vector<double>& breakpoints) {
    IntegratorOptions integ = opts.integ;
    integ.breakpoints.insert(integ.breakpoints.end(), breakpoints.begin(), breakpoints.end());
    std::sort(integ.breakpoints.begin(), integ.breakpoints.end());

    BoundTrace out;
    out.mode = mode;
    Vec init(1);
    init[0] = z0;
    try {
        out.Z = integrate(rhs, t0, init, T, integ);
    } catch (const StepSizeUnderflow& e) {
        if (e.state_norm() >= opts.escape_guard) {
            // The comparison equation reached its pole: the controller
            // collapsed while the bound was already far above the region
            // scale. Same verdict as crossing the blow-up threshold.
            out.escaped = true;
            out.escape_time = e.t();
            Vec s(1);
            s[0] = e.state_norm();
            out.Z = Trajectory::from_samples({t0, e.t()}, {init, s}, {Vec::Zero(1), Vec::Zero(1)},
                                             TerminalStatus::BlowUp);
            return out;
        }
        throw;
    }
    if (out.Z.status == TerminalStatus::BlowUp) {
        out.escaped = true;
        out.escape_time = out.Z.t_end();
    } else {
        out.tail_sup = tail_sup(out.Z, opts.tail_fraction);
    }
    return out;
}

}  // namespace

BoundTrace norm_comparison_solve(const PolySystemModel& model, double t0, double x0_norm,
                                 const FundamentalMatrixTrace& trace, double T,
                                 const ComparisonOptions& opts) {
    if (x0_norm < 0) throw std::invalid_argument("norm_comparison_solve: negative initial norm");
    auto rhs = [&model, &trace](double t, const Vec& x, Vec& dx) {
        const NormBoundPolynomial L = field_norm_bound(model.f, t);
        const double s = std::max(x[0], 0.0);
        dx[0] = trace.p_at(t) * s + trace.c_at(t) * (L.eval(s) + model.forcing_norm_at(t));
    };
    return run_scalar(rhs, t0, x0_norm, T, ErrorBoundMode::NonlinearComparison, opts, model.breakpoints());
}

SampledFunction gamma_forcing(const PolySystemModel& model, const ApproximationStack& stack,
                              const FundamentalMatrixTrace& trace, const LipschitzConstants& lip,
                              bool conservative) {
    SampledFunction out;
    const auto& grid = stack.Ym.times;
    out.times = grid;
    out.values.resize(grid.size());
    const int m = stack.m;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const Vec ym = stack.y[m - 1].at(t);
        double jac_term;
        if (m == 1) {
            jac_term = 0.0;  // Y_0 = 0 and f' vanishes there (degree >= 2)
        } else {
            const Vec prev = stack.partial_sum_at(m - 1, t);
            jac_term = conservative ? lip.l3 * ym.norm() * prev.norm()
                                    : (model.f.jacobian(t, prev) * ym).norm();
        }
        out.values[i] = trace.c_at(t) * (lip.l2 * ym.norm() + jac_term);
    }
    return out;
}

BoundTrace solve_Z1(const PolySystemModel& model, const ApproximationStack& stack,
                    const FundamentalMatrixTrace& trace, const LipschitzConstants& lip,
                    const SampledFunction& gamma, const ComparisonOptions& opts) {
    const double t0 = stack.t0, T = stack.t_end;
    auto rhs = [&trace, &lip, &gamma](double t, const Vec& z, Vec& dz) {
        dz[0] = (trace.p_at(t) + trace.c_at(t) * lip.l2) * std::max(z[0], 0.0) + gamma.at(t);
    };
    BoundTrace out = run_scalar(rhs, t0, 0.0, T, ErrorBoundMode::LinearLipschitz, opts, model.breakpoints());
    if (out.escaped) return out;

    // Quadrature route: Z(t+dt) = E Z(t) + increment with the exponentially
    // weighted forcing integrated by Simpson on cells fine enough to sit
    // inside one linear piece of both the diagnostics and the Gamma samples.
    // Disagreement is reported relative to the bound's peak; pointwise ratios
    // at the tolerance floor carry no information.
    const auto& grid = stack.Ym.times;
    auto lam_at = [&](double t) { return trace.p_at(t) + trace.c_at(t) * lip.l2; };
    double zq = 0.0, max_abs = 0.0, peak = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        constexpr int kSub = 4;
        const double dt = (grid[i] - grid[i - 1]) / kSub;
        for (int s = 0; s < kSub; ++s) {
            const double a = grid[i - 1] + s * dt;
            const double b = a + dt;
            const double tm = 0.5 * (a + b);
            const double la = lam_at(a), lm = lam_at(tm), lb = lam_at(b);
            const double Ea = std::exp(dt / 6.0 * (la + 4 * lm + lb));
            const double Em = std::exp(dt / 12.0 * (lm + 4 * lam_at(a + 0.75 * dt) + lb));
            zq = Ea * zq + dt / 6.0 * (Ea * gamma.at(a) + 4 * Em * gamma.at(tm) + gamma.at(b));
        }
        const double zo = out.Z.value_at(grid[i]);
        peak = std::max({peak, std::abs(zq), std::abs(zo)});
        max_abs = std::max(max_abs, std::abs(zq - zo));
    }
    out.quadrature_rel_err = peak > 0 ? max_abs / peak : 0.0;
    return out;
}

namespace {

/// Shared coefficient builder for the nonlinear and linearized error
/// equations: the z-degree >= 1 bound comes from the shift expansion at the
/// interpolated partial sum, the z-free part from the scheme's exactly
/// evaluated residual.
struct ErrorEquationTerms {
    const PolySystemModel& model;
    const ApproximationStack& stack;
    ShiftExpansion shift;

    explicit ErrorEquationTerms(const PolySystemModel& mdl, const ApproximationStack& stk)
        : model(mdl), stack(stk), shift(mdl.f) {}

    /// Returns the norm-bound polynomial q with q(s) = gamma + Pi(s).
    NormBoundPolynomial at(double t) const {
        const int m = stack.m;
        const Vec ym = stack.y[m - 1].at(t);
        Vec prev;  // Y_{m-1}
        if (m == 1)
            prev = Vec::Zero(model.dim);
        else
            prev = stack.partial_sum_at(m - 1, t);
        const Vec u = prev + ym;  // Y_m
        NormBoundPolynomial q = shift.z_term_bound_at(t, u);
        Vec g0 = model.f.eval(t, u) - model.f.eval(t, prev);
        if (stack.scheme == Scheme::A && m >= 2) g0 -= model.f.jacobian(t, prev) * ym;
        q.coeff[0] = g0.lpNorm<1>();
        return q;
    }
};

}  // namespace

BoundTrace solve_Z2(const PolySystemModel& model, const ApproximationStack& stack,
                    const FundamentalMatrixTrace& trace, const ComparisonOptions& opts) {
    if (stack.divergent()) throw std::invalid_argument("solve_Z2: stack is divergent");
    ErrorEquationTerms terms(model, stack);
    auto rhs = [&terms, &trace](double t, const Vec& z, Vec& dz) {
        const NormBoundPolynomial q = terms.at(t);
        const double s = std::max(z[0], 0.0);
        dz[0] = trace.p_at(t) * s + trace.c_at(t) * (q.pi(s) + q.gamma());
    };
    return run_scalar(rhs, stack.t0, 0.0, stack.t_end, ErrorBoundMode::NonlinearComparison, opts,
                      model.breakpoints());
}

Z3Result solve_Z3(const PolySystemModel& model, const ApproximationStack& stack,
                  const FundamentalMatrixTrace& trace, const ComparisonOptions& opts) {
    if (stack.divergent()) throw std::invalid_argument("solve_Z3: stack is divergent");
    ErrorEquationTerms terms(model, stack);
    auto rhs = [&terms, &trace](double t, const Vec& z, Vec& dz) {
        const NormBoundPolynomial q = terms.at(t);
        dz[0] = (trace.p_at(t) + trace.c_at(t) * q.linear()) * std::max(z[0], 0.0) +
                trace.c_at(t) * q.gamma();
    };
    Z3Result out;
    out.trace = run_scalar(rhs, stack.t0, 0.0, stack.t_end, ErrorBoundMode::LinearizedComparison, opts,
                           model.breakpoints());

    // Finite-horizon exponent of the homogeneous part: max over the trailing
    // half of the running average of P1 = p + c D.
    const auto& grid = stack.Ym.times;
    double cum = 0.0;
    double prev = trace.p_at(grid[0]) + trace.c_at(grid[0]) * terms.at(grid[0]).linear();
    double lambda1 = -std::numeric_limits<double>::infinity();
    const double mid = stack.t0 + 0.5 * (stack.t_end - stack.t0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = trace.p_at(grid[i]) + trace.c_at(grid[i]) * terms.at(grid[i]).linear();
        cum += 0.5 * (cur + prev) * (grid[i] - grid[i - 1]);
        prev = cur;
        if (grid[i] >= mid) lambda1 = std::max(lambda1, cum / (grid[i] - stack.t0));
    }
    out.lambda1 = lambda1;
    return out;
}

std::pair<Trajectory, Trajectory> bilateral_bounds(const ApproximationStack& stack, const BoundTrace& bound) {
    const double z_end = bound.Z.t_end();
    std::vector<double> grid;
    for (double t : stack.Ym.times)
        if (t <= z_end + 1e-12) grid.push_back(t);
    std::vector<Vec> lo(grid.size()), hi(grid.size()), zero(grid.size(), Vec::Zero(1));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ym = stack.Ym.at(grid[i]).norm();
        const double z = std::max(bound.Z.value_at(std::min(grid[i], z_end)), 0.0);
        lo[i] = Vec::Constant(1, std::max(ym - z, 0.0));
        hi[i] = Vec::Constant(1, ym + z);
    }
    Trajectory lower = Trajectory::from_samples(grid, std::move(lo), zero);
    Trajectory upper = Trajectory::from_samples(std::move(grid), std::move(hi), std::move(zero));
    return {std::move(lower), std::move(upper)};
}

}  // namespace tsr
