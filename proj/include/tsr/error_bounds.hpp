#pragma once

#include "tsr/approx_engine.hpp"
#include "tsr/linear_analysis.hpp"
#include "tsr/polyfield.hpp"

#include <algorithm>

namespace tsr {

enum class ErrorBoundMode { LinearLipschitz, NonlinearComparison, LinearizedComparison };

/// Scalar error-bound trace Z(t) with Z(t0) = 0. `escaped` marks finite-time
/// blow-up of the comparison equation (including step-size collapse at the
/// pole with a large state, which is the same event numerically).
struct BoundTrace {
    Trajectory Z;
    ErrorBoundMode mode = ErrorBoundMode::NonlinearComparison;
    bool escaped = false;
    double escape_time = 0.0;
    double tail_sup = 0.0;           // sup over the trailing fraction of the horizon
    double quadrature_rel_err = 0.0; // Z1 only: ODE vs quadrature route disagreement

    /// Published bound value; negative integration wobble around the zero
    /// solution is clamped away.
    double at(double t) const { return std::max(Z.value_at(t), 0.0); }
};

/// Sup of the scalar trace over the trailing `fraction` of its span.
double tail_sup(const Trajectory& tr, double fraction = 0.25);

struct ComparisonOptions {
    IntegratorOptions integ{};
    double escape_guard = 1e3;  // step underflow above this norm counts as escape
    double tail_fraction = 0.25;
};

/// Upper bound on ||x(t, x0)||: X' = p X + c (L(t, X) + ||F||), X(t0) = ||x0||.
BoundTrace norm_comparison_solve(const PolySystemModel& model, double t0, double x0_norm,
                                 const FundamentalMatrixTrace& trace, double T,
                                 const ComparisonOptions& opts = {});

/// Sampled forcing of the linear error equation:
/// Gamma(t) = c(t) (l2 ||y_m(t)|| + ||f'(t, Y_{m-1}) y_m(t)||).
/// `conservative` replaces the exact Jacobian product norm by l3 ||y_m|| ||Y_{m-1}||.
struct SampledFunction {
    std::vector<double> times;
    std::vector<double> values;
    double at(double t) const;
};

SampledFunction gamma_forcing(const PolySystemModel& model, const ApproximationStack& stack,
                              const FundamentalMatrixTrace& trace, const LipschitzConstants& lip,
                              bool conservative = false);

/// Z1' = (p + c l2) Z1 + Gamma, Z1(t0) = 0, solved by both the ODE route and
/// the exponential-weight quadrature; their disagreement is recorded.
BoundTrace solve_Z1(const PolySystemModel& model, const ApproximationStack& stack,
                    const FundamentalMatrixTrace& trace, const LipschitzConstants& lip,
                    const SampledFunction& gamma, const ComparisonOptions& opts = {});

/// Z2' = p Z2 + c Pi(t, Z2) + c gamma(t), Z2(t0) = 0 with the norm-bound
/// polynomial rebuilt from the shift expansion at interpolated stack values.
BoundTrace solve_Z2(const PolySystemModel& model, const ApproximationStack& stack,
                    const FundamentalMatrixTrace& trace, const ComparisonOptions& opts = {});

struct Z3Result {
    BoundTrace trace;
    double lambda1 = 0.0;  // tail estimate of the averaged exponent of P1 = p + c D
};

/// Drops the superlinear part of the norm-bound polynomial:
/// Z3' = (p + c D(t)) Z3 + c gamma(t). lambda1 < 0 marks decay.
Z3Result solve_Z3(const PolySystemModel& model, const ApproximationStack& stack,
                  const FundamentalMatrixTrace& trace, const ComparisonOptions& opts = {});

/// lower = max(||Y_m|| - Z, 0), upper = ||Y_m|| + Z on the stack's shared grid.
std::pair<Trajectory, Trajectory> bilateral_bounds(const ApproximationStack& stack, const BoundTrace& bound);

}  // namespace tsr
