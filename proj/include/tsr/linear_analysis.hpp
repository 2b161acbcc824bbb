#pragma once

#include "tsr/odeint.hpp"
#include "tsr/signals.hpp"

#include <vector>

namespace tsr {

/// Fundamental matrix w(t) of x' = A(t) x with w(t0) = I, sampled on a
/// piecewise-uniform grid (segmented at coefficient breakpoints), together
/// with the scalar diagnostics p(t) = d ln||w||/dt and the running condition
/// number c(t).
struct FundamentalMatrixTrace {
    double t0 = 0.0;
    double T = 0.0;
    int n = 0;
    std::vector<double> times;
    std::vector<Mat> w;
    std::vector<double> sigma_max, sigma_min, p, c;
    std::vector<double> cum_p;  // trapezoid cumulative of p from t0
    double c_hat = 1.0;         // max of c samples
    bool c_cap_exceeded = false;
    std::vector<Trajectory> columns;  // dense column solutions
    std::vector<std::size_t> segment_starts;  // first grid index of each segment

    double p_at(double t) const;
    double c_at(double t) const;
    double cum_p_at(double t) const;
    Mat w_at(double t) const;
    double w_norm_at(double t) const;

  private:
    std::size_t locate(double t) const;
    double interp(const std::vector<double>& v, double t) const;
};

struct TraceOptions {
    double grid_dt = 0.0025;
    double c_cap = 1e4;  // exceeding flags the bounded-condition-number assumption
    IntegratorOptions integ{};
};

FundamentalMatrixTrace fundamental_matrix(const std::vector<std::vector<TimeSignal>>& A, double t0, double T,
                                          const TraceOptions& opts = {});

/// ||w(t) w(s)^{-1}|| via interpolated matrices; t0 <= s <= t <= T.
double transition_norm(const FundamentalMatrixTrace& trace, double t, double s);

struct ExponentEstimate {
    double lambda_hat = 0.0;  // decay rate: -sup of running average of p
    double v1 = 0.0;          // fitted envelope rate
    double N1 = 1.0;          // envelope amplitude, inflated to dominate all samples
    bool valid = false;       // v1 > 0
};

ExponentEstimate exponent_estimate(const FundamentalMatrixTrace& trace);

/// Envelope curves of the level-sum recursion driven by the fitted
/// exponential bound: curve 1 is the forced linear envelope, each next curve
/// is N1 * l * convolution with exp(-v1 dt) on the grid.
struct EnvelopeRecursion {
    std::vector<double> grid;
    std::vector<std::vector<double>> curves;  // curves[k-1] = envelope of level k
    double certificate_value = 0.0;           // l * N1 * F0 / v1
    bool certificate = false;                 // certificate_value < 1
};

EnvelopeRecursion envelope_recursion(double v1, double N1, double l, double F0, double x0_norm, int k_max,
                                     const std::vector<double>& grid);

}  // namespace tsr
