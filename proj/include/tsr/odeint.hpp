#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

namespace tsr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class TerminalStatus { Completed, BlowUp };

/// Thrown when the adaptive step controller would shrink the step below the
/// machine-feasible minimum (stiffness or a singularity in the rhs).
class StepSizeUnderflow : public std::runtime_error {
  public:
    StepSizeUnderflow(double t, double state_norm)
        : std::runtime_error("step size underflow at t=" + std::to_string(t)),
          t_(t),
          state_norm_(state_norm) {}
    double t() const { return t_; }
    double state_norm() const { return state_norm_; }

  private:
    double t_;
    double state_norm_;
};

/// Densely sampled solution with continuous extension between accepted steps.
/// Either built by the integrator (quartic continuous extension of the
/// embedded pair) or resampled from other trajectories (cubic Hermite).
class Trajectory {
  public:
    double t0 = 0.0;
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> derivs;
    TerminalStatus status = TerminalStatus::Completed;

    int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
    double t_end() const { return times.back(); }
    double blowup_time() const { return t_end(); }

    Vec at(double t) const;
    Vec deriv_at(double t) const;
    double norm_at(double t) const { return at(t).norm(); }
    /// Scalar access for 1-D traces.
    double value_at(double t) const { return at(t)[0]; }

    /// Builds a trajectory from external samples; interpolation falls back to
    /// cubic Hermite on the sample grid.
    static Trajectory from_samples(std::vector<double> times, std::vector<Vec> states, std::vector<Vec> derivs,
                                   TerminalStatus status = TerminalStatus::Completed);

  private:
    friend Trajectory integrate(const std::function<void(double, const Vec&, Vec&)>&, double, Vec, double,
                                const struct IntegratorOptions&);
    // Per-interval quartic coefficients (empty when Hermite resampling is used).
    std::vector<std::array<Vec, 5>> dense_;

    std::size_t locate(double t) const;
};

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;  // 0 = no cap
    double blowup_threshold = 1e6;
    std::vector<double> breakpoints;  // rhs discontinuity times; steps never straddle them
    double initial_step = 0.0;  // 0 = automatic
    long max_steps = 20'000'000;
};

using Rhs = std::function<void(double t, const Vec& x, Vec& dxdt)>;

/// Adaptive embedded Runge-Kutta 5(4) with PI step control, dense output and
/// blow-up detection. The trajectory ends at min(T, blow-up time).
Trajectory integrate(const Rhs& rhs, double t0, Vec x0, double T, const IntegratorOptions& opts = {});

}  // namespace tsr
