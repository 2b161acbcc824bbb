#pragma once

#include "tsr/odeint.hpp"
#include "tsr/polyfield.hpp"

namespace tsr {

/// Scheme A: level k >= 2 carries the Jacobian of f at the previous partial
/// sum inside its linear block. Scheme B: every level keeps the bare A(t)
/// block, so one transition matrix serves all levels.
enum class Scheme { A, B };

inline const char* scheme_name(Scheme s) { return s == Scheme::A ? "A" : "B"; }

struct ApproximationConfig {
    Scheme scheme = Scheme::A;
    int m = 1;
    double t0 = 0.0;
    Vec x0;
    double horizon = 40.0;  // T = t0 + horizon
    IntegratorOptions integ{};
    double shared_grid_dt = 0.01;  // sampling of the summed trajectory
    int max_levels = 8;
};

/// Levels y_1..y_m plus their sum on a shared grid. Immutable once built.
struct ApproximationStack {
    Scheme scheme = Scheme::A;
    int m = 0;
    double t0 = 0.0;
    double t_end = 0.0;  // common horizon of all levels
    std::vector<Trajectory> y;
    Trajectory Ym;           // sum of levels, resampled on the shared grid
    int divergent_level = 0;  // 0 = completed; otherwise first level that blew up

    bool divergent() const { return divergent_level > 0; }
    Vec y_at(int level, double t) const { return y[level - 1].at(t); }
    /// Partial sum y_1 + ... + y_k at t.
    Vec partial_sum_at(int k, double t) const;
};

ApproximationStack run_scheme(const PolySystemModel& model, const ApproximationConfig& cfg);

Trajectory direct_solve(const PolySystemModel& model, double t0, const Vec& x0, double T,
                        const IntegratorOptions& opts = {});

/// Integrates the exact error system for z = x - Y_m with the stack's levels
/// supplying the reference coefficients by dense interpolation.
Trajectory direct_error(const PolySystemModel& model, const ApproximationStack& stack,
                        const IntegratorOptions& opts = {});

}  // namespace tsr
