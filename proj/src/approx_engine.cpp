#include "tsr/approx_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsr {

Vec ApproximationStack::partial_sum_at(int k, double t) const {
    Vec acc = y[0].at(t);
    for (int i = 2; i <= k; ++i) acc += y[i - 1].at(t);
    return acc;
}

namespace {

IntegratorOptions with_model_breakpoints(const PolySystemModel& model, IntegratorOptions opts) {
    auto bps = model.breakpoints();
    opts.breakpoints.insert(opts.breakpoints.end(), bps.begin(), bps.end());
    std::sort(opts.breakpoints.begin(), opts.breakpoints.end());
    opts.breakpoints.erase(std::unique(opts.breakpoints.begin(), opts.breakpoints.end()),
                           opts.breakpoints.end());
    return opts;
}

}  // namespace

ApproximationStack run_scheme(const PolySystemModel& model, const ApproximationConfig& cfg) {
    if (cfg.m < 1) throw std::invalid_argument("run_scheme: m must be >= 1");
    if (cfg.m > cfg.max_levels) throw std::invalid_argument("run_scheme: m exceeds the level cap");
    if (!(cfg.horizon > 0)) throw std::invalid_argument("run_scheme: horizon must be positive");
    if (static_cast<int>(cfg.x0.size()) != model.dim)
        throw std::invalid_argument("run_scheme: x0 dimension mismatch");
    const double T = cfg.t0 + cfg.horizon;
    model.validate(cfg.t0, T);

    const IntegratorOptions integ = with_model_breakpoints(model, cfg.integ);

    ApproximationStack stack;
    stack.scheme = cfg.scheme;
    stack.m = cfg.m;
    stack.t0 = cfg.t0;

    double t_end = T;
    for (int k = 1; k <= cfg.m; ++k) {
        Rhs rhs;
        if (k == 1) {
            rhs = [&model](double t, const Vec& v, Vec& dv) {
                dv = model.A_at(t) * v + model.forcing_at(t);
            };
        } else if (cfg.scheme == Scheme::A) {
            if (k == 2) {
                const Trajectory& y1 = stack.y[0];
                rhs = [&model, &y1](double t, const Vec& v, Vec& dv) {
                    const Vec ref = y1.at(t);
                    dv = (model.A_at(t) + model.f.jacobian(t, ref)) * v + model.f.eval(t, ref);
                };
            } else {
                const ApproximationStack& s = stack;
                const int kk = k;
                rhs = [&model, &s, kk](double t, const Vec& v, Vec& dv) {
                    const Vec prev2 = s.partial_sum_at(kk - 2, t);
                    const Vec prev1 = prev2 + s.y[kk - 2].at(t);
                    dv = (model.A_at(t) + model.f.jacobian(t, prev1)) * v + model.f.eval(t, prev1) -
                         model.f.eval(t, prev2) - model.f.jacobian(t, prev2) * s.y[kk - 2].at(t);
                };
            }
        } else {  // Scheme B
            if (k == 2) {
                const Trajectory& y1 = stack.y[0];
                rhs = [&model, &y1](double t, const Vec& v, Vec& dv) {
                    dv = model.A_at(t) * v + model.f.eval(t, y1.at(t));
                };
            } else {
                const ApproximationStack& s = stack;
                const int kk = k;
                rhs = [&model, &s, kk](double t, const Vec& v, Vec& dv) {
                    const Vec prev2 = s.partial_sum_at(kk - 2, t);
                    const Vec prev1 = prev2 + s.y[kk - 2].at(t);
                    dv = model.A_at(t) * v + model.f.eval(t, prev1) - model.f.eval(t, prev2);
                };
            }
        }
        const Vec init = (k == 1) ? cfg.x0 : Vec(Vec::Zero(model.dim));
        Trajectory yk = integrate(rhs, cfg.t0, init, t_end, integ);
        const bool blew = (yk.status == TerminalStatus::BlowUp);
        t_end = yk.t_end();
        stack.y.push_back(std::move(yk));
        if (blew) {
            stack.divergent_level = k;
            break;
        }
    }
    stack.t_end = t_end;

    // Shared-grid sum with derivatives accumulated from the level interpolants.
    const int steps = std::max(2, static_cast<int>(std::ceil((t_end - cfg.t0) / cfg.shared_grid_dt)));
    std::vector<double> grid(steps + 1);
    std::vector<Vec> sums(steps + 1), dsums(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        const double t = cfg.t0 + (t_end - cfg.t0) * i / steps;
        grid[i] = t;
        Vec s = Vec::Zero(model.dim), ds = Vec::Zero(model.dim);
        for (const auto& yk : stack.y) {
            s += yk.at(t);
            ds += yk.deriv_at(t);
        }
        sums[i] = std::move(s);
        dsums[i] = std::move(ds);
    }
    stack.Ym = Trajectory::from_samples(std::move(grid), std::move(sums), std::move(dsums),
                                        stack.divergent() ? TerminalStatus::BlowUp : TerminalStatus::Completed);
    return stack;
}

Trajectory direct_solve(const PolySystemModel& model, double t0, const Vec& x0, double T,
                        const IntegratorOptions& opts) {
    model.validate(t0, T);
    const IntegratorOptions integ = with_model_breakpoints(model, opts);
    auto rhs = [&model](double t, const Vec& x, Vec& dx) {
        dx = model.A_at(t) * x + model.f.eval(t, x) + model.forcing_at(t);
    };
    return integrate(rhs, t0, x0, T, integ);
}

Trajectory direct_error(const PolySystemModel& model, const ApproximationStack& stack,
                        const IntegratorOptions& opts) {
    if (stack.divergent()) throw std::invalid_argument("direct_error: stack is divergent");
    const IntegratorOptions integ = with_model_breakpoints(model, opts);
    const int m = stack.m;
    Rhs rhs;
    if (m == 1) {
        rhs = [&model, &stack](double t, const Vec& z, Vec& dz) {
            const Vec y1 = stack.y[0].at(t);
            dz = model.A_at(t) * z + model.f.eval(t, z + y1);
        };
    } else if (stack.scheme == Scheme::A) {
        rhs = [&model, &stack, m](double t, const Vec& z, Vec& dz) {
            const Vec prev = stack.partial_sum_at(m - 1, t);
            const Vec ym = stack.y[m - 1].at(t);
            dz = model.A_at(t) * z + model.f.eval(t, z + prev + ym) - model.f.eval(t, prev) -
                 model.f.jacobian(t, prev) * ym;
        };
    } else {
        rhs = [&model, &stack, m](double t, const Vec& z, Vec& dz) {
            const Vec prev = stack.partial_sum_at(m - 1, t);
            const Vec ym = stack.y[m - 1].at(t);
            dz = model.A_at(t) * z + model.f.eval(t, z + prev + ym) - model.f.eval(t, prev);
        };
    }
    return integrate(rhs, stack.t0, Vec::Zero(model.dim), stack.t_end, integ);
}

}  // namespace tsr
