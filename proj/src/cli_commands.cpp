#include "tsr/cli_commands.hpp"

#include "tsr/csv.hpp"
#include "tsr/error_bounds.hpp"
#include "tsr/signals.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>

namespace tsr {

namespace fs = std::filesystem;

PolySystemModel resolve_model(const RunConfig& cfg) {
    if (!cfg.preset.empty()) {
        PresetOverrides ov;
        ov.f0 = cfg.f0;
        ov.alpha1 = cfg.alpha1;
        ov.alpha2 = cfg.alpha2;
        ov.nu = cfg.nu;
        return make_preset(cfg.preset, ov).model;
    }
    const auto& im = *cfg.inline_model;
    PolySystemModel m;
    m.dim = im.dim;
    m.A.resize(im.dim);
    for (int i = 0; i < im.dim; ++i) {
        m.A[i].resize(im.dim);
        for (int j = 0; j < im.dim; ++j)
            m.A[i][j] = im.a_text[i][j].empty() ? TimeSignal::constant(0.0)
                                                : TimeSignal::parse(im.a_text[i][j]);
    }
    m.f = PolyVectorField(im.dim);
    for (const auto& mono : im.monomials) {
        if (mono.component < 1 || mono.component > im.dim)
            throw std::invalid_argument("inline model: component index out of range");
        m.f.add_term(mono.component - 1, TimeSignal::parse(mono.coeff_text), mono.exponents);
    }
    m.F0 = cfg.f0.value_or(im.f0);
    m.eta.resize(im.dim);
    for (int i = 0; i < im.dim; ++i) m.eta[i] = TimeSignal::parse(im.eta_text[i]);
    return m;
}

std::pair<double, double> resolve_bracket(const RunConfig& cfg) {
    double lo = 1e-3, hi = 1.0;
    if (!cfg.preset.empty()) {
        const Preset p = make_preset(cfg.preset);
        lo = p.r_lo;
        hi = p.r_hi;
    }
    if (cfg.r_lo) lo = *cfg.r_lo;
    if (cfg.r_hi) hi = *cfg.r_hi;
    if (!(lo < hi)) throw std::invalid_argument("region bracket requires r_lo < r_hi");
    return {lo, hi};
}

RegionMethod parse_method(const std::string& token, Scheme scheme) {
    RegionMethod m;
    m.scheme = scheme;
    auto level = [&](const std::string& t, std::size_t prefix) {
        if (t.size() <= prefix) return 1;
        return std::stoi(t.substr(prefix + 1));
    };
    if (token == "reference") {
        m.kind = RegionMethod::Kind::ReferenceDirect;
    } else if (token.rfind("z2", 0) == 0) {
        m.kind = RegionMethod::Kind::ComparisonZ2;
        m.m = level(token, 2);
    } else if (token.rfind("z3", 0) == 0) {
        m.kind = RegionMethod::Kind::LinearizedZ3;
        m.m = level(token, 2);
    } else if (token.rfind("heuristic", 0) == 0) {
        m.kind = RegionMethod::Kind::TwoMaximaHeuristic;
        m.m = level(token, 9);
    } else {
        throw std::invalid_argument("unknown region method '" + token + "'");
    }
    if (m.m < 1 || m.m > 8) throw std::invalid_argument("region method level out of range in '" + token + "'");
    return m;
}

namespace {

IntegratorOptions integrator_options(const RunConfig& cfg) {
    IntegratorOptions o;
    o.rel_tol = cfg.rel_tol;
    o.abs_tol = cfg.abs_tol;
    o.max_step = cfg.max_step;
    o.blowup_threshold = cfg.blowup_threshold;
    return o;
}

RegionQuery region_query(const RunConfig& cfg, const RegionMethod& method) {
    RegionQuery q;
    q.t0 = cfg.t0;
    q.horizon = cfg.horizon;
    q.n_directions = cfg.directions;
    std::tie(q.r_lo, q.r_hi) = resolve_bracket(cfg);
    q.bisect_tol = cfg.bisect_tol;
    q.method = method;
    q.params.trap_eps = cfg.trap_eps;
    q.params.trap_factor = cfg.trap_factor;
    q.integ = integrator_options(cfg);
    q.workers = cfg.workers;
    return q;
}

class Manifest {
  public:
    Manifest(std::string out_dir, const RunConfig& cfg)
        : out_dir_(std::move(out_dir)),
          config_hash_(fnv1a64_hex(cfg.serialize())),
          start_(std::chrono::steady_clock::now()) {}

    void add(const std::string& path) { files_.push_back(path); }

    /// Written only after every output landed; a failed run leaves no manifest.
    void write() const {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        nlohmann::ordered_json header{{"schema", 1},
                                      {"config_hash", config_hash_},
                                      {"version", kToolkitVersion},
                                      {"wall_time_s", wall}};
        std::ofstream out(fs::path(out_dir_) / "manifest.jsonl", std::ios::binary);
        if (!out) throw IoError("cannot open manifest for writing");
        out << header.dump() << '\n';
        for (const auto& f : files_) {
            const std::string bytes = read_file(f);
            nlohmann::ordered_json row{{"file", fs::path(f).filename().string()},
                                       {"bytes", bytes.size()},
                                       {"fnv64", fnv1a64_hex(bytes)}};
            out << row.dump() << '\n';
        }
        out.close();
        if (out.fail()) throw IoError("failed to write manifest");
    }

  private:
    std::string out_dir_;
    std::string config_hash_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> files_;
};


/// Column value for a trace that may have escaped: past its end the bound is
/// reported as +inf (the comparison value after finite-time escape).
double bound_col(const BoundTrace& b, double t) {
    if (t <= b.Z.t_end() + 1e-12) return b.at(std::min(t, b.Z.t_end()));
    return std::numeric_limits<double>::infinity();
}

double norm_col(const Trajectory& tr, double t) {
    if (t <= tr.t_end() + 1e-12) return tr.norm_at(std::min(t, tr.t_end()));
    return tr.status == TerminalStatus::BlowUp ? std::numeric_limits<double>::infinity() : 0.0;
}

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

Vec config_x0(const RunConfig& cfg, int dim) {
    if (static_cast<int>(cfg.x0.size()) != dim)
        throw std::invalid_argument("x0 dimension does not match the model");
    Vec x(dim);
    for (int i = 0; i < dim; ++i) x[i] = cfg.x0[i];
    return x;
}

ApproximationStack build_stack(const PolySystemModel& model, const RunConfig& cfg) {
    ApproximationConfig ac;
    ac.scheme = cfg.scheme;
    ac.m = cfg.m;
    ac.t0 = cfg.t0;
    ac.x0 = config_x0(cfg, model.dim);
    ac.horizon = cfg.horizon;
    ac.integ = integrator_options(cfg);
    return run_scheme(model, ac);
}

/// Lipschitz ball radius for the linear error machinery: covers the range the
/// error argument can visit, inferred from the computed traces.
double lipschitz_ball_radius(const ApproximationStack& stack, const BoundTrace& z2) {
    double sup = 0.0;
    for (std::size_t i = 0; i < stack.Ym.times.size(); ++i) {
        const double t = stack.Ym.times[i];
        double v = stack.Ym.states[i].norm();
        if (!z2.escaped) v += std::max(z2.Z.value_at(std::min(t, z2.Z.t_end())), 0.0);
        sup = std::max(sup, v);
    }
    return std::max(1.5 * sup, 1e-6);
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
    const PolySystemModel model = resolve_model(cfg);
    const double T = cfg.t0 + cfg.horizon;
    const IntegratorOptions integ = integrator_options(cfg);

    const ApproximationStack stack = build_stack(model, cfg);
    TraceOptions topt;
    const FundamentalMatrixTrace trace = fundamental_matrix(model.A, cfg.t0, T, topt);
    ComparisonOptions copts;
    copts.integ = integ;
    const BoundTrace z2 = solve_Z2(model, stack, trace, copts);
    const Trajectory x = direct_solve(model, cfg.t0, config_x0(cfg, model.dim), T, integ);
    const Trajectory z_direct = stack.divergent() ? Trajectory{} : direct_error(model, stack, integ);
    const auto [lower, upper] = bilateral_bounds(stack, z2);

    Manifest manifest(out_dir, cfg);
    {
        const std::string path = out_path(out_dir, "simulate.csv");
        CsvWriter csv(path, {"t", "x_direct_norm", "Ym_norm", "lower", "upper", "Z2"});
        for (double t : stack.Ym.times) {
            const double zv = bound_col(z2, t);
            const double ym = stack.Ym.norm_at(t);
            const double lo = std::isinf(zv) ? 0.0 : lower.value_at(std::min(t, lower.t_end()));
            const double hi = std::isinf(zv) ? zv : upper.value_at(std::min(t, upper.t_end()));
            csv.write_row({t, norm_col(x, t), ym, lo, hi, zv});
        }
        csv.close();
        manifest.add(path);
    }
    {
        const std::string path = out_path(out_dir, "levels.csv");
        std::vector<std::string> header{"t"};
        for (int k = 1; k <= stack.m; ++k) header.push_back("y" + std::to_string(k) + "_norm");
        header.push_back("Ym_norm");
        header.push_back("z_direct_norm");
        CsvWriter csv(path, header);
        const double z_end = stack.divergent() ? stack.t_end : z_direct.t_end();
        for (double t : stack.Ym.times) {
            std::vector<double> row{t};
            for (const auto& yk : stack.y) row.push_back(yk.norm_at(std::min(t, yk.t_end())));
            row.push_back(stack.Ym.norm_at(t));
            row.push_back(stack.divergent() ? 0.0 : z_direct.norm_at(std::min(t, z_end)));
            csv.write_row(row);
        }
        csv.close();
        manifest.add(path);
    }
    manifest.write();
    if (z2.escaped) std::cout << "note: Z2 escaped at t=" << z2.escape_time << "\n";
    return 0;
}

int cmd_bounds(const RunConfig& cfg, const std::string& out_dir) {
    const PolySystemModel model = resolve_model(cfg);
    const double T = cfg.t0 + cfg.horizon;
    const IntegratorOptions integ = integrator_options(cfg);

    const ApproximationStack stack = build_stack(model, cfg);
    TraceOptions topt;
    const FundamentalMatrixTrace trace = fundamental_matrix(model.A, cfg.t0, T, topt);
    ComparisonOptions copts;
    copts.integ = integ;

    const BoundTrace z2 = solve_Z2(model, stack, trace, copts);
    const Z3Result z3 = solve_Z3(model, stack, trace, copts);
    const double radius = lipschitz_ball_radius(stack, z2);
    const LipschitzConstants lip = lipschitz_constants(model.f, radius, cfg.t0, T);
    const SampledFunction gamma = gamma_forcing(model, stack, trace, lip);
    const BoundTrace z1 = solve_Z1(model, stack, trace, lip, gamma, copts);
    const Trajectory x = direct_solve(model, cfg.t0, config_x0(cfg, model.dim), T, integ);
    const auto [lower, upper] = bilateral_bounds(stack, z2);

    Manifest manifest(out_dir, cfg);
    {
        const std::string path = out_path(out_dir, "bounds.csv");
        CsvWriter csv(path, {"t", "Z1", "Z2", "Z3", "lower", "upper", "Ym_norm", "x_direct_norm"});
        for (double t : stack.Ym.times) {
            const double zv = bound_col(z2, t);
            const double lo = std::isinf(zv) ? 0.0 : lower.value_at(std::min(t, lower.t_end()));
            const double hi = std::isinf(zv) ? zv : upper.value_at(std::min(t, upper.t_end()));
            csv.write_row({t, bound_col(z1, t), zv, bound_col(z3.trace, t), lo, hi,
                           stack.Ym.norm_at(t), norm_col(x, t)});
        }
        csv.close();
        manifest.add(path);
    }
    {
        const std::string path = out_path(out_dir, "fundamental.csv");
        CsvWriter csv(path, {"t", "w_norm", "p", "c"});
        for (std::size_t i = 0; i < trace.times.size(); ++i)
            csv.write_row({trace.times[i], trace.sigma_max[i], trace.p[i], trace.c[i]});
        csv.close();
        manifest.add(path);
    }
    manifest.write();
    std::cout << "lambda1=" << format_double(z3.lambda1)
              << " z1_quadrature_rel_err=" << format_double(z1.quadrature_rel_err) << "\n";
    for (const auto& [name, b] : {std::pair<const char*, const BoundTrace&>{"Z1", z1},
                                  {"Z2", z2},
                                  {"Z3", z3.trace}})
        if (b.escaped) std::cout << "note: " << name << " escaped at t=" << format_double(b.escape_time) << "\n";
    return 0;
}

namespace {

void write_region_csv(const std::string& path, const RegionEstimate& est) {
    CsvWriter csv(path, {"direction_angle", "threshold_radius", "method", "t0", "flags"});
    for (const auto& d : est.directions)
        csv.write_mixed_row({format_double(d.angle), format_double(d.threshold), est.method.name(),
                             format_double(est.t0), direction_flag_name(d.flag)});
    csv.close();
}

}  // namespace

int cmd_region(const RunConfig& cfg, const std::string& out_dir) {
    const PolySystemModel model = resolve_model(cfg);
    RegionEstimator estimator(model);

    Manifest manifest(out_dir, cfg);
    std::size_t total = 0, failed = 0;
    for (const auto& token : cfg.methods) {
        const RegionMethod method = parse_method(token, cfg.scheme);
        const RegionQuery query = region_query(cfg, method);
        const RegionEstimate est = estimator.estimate_region(query);
        const std::string path = out_path(out_dir, "region_" + method.name() + ".csv");
        write_region_csv(path, est);
        manifest.add(path);
        for (const auto& d : est.directions) {
            ++total;
            if (d.flag != DirectionFlag::Ok) ++failed;
        }
    }
    manifest.write();
    if (failed) std::cout << "note: " << failed << "/" << total << " directions flagged\n";
    return failed == total && total > 0 ? 2 : 0;
}

int cmd_sweep_t0(const RunConfig& cfg, const std::string& out_dir) {
    const PolySystemModel model = resolve_model(cfg);
    RegionEstimator estimator(model);
    if (cfg.methods.empty()) throw std::invalid_argument("sweep-t0: no region method configured");
    const RegionMethod method = parse_method(cfg.methods.front(), cfg.scheme);
    const RegionQuery query = region_query(cfg, method);
    const auto estimates = estimator.sweep_t0(query, cfg.sweep_t0_values);

    Manifest manifest(out_dir, cfg);
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const std::string path =
            out_path(out_dir, "region_" + method.name() + "_t0idx" + std::to_string(i) + ".csv");
        write_region_csv(path, estimates[i]);
        manifest.add(path);
    }
    {
        std::vector<std::string> header{"direction_angle"};
        for (std::size_t i = 0; i < estimates.size(); ++i)
            header.push_back("r_t0_" + format_double(cfg.sweep_t0_values[i]));
        for (std::size_t i = 1; i < estimates.size(); ++i)
            header.push_back("ratio_t0_" + format_double(cfg.sweep_t0_values[i]));
        const std::string path = out_path(out_dir, "sweep_ratios.csv");
        CsvWriter csv(path, header);
        const std::size_t n_dirs = estimates.empty() ? 0 : estimates.front().directions.size();
        for (std::size_t d = 0; d < n_dirs; ++d) {
            std::vector<double> row{estimates.front().directions[d].angle};
            for (const auto& est : estimates) row.push_back(est.directions[d].threshold);
            const double base = estimates.front().directions[d].threshold;
            for (std::size_t i = 1; i < estimates.size(); ++i)
                row.push_back(base > 0 ? estimates[i].directions[d].threshold / base : 0.0);
            csv.write_row(row);
        }
        csv.close();
        manifest.add(path);
    }
    manifest.write();
    return 0;
}

int run_selfcheck(double rel_tol_override) {
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail = {}) {
        std::cout << (ok ? "PASS " : "FAIL ") << name;
        if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!ok) ++failures;
    };
    // A check that cannot even run (for instance a corrupted tolerance makes
    // the stack diverge) counts as failed, not as a crash.
    auto guarded = [&](const std::string& name, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            report(name, false, e.what());
        }
    };

    IntegratorOptions integ;
    integ.rel_tol = rel_tol_override > 0 ? rel_tol_override : 1e-8;
    integ.abs_tol = rel_tol_override > 0 ? rel_tol_override : 1e-10;

    // Pulse convention.
    guarded("signals.pulse-convention", [&] {
        const TimeSignal pulse = TimeSignal::pulse(-2.0, M_PI / 2);
        report("signals.pulse-convention", pulse.eval(0.0) == -2.0 && pulse.eval(2.0) == 0.0);
    });

    // Linear model: every level beyond the first vanishes.
    guarded("approx.linear-model-collapse", [&] {
        Preset p = make_preset("vanderpol-8.1");
        p.model.f = PolyVectorField(2);
        bool ok = true;
        for (Scheme scheme : {Scheme::A, Scheme::B}) {
            ApproximationConfig ac;
            ac.scheme = scheme;
            ac.m = 3;
            ac.x0 = Vec(2);
            ac.x0 << 0.1, -0.05;
            ac.horizon = 5.0;
            ac.integ = integ;
            const ApproximationStack stack = run_scheme(p.model, ac);
            for (int k = 2; k <= 3; ++k)
                for (const auto& s : stack.y[k - 1].states) ok = ok && s.norm() < 1e-12;
        }
        report("approx.linear-model-collapse", ok);
    });

    // Constant contraction diagnostics: p = -1, c = 1.
    guarded("linear.contraction-diagnostics", [&] {
        std::vector<std::vector<TimeSignal>> A{
            {TimeSignal::constant(-1.0), TimeSignal::constant(0.0)},
            {TimeSignal::constant(0.0), TimeSignal::constant(-1.0)}};
        TraceOptions topt;
        const FundamentalMatrixTrace tr = fundamental_matrix(A, 0.0, 5.0, topt);
        bool ok = true;
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            ok = ok && std::abs(tr.p[i] + 1.0) < 1e-3 && std::abs(tr.c[i] - 1.0) < 1e-6;
        report("linear.contraction-diagnostics", ok);
    });

    // Telescoping and comparison dominance on the stable oscillator preset.
    guarded("approx.telescoping", [&] {
        const Preset p = make_preset("vanderpol-8.1");
        ApproximationConfig ac;
        ac.scheme = Scheme::A;
        ac.m = 2;
        ac.x0 = Vec(2);
        ac.x0 << 0.03, 0.0;
        ac.horizon = 10.0;
        ac.integ = integ;
        const ApproximationStack stack = run_scheme(p.model, ac);
        const Trajectory x = direct_solve(p.model, 0.0, ac.x0, 10.0, integ);
        const Trajectory z = direct_error(p.model, stack, integ);
        double tele = 0.0;
        for (double t : stack.Ym.times) {
            const double tt = std::min({t, x.t_end(), z.t_end()});
            tele = std::max(tele, (stack.Ym.at(tt) + z.at(tt) - x.at(tt)).norm());
        }
        const double tol = 10.0 * (rel_tol_override > 0 ? rel_tol_override : 1e-8);
        report("approx.telescoping", tele <= tol, "max defect " + format_double(tele));

        TraceOptions topt;
        const FundamentalMatrixTrace trace = fundamental_matrix(p.model.A, 0.0, 10.0, topt);
        ComparisonOptions copts;
        copts.integ = integ;
        const BoundTrace z2 = solve_Z2(p.model, stack, trace, copts);
        bool dom = !z2.escaped;
        if (dom)
            for (double t : stack.Ym.times)
                dom = dom && z2.at(std::min(t, z2.Z.t_end())) + 1e-9 >= z.norm_at(std::min(t, z.t_end()));
        report("bounds.comparison-dominance", dom, z2.escaped ? "bound escaped" : "pointwise violation");
    });

    return failures == 0 ? 0 : 2;
}

}  // namespace tsr
