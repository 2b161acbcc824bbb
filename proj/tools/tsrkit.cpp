// Command-line front end: simulation, error bounds, region estimation and
// t0 sweeps for time-varying polynomial oscillator models.

#include "tsr/cli_commands.hpp"
#include "tsr/csv.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct CommonFlags {
    std::string config_path;
    std::string preset;
    std::string out_dir = "out";
    std::optional<int> m;
    std::optional<std::string> scheme;
    std::optional<double> f0;
    std::optional<double> t0;
    std::optional<int> workers;
    std::optional<std::vector<double>> x0;
    std::optional<double> horizon;
    std::optional<std::vector<std::string>> methods;
    std::optional<int> directions;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Run configuration file");
    cmd->add_option("--preset", flags.preset, "Built-in model preset name");
    cmd->add_option("--m", flags.m, "Number of approximation levels");
    cmd->add_option("--scheme", flags.scheme, "Recursion scheme: A or B")
        ->check(CLI::IsMember({"A", "B"}));
    cmd->add_option("--f0", flags.f0, "Forcing amplitude override");
    cmd->add_option("--t0", flags.t0, "Initial time");
    cmd->add_option("--out", flags.out_dir, "Output directory");
    cmd->add_option("--workers", flags.workers, "Worker threads for region sweeps");
    cmd->add_option("--x0", flags.x0, "Initial state components")->delimiter(',');
    cmd->add_option("--horizon", flags.horizon, "Integration horizon");
    cmd->add_option("--methods", flags.methods, "Region methods (z2:<m>, z3:<m>, reference, heuristic:<m>)")
        ->delimiter(',');
    cmd->add_option("--directions", flags.directions, "Number of boundary directions");
}

tsr::RunConfig build_config(const CommonFlags& flags) {
    tsr::RunConfig cfg;
    if (!flags.config_path.empty()) cfg = tsr::RunConfig::load(flags.config_path);
    if (!flags.preset.empty()) cfg.preset = flags.preset;
    if (flags.m) cfg.m = *flags.m;
    if (flags.scheme) cfg.scheme = (*flags.scheme == "B") ? tsr::Scheme::B : tsr::Scheme::A;
    if (flags.f0) cfg.f0 = *flags.f0;
    if (flags.t0) cfg.t0 = *flags.t0;
    if (flags.workers) cfg.workers = *flags.workers;
    if (flags.x0) cfg.x0 = *flags.x0;
    if (flags.horizon) cfg.horizon = *flags.horizon;
    if (flags.methods) cfg.methods = *flags.methods;
    if (flags.directions) cfg.directions = *flags.directions;
    if (cfg.preset.empty() && !cfg.inline_model) throw std::invalid_argument("no model: pass --preset or --config");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Successive-approximation bounds and trapping/stability regions for "
                 "nonautonomous polynomial systems"};
    app.require_subcommand(1);

    CommonFlags flags;
    double selfcheck_rel_tol = 0.0;

    CLI::App* simulate = app.add_subcommand("simulate", "Trajectories, approximation levels and bilateral bounds");
    CLI::App* bounds = app.add_subcommand("bounds", "Error-bound traces Z1/Z2/Z3 and fundamental-matrix diagnostics");
    CLI::App* region = app.add_subcommand("region", "Trapping/stability boundary estimates per method");
    CLI::App* sweep = app.add_subcommand("sweep-t0", "Region estimates across initial times");
    CLI::App* selfcheck = app.add_subcommand("selfcheck", "Built-in oracle suite");
    for (CLI::App* cmd : {simulate, bounds, region, sweep}) add_common(cmd, flags);
    selfcheck->add_option("--rel-tol", selfcheck_rel_tol,
                          "Override the suite's integration tolerance (fault injection)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (selfcheck->parsed()) return tsr::run_selfcheck(selfcheck_rel_tol);
        const tsr::RunConfig cfg = build_config(flags);
        if (simulate->parsed()) return tsr::cmd_simulate(cfg, flags.out_dir);
        if (bounds->parsed()) return tsr::cmd_bounds(cfg, flags.out_dir);
        if (region->parsed()) return tsr::cmd_region(cfg, flags.out_dir);
        if (sweep->parsed()) return tsr::cmd_sweep_t0(cfg, flags.out_dir);
    } catch (const tsr::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
