#pragma once

#include "tsr/config.hpp"
#include "tsr/presets.hpp"
#include "tsr/region.hpp"

#include <string>

namespace tsr {

/// Builds the model a config describes (preset with overrides, or inline).
PolySystemModel resolve_model(const RunConfig& cfg);

/// Radial bracket: explicit config values win, otherwise the preset default.
std::pair<double, double> resolve_bracket(const RunConfig& cfg);

/// Method tokens: z2:<m>, z3:<m>, reference, heuristic:<m>. The scheme comes
/// from the run section.
RegionMethod parse_method(const std::string& token, Scheme scheme);

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir);
int cmd_bounds(const RunConfig& cfg, const std::string& out_dir);
int cmd_region(const RunConfig& cfg, const std::string& out_dir);
int cmd_sweep_t0(const RunConfig& cfg, const std::string& out_dir);

/// Built-in oracle suite; prints one pass/fail line per property and returns
/// 0 only if everything passes. A nonzero rel_tol overrides the suite's
/// integration tolerance (a deliberately corrupted tolerance must fail).
int run_selfcheck(double rel_tol_override = 0.0);

inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace tsr
