#pragma once

#include "tsr/polyfield.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tsr {

/// Tunable parameters of the built-in oscillator families. Unset fields keep
/// the preset's published values.
struct PresetOverrides {
    std::optional<double> f0;
    std::optional<double> alpha1;
    std::optional<double> alpha2;
    std::optional<double> nu;  // pulse amplitude of the stepped stiffness
};

struct Preset {
    std::string name;
    PolySystemModel model;
    // Suggested radial bracket for boundary sweeps.
    double r_lo = 1e-3;
    double r_hi = 1.0;
};

/// Known names: vanderpol-8.1, vanderpol-fig3, duffing-6a, duffing-6b,
/// duffing-pulse.
Preset make_preset(const std::string& name, const PresetOverrides& overrides = {});

std::vector<std::string> preset_names();

}  // namespace tsr
