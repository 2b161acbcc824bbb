#include "tsr/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace tsr {

namespace {

// Drive frequency of the sinusoidal forcing. Far from the oscillator's
// natural frequency and from both stiffness-modulation rates, so the forced
// response stays small relative to the region scale.
constexpr double kForcingFrequency = 17.0;

enum class NonlinearKind { VanDerPol, Duffing };

/// Planar oscillator x1' = x2, x2' = -omega^2(t) x1 - alpha1 x2 + f2 + F0 sin(w2 t)
/// with f2 = -alpha2 x2^3 (Van der Pol family) or -alpha2 x1^3 (Duffing family).
PolySystemModel oscillator(double omega0_sq, double a1, double r1, double a2, double r2, double alpha1,
                           double alpha2, NonlinearKind kind, double f0,
                           std::optional<double> pulse_nu = std::nullopt) {
    PolySystemModel m;
    m.dim = 2;

    std::vector<TimeSignal> omega_sq_parts;
    omega_sq_parts.push_back(TimeSignal::constant(-omega0_sq));
    if (a1 != 0.0) omega_sq_parts.push_back(TimeSignal::sinusoid(-a1, r1, 0.0));
    if (a2 != 0.0) omega_sq_parts.push_back(TimeSignal::sinusoid(-a2, r2, 0.0));
    if (pulse_nu && *pulse_nu != 0.0) omega_sq_parts.push_back(TimeSignal::pulse(-*pulse_nu, M_PI / 2));
    TimeSignal neg_omega_sq = omega_sq_parts.size() == 1 ? omega_sq_parts[0]
                                                         : TimeSignal::sum(std::move(omega_sq_parts));

    m.A = {{TimeSignal::constant(0.0), TimeSignal::constant(1.0)},
           {neg_omega_sq, TimeSignal::constant(-alpha1)}};

    m.f = PolyVectorField(2);
    if (alpha2 != 0.0) {
        if (kind == NonlinearKind::VanDerPol)
            m.f.add_term(1, TimeSignal::constant(-alpha2), {0, 3});
        else
            m.f.add_term(1, TimeSignal::constant(-alpha2), {3, 0});
    }

    m.F0 = f0;
    m.eta = {TimeSignal::constant(0.0), TimeSignal::sinusoid(1.0, kForcingFrequency, 0.0)};
    return m;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"vanderpol-8.1", "vanderpol-fig3", "duffing-6a", "duffing-6b", "duffing-pulse"};
}

Preset make_preset(const std::string& name, const PresetOverrides& ov) {
    Preset p;
    p.name = name;
    const double r1 = 4.8 * M_PI, r2 = 21.0;
    if (name == "vanderpol-8.1") {
        p.model = oscillator(4.0, 5.0, r1, 5.0, r2, ov.alpha1.value_or(1.2), ov.alpha2.value_or(-100.0),
                             NonlinearKind::VanDerPol, ov.f0.value_or(0.0));
        p.r_lo = 0.005;
        p.r_hi = 0.6;
    } else if (name == "vanderpol-fig3") {
        p.model = oscillator(4.0, 5.0, r1, 5.0, r2, ov.alpha1.value_or(1.0), ov.alpha2.value_or(-1.0),
                             NonlinearKind::VanDerPol, ov.f0.value_or(0.0));
        p.r_lo = 0.05;
        p.r_hi = 6.0;
    } else if (name == "duffing-6a") {
        p.model = oscillator(4.0, 5.0, r1, 5.0, r2, ov.alpha1.value_or(1.0), ov.alpha2.value_or(-10.0),
                             NonlinearKind::Duffing, ov.f0.value_or(0.0));
        p.r_lo = 0.02;
        p.r_hi = 3.0;
    } else if (name == "duffing-6b") {
        p.model = oscillator(4.0, 5.0, r1, 5.0, r2, ov.alpha1.value_or(1.0), ov.alpha2.value_or(-10.0),
                             NonlinearKind::Duffing, ov.f0.value_or(3.5));
        p.r_lo = 0.02;
        p.r_hi = 3.0;
    } else if (name == "duffing-pulse") {
        // Constant stiffness plus a step that switches off at pi/2; no
        // sinusoidal stiffness modulation in this scenario.
        p.model = oscillator(4.0, 0.0, r1, 0.0, r2, ov.alpha1.value_or(1.0), ov.alpha2.value_or(-10.0),
                             NonlinearKind::Duffing, ov.f0.value_or(1.5), ov.nu.value_or(-2.0));
        p.r_lo = 0.02;
        p.r_hi = 3.0;
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return p;
}

}  // namespace tsr
