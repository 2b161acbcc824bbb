#pragma once

#include "tsr/approx_engine.hpp"
#include "tsr/polyfield.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tsr {

/// Inline model description: A entries and eta components as signal text,
/// monomials as (coeff_signal, [exponents], component_index) with 1-based
/// component indices.
struct InlineModelConfig {
    int dim = 0;
    std::vector<std::vector<std::string>> a_text;
    struct Mono {
        std::string coeff_text;
        std::vector<int> exponents;
        int component = 1;
        bool operator==(const Mono&) const = default;
    };
    std::vector<Mono> monomials;
    double f0 = 0.0;
    std::vector<std::string> eta_text;

    bool operator==(const InlineModelConfig&) const = default;
};

/// Structured plain-text run configuration with schema versioning. The
/// serialized form is canonical: parse(serialize(c)) == c and
/// serialize(parse(text)) is a fixpoint. Unknown sections or keys are
/// rejected.
struct RunConfig {
    int schema = 1;

    // [model]
    std::string preset;  // empty selects the inline model
    std::optional<double> f0;
    std::optional<double> alpha1;
    std::optional<double> alpha2;
    std::optional<double> nu;
    std::optional<InlineModelConfig> inline_model;

    // [run]
    double t0 = 0.0;
    double horizon = 40.0;
    Scheme scheme = Scheme::A;
    int m = 2;
    std::vector<double> x0{0.05, 0.05};

    // [integrator]
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.0;
    double blowup_threshold = 1e6;

    // [region]
    std::vector<std::string> methods{"z2:1", "z2:2", "z2:3", "reference"};
    int directions = 16;
    std::optional<double> r_lo;
    std::optional<double> r_hi;
    double bisect_tol = 1e-3;
    int workers = 1;
    double trap_eps = 1e-4;
    double trap_factor = 10.0;

    // [sweep]
    std::vector<double> sweep_t0_values{0.0, 2.0};

    bool operator==(const RunConfig&) const = default;

    std::string serialize() const;
    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::string& path);
};

/// FNV-1a 64-bit over a byte string, hex encoded.
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace tsr
