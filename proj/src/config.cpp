#include "tsr/config.hpp"

#include "tsr/signals.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tsr {

namespace {

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v[i]);
    }
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(v[i]);
    }
    return out;
}

std::string join_strings(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += v[i];
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : s) {
        if (ch == '(' || ch == '[') ++depth;
        if (ch == ')' || ch == ']') --depth;
        if (ch == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : split(s, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw std::invalid_argument("config: bad number '" + tok + "' for " + key);
        }
    }
    return out;
}

double parse_double(const std::string& s, const std::string& key) {
    auto v = parse_doubles(s, key);
    if (v.size() != 1) throw std::invalid_argument("config: expected one number for " + key);
    return v[0];
}

int parse_int(const std::string& s, const std::string& key) {
    const double v = parse_double(s, key);
    const int i = static_cast<int>(v);
    if (i != v) throw std::invalid_argument("config: expected integer for " + key);
    return i;
}

}  // namespace

std::string RunConfig::serialize() const {
    std::string out;
    out += "schema = " + std::to_string(schema) + "\n";
    out += "\n[model]\n";
    if (!preset.empty()) out += "preset = " + preset + "\n";
    if (f0) out += "f0 = " + format_double(*f0) + "\n";
    if (alpha1) out += "alpha1 = " + format_double(*alpha1) + "\n";
    if (alpha2) out += "alpha2 = " + format_double(*alpha2) + "\n";
    if (nu) out += "nu = " + format_double(*nu) + "\n";
    if (inline_model) {
        const auto& im = *inline_model;
        out += "dim = " + std::to_string(im.dim) + "\n";
        for (int i = 0; i < im.dim; ++i)
            for (int j = 0; j < im.dim; ++j)
                out += "a." + std::to_string(i) + "." + std::to_string(j) + " = " + im.a_text[i][j] + "\n";
        for (std::size_t k = 0; k < im.monomials.size(); ++k) {
            const auto& mono = im.monomials[k];
            out += "mono." + std::to_string(k) + " = (" + mono.coeff_text + ", [" + join_ints(mono.exponents) +
                   "], " + std::to_string(mono.component) + ")\n";
        }
        out += "forcing_f0 = " + format_double(im.f0) + "\n";
        for (int i = 0; i < im.dim; ++i) out += "eta." + std::to_string(i) + " = " + im.eta_text[i] + "\n";
    }
    out += "\n[run]\n";
    out += "t0 = " + format_double(t0) + "\n";
    out += "horizon = " + format_double(horizon) + "\n";
    out += std::string("scheme = ") + scheme_name(scheme) + "\n";
    out += "m = " + std::to_string(m) + "\n";
    out += "x0 = " + join_doubles(x0) + "\n";
    out += "\n[integrator]\n";
    out += "rel_tol = " + format_double(rel_tol) + "\n";
    out += "abs_tol = " + format_double(abs_tol) + "\n";
    out += "max_step = " + format_double(max_step) + "\n";
    out += "blowup_threshold = " + format_double(blowup_threshold) + "\n";
    out += "\n[region]\n";
    out += "methods = " + join_strings(methods) + "\n";
    out += "directions = " + std::to_string(directions) + "\n";
    if (r_lo) out += "r_lo = " + format_double(*r_lo) + "\n";
    if (r_hi) out += "r_hi = " + format_double(*r_hi) + "\n";
    out += "bisect_tol = " + format_double(bisect_tol) + "\n";
    out += "workers = " + std::to_string(workers) + "\n";
    out += "trap_eps = " + format_double(trap_eps) + "\n";
    out += "trap_factor = " + format_double(trap_factor) + "\n";
    out += "\n[sweep]\n";
    out += "t0_values = " + join_doubles(sweep_t0_values) + "\n";
    return out;
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig cfg;
    cfg.x0.clear();
    bool x0_seen = false, methods_seen = false, sweep_seen = false;
    std::string section;
    std::istringstream in(text);
    std::string line;
    bool schema_seen = false;
    InlineModelConfig im;
    bool inline_seen = false;

    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw std::invalid_argument("config: malformed section header '" + t + "'");
            section = t.substr(1, t.size() - 2);
            if (section != "model" && section != "run" && section != "integrator" && section != "region" &&
                section != "sweep")
                throw std::invalid_argument("config: unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config: expected key = value, got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));

        if (section.empty()) {
            if (key == "schema") {
                cfg.schema = parse_int(val, key);
                if (cfg.schema != 1) throw std::invalid_argument("config: unsupported schema version");
                schema_seen = true;
                continue;
            }
            throw std::invalid_argument("config: key '" + key + "' outside any section");
        }
        if (section == "model") {
            if (key == "preset") {
                cfg.preset = val;
            } else if (key == "f0") {
                cfg.f0 = parse_double(val, key);
            } else if (key == "alpha1") {
                cfg.alpha1 = parse_double(val, key);
            } else if (key == "alpha2") {
                cfg.alpha2 = parse_double(val, key);
            } else if (key == "nu") {
                cfg.nu = parse_double(val, key);
            } else if (key == "dim") {
                im.dim = parse_int(val, key);
                im.a_text.assign(im.dim, std::vector<std::string>(im.dim));
                im.eta_text.assign(im.dim, "const(0)");
                inline_seen = true;
            } else if (key.rfind("a.", 0) == 0) {
                const auto parts = split(key.substr(2), '.');
                if (parts.size() != 2 || !inline_seen)
                    throw std::invalid_argument("config: matrix entry '" + key + "' requires dim first");
                const int i = std::stoi(parts[0]), j = std::stoi(parts[1]);
                if (i < 0 || i >= im.dim || j < 0 || j >= im.dim)
                    throw std::invalid_argument("config: matrix index out of range in '" + key + "'");
                TimeSignal::parse(val);  // validate
                im.a_text[i][j] = val;
            } else if (key.rfind("mono.", 0) == 0) {
                if (!inline_seen) throw std::invalid_argument("config: monomial requires dim first");
                std::string body = val;
                if (body.size() < 2 || body.front() != '(' || body.back() != ')')
                    throw std::invalid_argument("config: monomial must be (signal, [exponents], component)");
                body = body.substr(1, body.size() - 2);
                const auto parts = split(body, ',');
                if (parts.size() < 3) throw std::invalid_argument("config: malformed monomial '" + val + "'");
                InlineModelConfig::Mono mono;
                mono.coeff_text = parts[0];
                TimeSignal::parse(mono.coeff_text);  // validate
                std::string exps = parts[1];
                if (exps.size() < 2 || exps.front() != '[' || exps.back() != ']')
                    throw std::invalid_argument("config: malformed exponent list in '" + val + "'");
                for (const auto& e : split(exps.substr(1, exps.size() - 2), ','))
                    mono.exponents.push_back(std::stoi(e));
                mono.component = std::stoi(parts[2]);
                im.monomials.push_back(std::move(mono));
            } else if (key == "forcing_f0") {
                if (!inline_seen) throw std::invalid_argument("config: forcing_f0 requires dim first");
                im.f0 = parse_double(val, key);
            } else if (key.rfind("eta.", 0) == 0) {
                if (!inline_seen) throw std::invalid_argument("config: eta requires dim first");
                const int i = std::stoi(key.substr(4));
                if (i < 0 || i >= im.dim) throw std::invalid_argument("config: eta index out of range");
                TimeSignal::parse(val);  // validate
                im.eta_text[i] = val;
            } else {
                throw std::invalid_argument("config: unknown key '" + key + "' in [model]");
            }
        } else if (section == "run") {
            if (key == "t0")
                cfg.t0 = parse_double(val, key);
            else if (key == "horizon")
                cfg.horizon = parse_double(val, key);
            else if (key == "scheme") {
                if (val == "A")
                    cfg.scheme = Scheme::A;
                else if (val == "B")
                    cfg.scheme = Scheme::B;
                else
                    throw std::invalid_argument("config: scheme must be A or B");
            } else if (key == "m")
                cfg.m = parse_int(val, key);
            else if (key == "x0") {
                cfg.x0 = parse_doubles(val, key);
                x0_seen = true;
            } else
                throw std::invalid_argument("config: unknown key '" + key + "' in [run]");
        } else if (section == "integrator") {
            if (key == "rel_tol")
                cfg.rel_tol = parse_double(val, key);
            else if (key == "abs_tol")
                cfg.abs_tol = parse_double(val, key);
            else if (key == "max_step")
                cfg.max_step = parse_double(val, key);
            else if (key == "blowup_threshold")
                cfg.blowup_threshold = parse_double(val, key);
            else
                throw std::invalid_argument("config: unknown key '" + key + "' in [integrator]");
        } else if (section == "region") {
            if (key == "methods") {
                cfg.methods = split(val, ',');
                methods_seen = true;
            } else if (key == "directions")
                cfg.directions = parse_int(val, key);
            else if (key == "r_lo")
                cfg.r_lo = parse_double(val, key);
            else if (key == "r_hi")
                cfg.r_hi = parse_double(val, key);
            else if (key == "bisect_tol")
                cfg.bisect_tol = parse_double(val, key);
            else if (key == "workers")
                cfg.workers = parse_int(val, key);
            else if (key == "trap_eps")
                cfg.trap_eps = parse_double(val, key);
            else if (key == "trap_factor")
                cfg.trap_factor = parse_double(val, key);
            else
                throw std::invalid_argument("config: unknown key '" + key + "' in [region]");
        } else if (section == "sweep") {
            if (key == "t0_values") {
                cfg.sweep_t0_values = parse_doubles(val, key);
                sweep_seen = true;
            } else
                throw std::invalid_argument("config: unknown key '" + key + "' in [sweep]");
        }
    }
    if (!schema_seen) throw std::invalid_argument("config: missing schema line");
    if (!x0_seen) cfg.x0 = {0.05, 0.05};
    if (!methods_seen) cfg.methods = {"z2:1", "z2:2", "z2:3", "reference"};
    if (!sweep_seen) cfg.sweep_t0_values = {0.0, 2.0};
    if (inline_seen) cfg.inline_model = std::move(im);
    if (cfg.preset.empty() && !cfg.inline_model)
        throw std::invalid_argument("config: need either a preset or an inline model");
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

}  // namespace tsr
