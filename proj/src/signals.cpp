#include "tsr/signals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace tsr {

TimeSignal TimeSignal::constant(double value) {
    TimeSignal s;
    s.kind_ = Kind::Constant;
    s.a_ = value;
    return s;
}

TimeSignal TimeSignal::sinusoid(double amplitude, double angular_frequency, double phase) {
    TimeSignal s;
    s.kind_ = Kind::Sinusoid;
    s.a_ = amplitude;
    s.b_ = angular_frequency;
    s.c_ = phase;
    return s;
}

TimeSignal TimeSignal::pulse(double level, double switch_time) {
    TimeSignal s;
    s.kind_ = Kind::Pulse;
    s.a_ = level;
    s.b_ = switch_time;
    return s;
}

TimeSignal TimeSignal::sum(std::vector<TimeSignal> parts) {
    TimeSignal s;
    s.kind_ = Kind::Sum;
    s.parts_ = std::move(parts);
    return s;
}

double TimeSignal::eval(double t) const {
    switch (kind_) {
        case Kind::Constant:
            return a_;
        case Kind::Sinusoid:
            return a_ * std::sin(b_ * t + c_);
        case Kind::Pulse:
            return t < b_ ? a_ : 0.0;
        case Kind::Sum: {
            double acc = 0.0;
            for (const auto& p : parts_) acc += p.eval(t);
            return acc;
        }
    }
    return 0.0;
}

namespace {

// sup of |sin(theta)| over [lo, hi], exact.
double abs_sin_sup(double lo, double hi) {
    if (hi - lo >= M_PI) return 1.0;
    // |sin| has period pi with peaks at pi/2 + k*pi.
    const double k = std::ceil((lo - M_PI / 2) / M_PI);
    const double peak = M_PI / 2 + k * M_PI;
    if (peak <= hi) return 1.0;
    return std::max(std::abs(std::sin(lo)), std::abs(std::sin(hi)));
}

}  // namespace

double TimeSignal::abs_sup(double t_lo, double t_hi) const {
    if (t_hi < t_lo) throw std::invalid_argument("abs_sup: t_hi < t_lo");
    switch (kind_) {
        case Kind::Constant:
            return std::abs(a_);
        case Kind::Sinusoid: {
            if (b_ == 0.0) return std::abs(a_ * std::sin(c_));
            double lo = b_ * t_lo + c_;
            double hi = b_ * t_hi + c_;
            if (lo > hi) std::swap(lo, hi);
            return std::abs(a_) * abs_sin_sup(lo, hi);
        }
        case Kind::Pulse:
            // Active on [t_lo, min(t_hi, b_)); zero elsewhere.
            return t_lo < b_ ? std::abs(a_) : 0.0;
        case Kind::Sum: {
            double acc = 0.0;
            for (const auto& p : parts_) acc += p.abs_sup(t_lo, t_hi);
            return acc;
        }
    }
    return 0.0;
}

void TimeSignal::collect_breakpoints(std::vector<double>& out) const {
    if (kind_ == Kind::Pulse) out.push_back(b_);
    if (kind_ == Kind::Sum)
        for (const auto& p : parts_) p.collect_breakpoints(out);
}

std::vector<double> TimeSignal::breakpoints() const {
    std::vector<double> out;
    collect_breakpoints(out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> TimeSignal::sinusoid_frequencies() const {
    std::vector<double> out;
    if (kind_ == Kind::Sinusoid && a_ != 0.0 && b_ != 0.0) out.push_back(std::abs(b_));
    if (kind_ == Kind::Sum)
        for (const auto& p : parts_) {
            auto f = p.sinusoid_frequencies();
            out.insert(out.end(), f.begin(), f.end());
        }
    return out;
}

bool TimeSignal::is_constant_zero() const {
    if (kind_ == Kind::Constant) return a_ == 0.0;
    if (kind_ == Kind::Sum) {
        for (const auto& p : parts_)
            if (!p.is_constant_zero()) return false;
        return true;
    }
    return false;
}

bool TimeSignal::operator==(const TimeSignal& other) const {
    if (kind_ != other.kind_) return false;
    switch (kind_) {
        case Kind::Constant:
            return a_ == other.a_;
        case Kind::Sinusoid:
            return a_ == other.a_ && b_ == other.b_ && c_ == other.c_;
        case Kind::Pulse:
            return a_ == other.a_ && b_ == other.b_;
        case Kind::Sum:
            return parts_ == other.parts_;
    }
    return false;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string TimeSignal::to_text() const {
    switch (kind_) {
        case Kind::Constant:
            return "const(" + format_double(a_) + ")";
        case Kind::Sinusoid:
            return "sin(" + format_double(a_) + ", " + format_double(b_) + ", " + format_double(c_) + ")";
        case Kind::Pulse:
            return "pulse(" + format_double(a_) + ", " + format_double(b_) + ")";
        case Kind::Sum: {
            std::string out = "sum(";
            for (std::size_t i = 0; i < parts_.size(); ++i) {
                if (i) out += ", ";
                out += parts_[i].to_text();
            }
            out += ")";
            return out;
        }
    }
    return {};
}

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) throw std::invalid_argument("signal parse: expected '" + std::string(1, c) + "' in '" + std::string(text) + "'");
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) ++pos;
        return std::string(text.substr(start, pos - start));
    }
    double number() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '+' ||
                                     text[pos] == '-' || text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E'))
            ++pos;
        if (start == pos) throw std::invalid_argument("signal parse: expected number in '" + std::string(text) + "'");
        return std::stod(std::string(text.substr(start, pos - start)));
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
};

TimeSignal parse_signal(Cursor& cur) {
    const std::string name = cur.ident();
    cur.expect('(');
    if (name == "const") {
        double v = cur.number();
        cur.expect(')');
        return TimeSignal::constant(v);
    }
    if (name == "sin") {
        double a = cur.number();
        cur.expect(',');
        double w = cur.number();
        cur.expect(',');
        double ph = cur.number();
        cur.expect(')');
        return TimeSignal::sinusoid(a, w, ph);
    }
    if (name == "pulse") {
        double level = cur.number();
        cur.expect(',');
        double ts = cur.number();
        cur.expect(')');
        return TimeSignal::pulse(level, ts);
    }
    if (name == "sum") {
        std::vector<TimeSignal> parts;
        if (!cur.eat(')')) {
            parts.push_back(parse_signal(cur));
            while (cur.eat(',')) parts.push_back(parse_signal(cur));
            cur.expect(')');
        }
        return TimeSignal::sum(std::move(parts));
    }
    throw std::invalid_argument("signal parse: unknown constructor '" + name + "'");
}

}  // namespace

TimeSignal TimeSignal::parse(std::string_view text) {
    Cursor cur{text};
    TimeSignal s = parse_signal(cur);
    if (!cur.done()) throw std::invalid_argument("signal parse: trailing input in '" + std::string(text) + "'");
    return s;
}

}  // namespace tsr
