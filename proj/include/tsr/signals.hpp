#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tsr {

/// Scalar time-dependent coefficient: constants, sinusoids, step-down pulses
/// and sums thereof. Immutable after construction; cheap to copy and safe to
/// share across threads.
class TimeSignal {
  public:
    enum class Kind { Constant, Sinusoid, Pulse, Sum };

    TimeSignal() : kind_(Kind::Constant), a_(0.0), b_(0.0), c_(0.0) {}

    static TimeSignal constant(double value);
    static TimeSignal sinusoid(double amplitude, double angular_frequency, double phase = 0.0);
    /// level * (1 - H(t - switch_time)): equals `level` strictly before
    /// switch_time and 0 at and after it.
    static TimeSignal pulse(double level, double switch_time);
    static TimeSignal sum(std::vector<TimeSignal> parts);

    Kind kind() const { return kind_; }

    double eval(double t) const;

    /// Upper bound on sup |s(t)| over [t_lo, t_hi]; exact for Constant,
    /// Sinusoid and Pulse, sum-of-member-sups for Sum.
    double abs_sup(double t_lo, double t_hi) const;

    /// Switch times of all pulse members, ascending, deduplicated.
    std::vector<double> breakpoints() const;

    /// Angular frequencies of all sinusoid members with nonzero amplitude.
    std::vector<double> sinusoid_frequencies() const;

    bool is_constant_zero() const;

    /// Text form used by the model config format:
    /// const(v), sin(a, w, phase), pulse(level, ts), sum(...).
    std::string to_text() const;
    static TimeSignal parse(std::string_view text);

    bool operator==(const TimeSignal& other) const;

  private:
    Kind kind_;
    // Constant: a = value. Sinusoid: a = amplitude, b = angular frequency,
    // c = phase. Pulse: a = level, b = switch time.
    double a_, b_, c_;
    std::vector<TimeSignal> parts_;

    void collect_breakpoints(std::vector<double>& out) const;
};

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace tsr
