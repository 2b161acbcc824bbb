#pragma once

#include "tsr/approx_engine.hpp"
#include "tsr/error_bounds.hpp"
#include "tsr/linear_analysis.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace tsr {

enum class Classification { Trapped, Escaped, Undetermined };

inline const char* classification_name(Classification c) {
    switch (c) {
        case Classification::Trapped: return "trapped";
        case Classification::Escaped: return "escaped";
        default: return "undetermined";
    }
}

struct ClassifierParams {
    double trap_eps = 1e-4;    // F0 = 0: tail sup of the certifying trace below this is trapped
    double trap_factor = 10.0; // F0 > 0: trapped when tail sup <= trap_factor * F0 / |lambda_hat|
    double tail_fraction = 0.25;
    double escape_guard = 1e3;
};

struct RegionMethod {
    enum class Kind { ComparisonZ2, LinearizedZ3, ReferenceDirect, TwoMaximaHeuristic };
    Kind kind = Kind::ComparisonZ2;
    int m = 1;
    Scheme scheme = Scheme::A;

    std::string name() const;
};

struct RegionQuery {
    double t0 = 0.0;
    double horizon = 40.0;
    int n_directions = 64;
    double r_lo = 1e-3;
    double r_hi = 1.0;
    double bisect_tol = 1e-3;
    RegionMethod method{};
    ClassifierParams params{};
    IntegratorOptions integ{};
    double shared_grid_dt = 0.01;
    int workers = 1;
};

enum class DirectionFlag { Ok, BracketInvalid, InsufficientOscillation, NumericFailure };

inline const char* direction_flag_name(DirectionFlag f) {
    switch (f) {
        case DirectionFlag::Ok: return "ok";
        case DirectionFlag::BracketInvalid: return "bracket-invalid";
        case DirectionFlag::InsufficientOscillation: return "insufficient-oscillation";
        default: return "numeric-failure";
    }
}

struct DirectionResult {
    double angle = 0.0;  // polar angle for planar systems, index otherwise
    Vec direction;
    double threshold = 0.0;
    DirectionFlag flag = DirectionFlag::Ok;
    std::vector<std::pair<double, Classification>> probes;  // (radius, verdict) in probe order
};

struct RegionEstimate {
    RegionMethod method{};
    double t0 = 0.0;
    std::vector<DirectionResult> directions;
};

class BracketInvalid : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InsufficientOscillation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Unit directions: {+1,-1} in 1-D, uniform circle in 2-D, Fibonacci sphere
/// lattice above.
std::vector<Vec> unit_directions(int dim, int count);

/// Region boundary estimation for one model. Fundamental-matrix traces and
/// exponent fits are cached per (t0, horizon) and shared across probes.
class RegionEstimator {
  public:
    explicit RegionEstimator(PolySystemModel model);

    const PolySystemModel& model() const { return model_; }

    Classification classify(const Vec& x0, const RegionQuery& query) const;
    double radial_bisect(const Vec& direction, const RegionQuery& query, DirectionResult* detail = nullptr) const;
    double two_maxima_threshold(const Vec& direction, const RegionQuery& query,
                                DirectionResult* detail = nullptr) const;
    RegionEstimate estimate_region(const RegionQuery& query) const;
    std::vector<RegionEstimate> sweep_t0(const RegionQuery& query, const std::vector<double>& t0_values) const;

    const FundamentalMatrixTrace& trace_for(double t0, double horizon) const;
    const ExponentEstimate& exponent_for(double t0, double horizon) const;

  private:
    PolySystemModel model_;
    struct CacheEntry {
        FundamentalMatrixTrace trace;
        ExponentEstimate exponent;
    };
    mutable std::map<std::pair<double, double>, std::shared_ptr<CacheEntry>> cache_;
    mutable std::mutex cache_mutex_;

    std::shared_ptr<CacheEntry> entry_for(double t0, double horizon) const;
    ApproximationStack build_stack(const Vec& x0, const RegionQuery& query) const;
    /// Ratio of the second to the first interior local maximum of ||Y_m||;
    /// +inf when the stack diverges before showing two maxima.
    double maxima_ratio(const Vec& x0, const RegionQuery& query, bool endpoint) const;
};

}  // namespace tsr
