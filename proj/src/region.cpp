#include "tsr/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace tsr {

std::string RegionMethod::name() const {
    switch (kind) {
        case Kind::ComparisonZ2:
            return std::string("z2-m") + std::to_string(m) + "-" + scheme_name(scheme);
        case Kind::LinearizedZ3:
            return std::string("z3-m") + std::to_string(m) + "-" + scheme_name(scheme);
        case Kind::ReferenceDirect:
            return "reference";
        case Kind::TwoMaximaHeuristic:
            return std::string("two-maxima-m") + std::to_string(m) + "-" + scheme_name(scheme);
    }
    return "unknown";
}

std::vector<Vec> unit_directions(int dim, int count) {
    std::vector<Vec> out;
    if (dim == 1) {
        out.push_back(Vec::Constant(1, 1.0));
        if (count > 1) out.push_back(Vec::Constant(1, -1.0));
        return out;
    }
    if (dim == 2) {
        out.reserve(count);
        for (int i = 0; i < count; ++i) {
            const double ang = 2.0 * M_PI * i / count;
            Vec d(2);
            d << std::cos(ang), std::sin(ang);
            out.push_back(std::move(d));
        }
        return out;
    }
    // Fibonacci lattice on S^{dim-1} via repeated golden-angle rotation of
    // polar coordinates; adequate coverage for the sweep use case.
    const double golden = 2.39996322972865332;
    for (int i = 0; i < count; ++i) {
        Vec d(dim);
        double phi = golden * i;
        double z = 1.0 - 2.0 * (i + 0.5) / count;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        d[0] = z;
        for (int j = 1; j < dim; ++j) {
            if (j == dim - 1) {
                d[j] = r;
            } else {
                d[j] = r * std::cos(phi * (j + 1));
                r *= std::sin(phi * (j + 1));
            }
        }
        if (d.norm() < 1e-12) d[0] = 1.0;
        d /= d.norm();
        out.push_back(std::move(d));
    }
    return out;
}

RegionEstimator::RegionEstimator(PolySystemModel model) : model_(std::move(model)) {}

std::shared_ptr<RegionEstimator::CacheEntry> RegionEstimator::entry_for(double t0, double horizon) const {
    const auto key = std::make_pair(t0, horizon);
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    auto entry = std::make_shared<CacheEntry>();
    TraceOptions topt;
    entry->trace = fundamental_matrix(model_.A, t0, t0 + horizon, topt);
    entry->exponent = exponent_estimate(entry->trace);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto [it, inserted] = cache_.emplace(key, std::move(entry));
    return it->second;
}

const FundamentalMatrixTrace& RegionEstimator::trace_for(double t0, double horizon) const {
    return entry_for(t0, horizon)->trace;
}

const ExponentEstimate& RegionEstimator::exponent_for(double t0, double horizon) const {
    return entry_for(t0, horizon)->exponent;
}

ApproximationStack RegionEstimator::build_stack(const Vec& x0, const RegionQuery& query) const {
    ApproximationConfig cfg;
    cfg.scheme = query.method.scheme;
    cfg.m = query.method.m;
    cfg.t0 = query.t0;
    cfg.x0 = x0;
    cfg.horizon = query.horizon;
    cfg.integ = query.integ;
    cfg.shared_grid_dt = query.shared_grid_dt;
    return run_scheme(model_, cfg);
}

namespace {

/// Tail verdict shared by the trace-based classifiers: trapped when the tail
/// settles at zero (F0 = 0) or at the forced-response scale (F0 > 0).
Classification tail_verdict(double tail, double F0, double lambda_hat, const ClassifierParams& params) {
    if (F0 == 0.0) return tail <= params.trap_eps ? Classification::Trapped : Classification::Undetermined;
    const double scale = std::abs(lambda_hat) > 1e-12 ? params.trap_factor * F0 / std::abs(lambda_hat)
                                                      : params.trap_factor * F0;
    return tail <= scale ? Classification::Trapped : Classification::Undetermined;
}

}  // namespace

Classification RegionEstimator::classify(const Vec& x0, const RegionQuery& query) const {
    const auto entry = entry_for(query.t0, query.horizon);
    ComparisonOptions copts;
    copts.integ = query.integ;
    copts.escape_guard = query.params.escape_guard;
    copts.tail_fraction = query.params.tail_fraction;

    switch (query.method.kind) {
        case RegionMethod::Kind::ReferenceDirect: {
            Trajectory x;
            try {
                x = direct_solve(model_, query.t0, x0, query.t0 + query.horizon, query.integ);
            } catch (const StepSizeUnderflow& e) {
                if (e.state_norm() >= query.params.escape_guard) return Classification::Escaped;
                throw;
            }
            if (x.status == TerminalStatus::BlowUp) return Classification::Escaped;
            return tail_verdict(tail_sup(x, query.params.tail_fraction), model_.F0,
                                entry->exponent.lambda_hat, query.params);
        }
        case RegionMethod::Kind::ComparisonZ2: {
            ApproximationStack stack = build_stack(x0, query);
            if (stack.divergent()) return Classification::Escaped;
            const BoundTrace z2 = solve_Z2(model_, stack, entry->trace, copts);
            if (z2.escaped) return Classification::Escaped;
            return tail_verdict(z2.tail_sup, model_.F0, entry->exponent.lambda_hat, query.params);
        }
        case RegionMethod::Kind::LinearizedZ3: {
            ApproximationStack stack = build_stack(x0, query);
            if (stack.divergent()) return Classification::Escaped;
            const Z3Result z3 = solve_Z3(model_, stack, entry->trace, copts);
            return z3.lambda1 < 0 ? Classification::Trapped : Classification::Escaped;
        }
        case RegionMethod::Kind::TwoMaximaHeuristic:
            // The heuristic has its own threshold search; for plain probe
            // classification fall back to its inside/outside ratio test.
            return maxima_ratio(x0, query, false) < 1.0 ? Classification::Trapped : Classification::Escaped;
    }
    return Classification::Undetermined;
}

double RegionEstimator::radial_bisect(const Vec& direction, const RegionQuery& query,
                                      DirectionResult* detail) const {
    if (query.method.kind == RegionMethod::Kind::TwoMaximaHeuristic)
        return two_maxima_threshold(direction, query, detail);

    auto probe = [&](double r) {
        const Classification c = classify(r * direction, query);
        if (detail) detail->probes.emplace_back(r, c);
        return c;
    };
    const Classification at_lo = probe(query.r_lo);
    const Classification at_hi = probe(query.r_hi);
    if (at_lo != Classification::Trapped || at_hi == Classification::Trapped)
        throw BracketInvalid("radial_bisect: bracket endpoints do not straddle the boundary");

    double lo = query.r_lo, hi = query.r_hi;
    while (hi - lo > query.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        // Undetermined shrinks toward the trapped side: the estimate stays
        // inside the certified region.
        if (probe(mid) == Classification::Trapped)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

/// First `want` interior local maxima of `values` starting from index
/// `begin`, with samples inside the plateau tolerance of a summit merged into
/// one maximum. Returns sample indices.
std::vector<std::size_t> leading_maxima(const std::vector<double>& values, std::size_t want,
                                        std::size_t begin = 1) {
    constexpr double plateau = 1e-9;
    std::vector<std::size_t> maxima;
    std::size_t i = std::max<std::size_t>(begin, 1);
    while (i + 1 < values.size() && maxima.size() < want) {
        if (values[i] >= values[i - 1] && values[i] >= values[i + 1]) {
            std::size_t j = i;
            while (j + 1 < values.size() && std::abs(values[j + 1] - values[i]) <= plateau) ++j;
            if (j + 1 < values.size() && values[j + 1] < values[i] - plateau) maxima.push_back(i);
            i = j + 1;
        } else {
            ++i;
        }
    }
    return maxima;
}

}  // namespace

double RegionEstimator::maxima_ratio(const Vec& x0, const RegionQuery& query, bool endpoint) const {
    ApproximationStack stack = build_stack(x0, query);
    // Finite-time escape of the level stack is already the beyond-boundary
    // signature, whatever maxima fit before the blow-up.
    if (stack.divergent()) return std::numeric_limits<double>::infinity();
    const auto& grid = stack.Ym.times;
    std::vector<double> norms(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) norms[i] = stack.Ym.states[i].norm();

    // Fast stiffness modulation leaves micro-ripples on the norm curve whose
    // sample-level maxima are not the oscillation peaks of interest. Average
    // over the slowest modulation period before peak detection, refine each
    // peak to the raw maximum inside the averaging window, and merge peaks
    // closer than two modulation periods into one summit.
    double ripple_period = 0.0;
    for (const auto& row : model_.A)
        for (const auto& sig : row)
            for (double w : sig.sinusoid_frequencies())
                ripple_period = std::max(ripple_period, 2.0 * M_PI / w);
    ripple_period = std::min(ripple_period, 0.04 * (grid.back() - grid.front()));
    const double window = 1.2 * ripple_period;
    const double dt = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
    const std::size_t half = static_cast<std::size_t>(window / (2.0 * dt));
    const std::size_t min_sep = static_cast<std::size_t>(2.0 * ripple_period / dt);

    std::vector<double> smooth(norms.size());
    if (half == 0) {
        smooth = norms;
    } else {
        std::vector<double> prefix(norms.size() + 1, 0.0);
        for (std::size_t i = 0; i < norms.size(); ++i) prefix[i + 1] = prefix[i] + norms[i];
        for (std::size_t i = 0; i < norms.size(); ++i) {
            const std::size_t lo = i >= half ? i - half : 0;
            const std::size_t hi = std::min(i + half, norms.size() - 1);
            smooth[i] = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
        }
    }

    // Refine each smoothed peak to the raw maximum inside its averaging
    // window; peaks within the separation floor belong to one summit.
    std::vector<std::size_t> peaks = leading_maxima(smooth, 8);
    std::vector<std::pair<std::size_t, double>> refined;
    for (std::size_t idx : peaks) {
        const std::size_t lo = idx >= half ? idx - half : 0;
        const std::size_t hi = std::min(idx + half, norms.size() - 1);
        std::size_t best = lo;
        for (std::size_t k = lo; k <= hi; ++k)
            if (norms[k] > norms[best]) best = k;
        if (!refined.empty() && best <= refined.back().first + min_sep) {
            if (norms[best] > refined.back().second) refined.back() = {best, norms[best]};
            continue;
        }
        refined.emplace_back(best, norms[best]);
    }
    std::vector<double> maxima;
    for (const auto& [idx, value] : refined) {
        maxima.push_back(value);
        if (maxima.size() == 2) break;
    }

    if (maxima.size() < 2) {
        if (endpoint) throw InsufficientOscillation("two_maxima: fewer than 2 interior maxima at bracket endpoint");
        return std::numeric_limits<double>::infinity();
    }
    return maxima[1] / maxima[0];
}

double RegionEstimator::two_maxima_threshold(const Vec& direction, const RegionQuery& query,
                                             DirectionResult* detail) const {
    auto ratio = [&](double r, bool endpoint) {
        const double v = maxima_ratio(r * direction, query, endpoint);
        if (detail)
            detail->probes.emplace_back(r, v < 1.0 ? Classification::Trapped : Classification::Escaped);
        return v;
    };
    const double ratio_lo = ratio(query.r_lo, true);
    const double ratio_hi = ratio(query.r_hi, true);
    if (!(ratio_lo < 1.0) || !(ratio_hi > 1.0))
        throw BracketInvalid("two_maxima: ratio does not cross 1 between the bracket radii");

    double lo = query.r_lo, hi = query.r_hi;
    while (hi - lo > query.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        if (ratio(mid, false) < 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

RegionEstimate RegionEstimator::estimate_region(const RegionQuery& query) const {
    RegionEstimate out;
    out.method = query.method;
    out.t0 = query.t0;
    const auto dirs = unit_directions(model_.dim, query.n_directions);
    out.directions.resize(dirs.size());

    // Warm the shared trace before spawning workers.
    entry_for(query.t0, query.horizon);

    auto work = [&](std::size_t begin, std::size_t step) {
        for (std::size_t i = begin; i < dirs.size(); i += step) {
            DirectionResult& res = out.directions[i];
            res.direction = dirs[i];
            res.angle = model_.dim == 2 ? std::atan2(dirs[i][1], dirs[i][0]) : static_cast<double>(i);
            try {
                res.threshold = radial_bisect(dirs[i], query, &res);
                res.flag = DirectionFlag::Ok;
            } catch (const BracketInvalid&) {
                res.flag = DirectionFlag::BracketInvalid;
            } catch (const InsufficientOscillation&) {
                res.flag = DirectionFlag::InsufficientOscillation;
            } catch (const std::exception&) {
                res.flag = DirectionFlag::NumericFailure;
            }
        }
    };

    const int workers = std::max(1, query.workers);
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, static_cast<std::size_t>(w), workers);
        for (auto& th : pool) th.join();
    }
    return out;
}

std::vector<RegionEstimate> RegionEstimator::sweep_t0(const RegionQuery& query,
                                                      const std::vector<double>& t0_values) const {
    std::vector<RegionEstimate> out;
    out.reserve(t0_values.size());
    for (double t0 : t0_values) {
        RegionQuery q = query;
        q.t0 = t0;
        out.push_back(estimate_region(q));
    }
    return out;
}

}  // namespace tsr
