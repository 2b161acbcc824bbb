#include "tsr/region.hpp"
#include "tsr/presets.hpp"

#include <doctest.h>

#include <cmath>

using namespace tsr;

namespace {

PolySystemModel cubic_line_model() {
    // x' = -x + x^3: separatrix at |x| = 1.
    PolySystemModel m;
    m.dim = 1;
    m.A = {{TimeSignal::constant(-1.0)}};
    m.f = PolyVectorField(1);
    m.f.add_term(0, TimeSignal::constant(1.0), {3});
    m.F0 = 0.0;
    m.eta = {TimeSignal::constant(0.0)};
    return m;
}

RegionQuery quick_query(RegionMethod::Kind kind, int m, double r_lo, double r_hi) {
    RegionQuery q;
    q.horizon = 40.0;
    q.r_lo = r_lo;
    q.r_hi = r_hi;
    q.bisect_tol = 5e-3;
    q.method.kind = kind;
    q.method.m = m;
    q.integ.rel_tol = 1e-8;
    q.integ.abs_tol = 1e-10;
    return q;
}

}  // namespace

TEST_SUITE("region") {

TEST_CASE("one-dimensional cubic separatrix is found at one") {
    RegionEstimator est(cubic_line_model());
    RegionQuery q = quick_query(RegionMethod::Kind::ReferenceDirect, 1, 0.1, 2.0);
    q.bisect_tol = 1e-3;
    const double r = est.radial_bisect(Vec::Constant(1, 1.0), q);
    CHECK(std::abs(r - 1.0) <= 2 * q.bisect_tol);
    // Halving the tolerance moves the threshold by no more than the old one.
    RegionQuery q2 = q;
    q2.bisect_tol = 5e-4;
    const double r2 = est.radial_bisect(Vec::Constant(1, 1.0), q2);
    CHECK(std::abs(r - r2) <= q.bisect_tol);
}

TEST_CASE("origin is trapped under every method") {
    const Preset p = make_preset("vanderpol-8.1");
    RegionEstimator est(p.model);
    const Vec x0 = Vec::Zero(2);
    for (auto kind : {RegionMethod::Kind::ReferenceDirect, RegionMethod::Kind::ComparisonZ2,
                      RegionMethod::Kind::LinearizedZ3}) {
        RegionQuery q = quick_query(kind, 1, 0.005, 0.6);
        CHECK(est.classify(x0, q) == Classification::Trapped);
    }
}

TEST_CASE("distant data escapes under the reference classifier") {
    const Preset p = make_preset("vanderpol-8.1");
    RegionEstimator est(p.model);
    RegionQuery q = quick_query(RegionMethod::Kind::ReferenceDirect, 1, 0.005, 0.6);
    Vec x0(2);
    x0 << 6.0, 0.0;  // ten times the bracket top
    CHECK(est.classify(x0, q) == Classification::Escaped);
}

TEST_CASE("invalid brackets are reported") {
    const Preset p = make_preset("vanderpol-8.1");
    RegionEstimator est(p.model);
    RegionQuery q = quick_query(RegionMethod::Kind::ReferenceDirect, 1, 0.005, 0.01);
    Vec d(2);
    d << 1.0, 0.0;
    CHECK_THROWS_AS(est.radial_bisect(d, q), BracketInvalid);
}

TEST_CASE("certified boundary sits inside the reference boundary") {
    const Preset p = make_preset("vanderpol-8.1");
    RegionEstimator est(p.model);
    Vec d(2);
    d << 1.0, 0.0;
    RegionQuery qz2 = quick_query(RegionMethod::Kind::ComparisonZ2, 1, 0.002, 0.6);
    RegionQuery qref = quick_query(RegionMethod::Kind::ReferenceDirect, 1, 0.002, 0.6);
    const double r_z2 = est.radial_bisect(d, qz2);
    const double r_ref = est.radial_bisect(d, qref);
    CHECK(r_z2 <= r_ref + qref.bisect_tol);
}

TEST_CASE("soundness: certified-trapped probes are reference-trapped") {
    const Preset p = make_preset("vanderpol-8.1");
    RegionEstimator est(p.model);
    RegionQuery q = quick_query(RegionMethod::Kind::ComparisonZ2, 1, 0.002, 0.6);
    q.n_directions = 8;
    q.bisect_tol = 0.01;
    const RegionEstimate region = est.estimate_region(q);
    RegionQuery qref = quick_query(RegionMethod::Kind::ReferenceDirect, 1, 0.002, 0.6);
    int checked = 0;
    for (const auto& dir : region.directions) {
        REQUIRE(dir.flag == DirectionFlag::Ok);
        for (const auto& [radius, verdict] : dir.probes) {
            if (verdict != Classification::Trapped) continue;
            CHECK(est.classify(radius * dir.direction, qref) == Classification::Trapped);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("odd symmetry of the homogeneous model reflects in the boundary") {
    const Preset p = make_preset("vanderpol-8.1");
    RegionEstimator est(p.model);
    RegionQuery q = quick_query(RegionMethod::Kind::ReferenceDirect, 1, 0.002, 0.6);
    Vec d(2);
    d << std::cos(0.7), std::sin(0.7);
    const double r_plus = est.radial_bisect(d, q);
    const double r_minus = est.radial_bisect(Vec(-d), q);
    CHECK(std::abs(r_plus - r_minus) <= 2 * q.bisect_tol);
}

TEST_CASE("two-maxima ratio flips across the boundary") {
    const Preset p = make_preset("vanderpol-8.1");
    RegionEstimator est(p.model);
    RegionQuery q = quick_query(RegionMethod::Kind::TwoMaximaHeuristic, 3, 0.005, 0.5);
    Vec d(2);
    d << 1.0, 0.0;
    DirectionResult detail;
    const double r = est.two_maxima_threshold(d, q, &detail);
    CHECK(r > q.r_lo);
    CHECK(r < q.r_hi);
    // Probes inside come out trapped, outside escaped, consistent with the
    // ratio test the threshold search ran.
    for (const auto& [radius, verdict] : detail.probes) {
        if (radius < 0.8 * r) CHECK(verdict == Classification::Trapped);
        if (radius > 1.2 * r) CHECK(verdict == Classification::Escaped);
    }
}

TEST_CASE("monotone norms cannot feed the two-maxima heuristic") {
    PolySystemModel m;
    m.dim = 2;
    m.A = {{TimeSignal::constant(-1.0), TimeSignal::constant(0.0)},
           {TimeSignal::constant(0.0), TimeSignal::constant(-2.0)}};
    m.f = PolyVectorField(2);
    m.f.add_term(0, TimeSignal::constant(1.0), {3, 0});
    m.F0 = 0.0;
    m.eta = {TimeSignal::constant(0.0), TimeSignal::constant(0.0)};
    RegionEstimator est(m);
    RegionQuery q = quick_query(RegionMethod::Kind::TwoMaximaHeuristic, 1, 0.1, 0.5);
    Vec d(2);
    d << 1.0, 0.0;
    CHECK_THROWS_AS(est.two_maxima_threshold(d, q), InsufficientOscillation);
}

TEST_CASE("autonomous models give initial-time independent estimates") {
    Preset p = make_preset("vanderpol-8.1");
    // Strip the stiffness modulation: every coefficient becomes constant.
    p.model.A[1][0] = TimeSignal::constant(-4.0);
    RegionEstimator est(p.model);
    RegionQuery q = quick_query(RegionMethod::Kind::ReferenceDirect, 1, 0.005, 0.8);
    q.n_directions = 4;
    const auto sweep = est.sweep_t0(q, {0.0, 1.3});
    REQUIRE(sweep.size() == 2);
    for (std::size_t d = 0; d < sweep[0].directions.size(); ++d) {
        CHECK(sweep[0].directions[d].flag == DirectionFlag::Ok);
        CHECK(std::abs(sweep[0].directions[d].threshold - sweep[1].directions[d].threshold) <=
              2 * q.bisect_tol);
    }
}

TEST_CASE("stepped stiffness shifts the boundary moderately across initial times") {
    const Preset p = make_preset("duffing-pulse");
    RegionEstimator est(p.model);
    RegionQuery q = quick_query(RegionMethod::Kind::ComparisonZ2, 1, p.r_lo, p.r_hi);
    q.n_directions = 4;
    q.workers = 2;
    const auto sweep = est.sweep_t0(q, {0.0, M_PI / 2});
    REQUIRE(sweep.size() == 2);
    for (std::size_t d = 0; d < sweep[0].directions.size(); ++d) {
        REQUIRE(sweep[0].directions[d].flag == DirectionFlag::Ok);
        REQUIRE(sweep[1].directions[d].flag == DirectionFlag::Ok);
        const double ratio = sweep[1].directions[d].threshold / sweep[0].directions[d].threshold;
        CHECK(ratio >= 0.5);
        CHECK(ratio <= 2.0);
    }
}

TEST_CASE("worker count does not change the estimate") {
    const Preset p = make_preset("vanderpol-8.1");
    RegionEstimator est(p.model);
    RegionQuery q = quick_query(RegionMethod::Kind::ReferenceDirect, 1, 0.002, 0.6);
    q.n_directions = 6;
    const RegionEstimate serial = est.estimate_region(q);
    q.workers = 3;
    const RegionEstimate parallel = est.estimate_region(q);
    REQUIRE(serial.directions.size() == parallel.directions.size());
    for (std::size_t i = 0; i < serial.directions.size(); ++i)
        CHECK(serial.directions[i].threshold == parallel.directions[i].threshold);
}

TEST_CASE("direction generators cover the supported dimensions") {
    const auto one = unit_directions(1, 2);
    REQUIRE(one.size() == 2);
    CHECK(one[0][0] == 1.0);
    CHECK(one[1][0] == -1.0);
    const auto two = unit_directions(2, 8);
    REQUIRE(two.size() == 8);
    for (const auto& d : two) CHECK(d.norm() == doctest::Approx(1.0));
    const auto three = unit_directions(3, 16);
    REQUIRE(three.size() == 16);
    for (const auto& d : three) CHECK(d.norm() == doctest::Approx(1.0));
}

}  // TEST_SUITE
