// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Pass --cli <path> to enable the CLI determinism checks.

#include "tsr/cli_commands.hpp"
#include "tsr/csv.hpp"
#include "tsr/error_bounds.hpp"
#include "tsr/presets.hpp"
#include "tsr/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace tsr;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void line(int idx, const std::string& slug, bool ok, const std::string& detail) {
    std::printf("%s criterion-%02d %s: %s\n", ok ? "PASS" : "FAIL", idx, slug.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

IntegratorOptions run_tol() {
    IntegratorOptions o;
    o.rel_tol = 1e-8;
    o.abs_tol = 1e-10;
    return o;
}

IntegratorOptions tight_tol() {
    IntegratorOptions o;
    o.rel_tol = 1e-10;
    o.abs_tol = 1e-12;
    return o;
}

/// Noise floor for comparisons between independently integrated traces.
double noise_slack(const IntegratorOptions& o, double scale) {
    return 1e-9 + 10.0 * (o.abs_tol + o.rel_tol * scale);
}

struct PresetInstance {
    std::string name;
    Preset preset;
};

std::vector<PresetInstance> preset_instances() {
    std::vector<PresetInstance> out;
    out.push_back({"vanderpol-8.1", make_preset("vanderpol-8.1")});
    out.push_back({"vanderpol-8.1(f0=0.23)", make_preset("vanderpol-8.1", PresetOverrides{.f0 = 0.23})});
    out.push_back({"vanderpol-fig3", make_preset("vanderpol-fig3")});
    out.push_back({"duffing-6a", make_preset("duffing-6a")});
    out.push_back({"duffing-6b", make_preset("duffing-6b")});
    out.push_back({"duffing-pulse(nu=-2)", make_preset("duffing-pulse")});
    out.push_back({"duffing-pulse(nu=4)", make_preset("duffing-pulse", PresetOverrides{.nu = 4.0})});
    return out;
}

RegionQuery base_query(const Preset& p, RegionMethod method) {
    RegionQuery q;
    q.horizon = 40.0;
    q.r_lo = p.r_lo;
    q.r_hi = p.r_hi;
    q.bisect_tol = 1e-3;
    q.method = method;
    q.integ = run_tol();
    q.workers = 4;
    return q;
}

ApproximationStack make_stack(const PolySystemModel& model, Scheme scheme, int m, const Vec& x0,
                              double horizon = 40.0, double t0 = 0.0,
                              const IntegratorOptions& integ = run_tol()) {
    ApproximationConfig cfg;
    cfg.scheme = scheme;
    cfg.m = m;
    cfg.t0 = t0;
    cfg.x0 = x0;
    cfg.horizon = horizon;
    cfg.integ = integ;
    return run_scheme(model, cfg);
}

Vec dir2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

/// Interior seed per preset: half the certified level-1 threshold along
/// (1,0). The level-1 region nests inside the deeper ones, so the seed is
/// interior for every certifying method used here.
struct InteriorPoint {
    double r_certified;
    Vec x0;
};

std::map<std::string, InteriorPoint> g_interior;

const InteriorPoint& interior_point(const PresetInstance& inst) {
    auto it = g_interior.find(inst.name);
    if (it != g_interior.end()) return it->second;
    RegionEstimator est(inst.preset.model);
    RegionQuery q = base_query(inst.preset, {RegionMethod::Kind::ComparisonZ2, 1, Scheme::A});
    const double r = est.radial_bisect(dir2(1.0, 0.0), q);
    InteriorPoint pt{r, Vec(0.5 * r * dir2(1.0, 0.0))};
    return g_interior.emplace(inst.name, std::move(pt)).first->second;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
}

std::string fmt(double v) { return format_double(v); }

// --------------------------------------------------------------------------

void criterion_1_two_maxima() {
    const Preset p = make_preset("vanderpol-8.1");
    RegionEstimator est(p.model);
    RegionQuery qh = base_query(p, {RegionMethod::Kind::TwoMaximaHeuristic, 3, Scheme::A});
    qh.bisect_tol = 2.5e-4;
    RegionQuery qr = base_query(p, {RegionMethod::Kind::ReferenceDirect, 1, Scheme::A});
    qr.bisect_tol = 2.5e-4;

    std::vector<double> ratios;
    bool ok = true;
    std::string fail_note;
    for (const Vec& d : unit_directions(2, 16)) {
        try {
            const double rh = est.two_maxima_threshold(d, qh);
            const double rr = est.radial_bisect(d, qr);
            ratios.push_back(rh / rr);
        } catch (const std::exception& e) {
            ok = false;
            fail_note = e.what();
            break;
        }
    }
    if (ok) {
        const double lo = *std::min_element(ratios.begin(), ratios.end());
        const double hi = *std::max_element(ratios.begin(), ratios.end());
        const double med = median(ratios);
        ok = lo >= 1.00 && hi <= 1.10 && med >= 1.02 && med <= 1.08;
        line(1, "two-maxima-excess", ok,
             "heuristic/reference over 16 directions: range [" + fmt(lo) + ", " + fmt(hi) + "], median " +
                 fmt(med) + " (required range in [1.00, 1.10], median in [1.02, 1.08])");
    } else {
        line(1, "two-maxima-excess", false, "threshold search failed: " + fail_note);
    }
}

void criterion_2_envelope_certificate() {
    const Preset p = make_preset("vanderpol-8.1");
    const FundamentalMatrixTrace trace = fundamental_matrix(p.model.A, 0.0, 40.0);
    const ExponentEstimate est = exponent_estimate(trace);
    if (!est.valid) {
        line(2, "envelope-certificate", false, "no valid exponential envelope for the linear block");
        return;
    }

    // Certificate value at the region-scale ball with the published forcing
    // level, for transparency: the smallness hypotheses fail at that scale
    // and the gate value comes out above one.
    RegionEstimator rest(p.model);
    RegionQuery qr = base_query(p, {RegionMethod::Kind::ReferenceDirect, 1, Scheme::A});
    double r_mean = 0.0;
    const auto dirs = unit_directions(2, 8);
    for (const Vec& d : dirs) r_mean += rest.radial_bisect(d, qr) / dirs.size();
    const auto lip_region = lipschitz_constants(p.model.f, r_mean, 0.0, 40.0);
    const double l_region = std::max(lip_region.l1, lip_region.l2);
    const double cert_region = l_region * est.N1 * 0.23 / est.v1;

    // Small-data instantiation: ball sized so the level envelopes stay inside
    // it, which is where the certificate's smallness hypotheses live.
    const double R = 0.02;
    const double x0n = R / (3.0 * est.N1);
    const double F0 = 0.5 * x0n * est.v1;
    const auto lip = lipschitz_constants(p.model.f, R, 0.0, 40.0);
    const double l = std::max(lip.l1, lip.l2);

    std::vector<double> grid;
    for (int i = 0; i <= 16000; ++i) grid.push_back(40.0 * i / 16000.0);
    const EnvelopeRecursion rec = envelope_recursion(est.v1, est.N1, l, F0, x0n, 6, grid);

    bool decay = rec.certificate;
    double worst_ratio = 0.0;
    for (int k = 3; k < 6; ++k) {  // curve k+1 against curve k
        double sup = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (rec.curves[k - 1][i] > 1e-300) sup = std::max(sup, rec.curves[k][i] / rec.curves[k - 1][i]);
        worst_ratio = std::max(worst_ratio, sup);
        decay = decay && sup < 1.0;
    }

    // The fitted envelope must dominate the actual levels of the recursion it
    // models (the A-constant scheme).
    const Preset forced = make_preset("vanderpol-8.1", PresetOverrides{.f0 = F0});
    const ApproximationStack stack = make_stack(forced.model, Scheme::B, 4, Vec(x0n * dir2(1.0, 0.0)));
    bool dominated = !stack.divergent();
    if (dominated) {
        const EnvelopeRecursion recd = envelope_recursion(est.v1, est.N1, l, F0, x0n, 4, stack.Ym.times);
        for (int k = 1; k <= 4 && dominated; ++k)
            for (std::size_t i = 0; i < stack.Ym.times.size(); ++i)
                if (stack.y[k - 1].at(stack.Ym.times[i]).norm() > 1.05 * recd.curves[k - 1][i] + 1e-12) {
                    dominated = false;
                    break;
                }
    }

    const bool ok = decay && dominated;
    line(2, "envelope-certificate", ok,
         "fitted v1=" + fmt(est.v1) + " N1=" + fmt(est.N1) + "; region-scale ball r=" + fmt(r_mean) +
             " gives certificate " + fmt(cert_region) +
             " (>= 1: smallness hypotheses absent at that scale); small-data ball R=" + fmt(R) +
             " gives certificate " + fmt(rec.certificate_value) + " < 1 with sup-ratio " + fmt(worst_ratio) +
             " < 1 for k >= 3, and the envelopes dominate the computed levels within 5%");
}

void criterion_3_telescoping() {
    bool ok = true;
    double worst = 0.0;
    std::string worst_case = "none";
    const double tol = 10.0 * run_tol().rel_tol;
    for (const auto& inst : preset_instances()) {
        const Vec x0 = interior_point(inst).x0;
        const Trajectory x = direct_solve(inst.preset.model, 0.0, x0, 40.0, run_tol());
        for (Scheme scheme : {Scheme::A, Scheme::B}) {
            for (int m : {1, 2, 3}) {
                const ApproximationStack stack = make_stack(inst.preset.model, scheme, m, x0);
                if (stack.divergent()) {
                    ok = false;
                    worst_case = inst.name + " m=" + std::to_string(m) + " diverged";
                    continue;
                }
                const Trajectory z = direct_error(inst.preset.model, stack, run_tol());
                double defect = 0.0;
                for (double t : stack.Ym.times) {
                    const double tt = std::min({t, x.t_end(), z.t_end()});
                    defect = std::max(defect, (stack.Ym.at(tt) + z.at(tt) - x.at(tt)).norm());
                }
                if (defect > worst) {
                    worst = defect;
                    worst_case = inst.name + " scheme " + scheme_name(scheme) + " m=" + std::to_string(m);
                }
                ok = ok && defect <= tol;
            }
        }
    }
    line(3, "telescoping-identity", ok,
         "7 preset instances x 2 schemes x m in {1,2,3}: max |Y_m + z - x| = " + fmt(worst) + " at " +
             worst_case + " (allowed " + fmt(tol) + ")");
}

void criterion_4_dominance() {
    bool ok = true;
    double min_margin_z2 = 1e300, min_margin_z1 = 1e300, max_z3_excess = -1e300;
    std::string note;
    const IntegratorOptions integ = tight_tol();
    for (const auto& inst : preset_instances()) {
        const Vec x0 = interior_point(inst).x0;
        const FundamentalMatrixTrace trace = fundamental_matrix(inst.preset.model.A, 0.0, 40.0);
        ComparisonOptions copts;
        copts.integ = integ;
        for (Scheme scheme : {Scheme::A, Scheme::B}) {
            for (int m : {1, 2}) {
                const ApproximationStack stack =
                    make_stack(inst.preset.model, scheme, m, x0, 40.0, 0.0, integ);
                if (stack.divergent()) {
                    ok = false;
                    note = inst.name + ": stack diverged at the interior point";
                    continue;
                }
                const Trajectory z = direct_error(inst.preset.model, stack, integ);
                const BoundTrace z2 = solve_Z2(inst.preset.model, stack, trace, copts);
                if (z2.escaped) {
                    ok = false;
                    note = inst.name + ": Z2 escaped at the interior point (scheme " +
                           std::string(scheme_name(scheme)) + ", m=" + std::to_string(m) + ")";
                    continue;
                }
                const Z3Result z3 = solve_Z3(inst.preset.model, stack, trace, copts);
                for (double t : stack.Ym.times) {
                    const double zn = z.norm_at(std::min(t, z.t_end()));
                    const double z2v = z2.at(t);
                    const double slack = noise_slack(integ, std::max(zn, z2v));
                    const double margin2 = z2v - zn;
                    min_margin_z2 = std::min(min_margin_z2, margin2);
                    ok = ok && margin2 >= -slack;
                    const double excess3 = z3.trace.at(std::min(t, z3.trace.Z.t_end())) - z2v;
                    max_z3_excess = std::max(max_z3_excess, excess3);
                    ok = ok && excess3 <= slack;
                }
                if (m == 2 && scheme == Scheme::A) {
                    const double ball = 1.5 * (interior_point(inst).r_certified + x0.norm());
                    const auto lip = lipschitz_constants(inst.preset.model.f, ball, 0.0, 40.0);
                    const SampledFunction gamma = gamma_forcing(inst.preset.model, stack, trace, lip);
                    const BoundTrace z1 = solve_Z1(inst.preset.model, stack, trace, lip, gamma, copts);
                    for (double t : stack.Ym.times) {
                        if (t > z1.Z.t_end()) break;  // dominance applies while the trace exists
                        const double zn = z.norm_at(std::min(t, z.t_end()));
                        const double margin1 = z1.at(t) - zn;
                        min_margin_z1 = std::min(min_margin_z1, margin1);
                        ok = ok && margin1 >= -noise_slack(integ, zn);
                    }
                }
            }
        }
    }
    line(4, "comparison-dominance", ok,
         "min (Z2 - |z|) = " + fmt(min_margin_z2) + ", min (Z1 - |z|) while Z1 exists = " + fmt(min_margin_z1) +
             ", max (Z3 - Z2) = " + fmt(max_z3_excess) + " (slack at the integration noise floor)" +
             (note.empty() ? "" : "; " + note));
}

void criterion_5_bilateral_sandwich() {
    bool ok = true;
    std::string note;
    const IntegratorOptions integ = tight_tol();
    for (const auto& inst : preset_instances()) {
        const Vec x0 = interior_point(inst).x0;
        const FundamentalMatrixTrace trace = fundamental_matrix(inst.preset.model.A, 0.0, 40.0);
        ComparisonOptions copts;
        copts.integ = integ;
        const ApproximationStack stack = make_stack(inst.preset.model, Scheme::A, 2, x0, 40.0, 0.0, integ);
        const BoundTrace z2 = solve_Z2(inst.preset.model, stack, trace, copts);
        if (stack.divergent() || z2.escaped) {
            ok = false;
            note += inst.name + ": machinery escaped at the interior point; ";
            continue;
        }
        const auto [lower, upper] = bilateral_bounds(stack, z2);
        const Trajectory x = direct_solve(inst.preset.model, 0.0, x0, 40.0, integ);
        for (std::size_t i = 0; i < lower.times.size(); ++i) {
            const double t = lower.times[i];
            const double xn = x.norm_at(std::min(t, x.t_end()));
            const double slack = noise_slack(integ, std::max(xn, upper.states[i][0]));
            if (!(lower.states[i][0] <= xn + slack) || !(upper.states[i][0] + slack >= xn)) {
                ok = false;
                note += inst.name + ": sandwich violated at t=" + fmt(t) + "; ";
                break;
            }
        }
    }

    // The relative mid-horizon gap shrinks when the data moves inward.
    const PresetInstance vdp{"vanderpol-8.1", make_preset("vanderpol-8.1")};
    const double r2 = interior_point(vdp).r_certified;
    auto gap_at = [&](double radius) {
        const FundamentalMatrixTrace trace = fundamental_matrix(vdp.preset.model.A, 0.0, 40.0);
        ComparisonOptions copts;
        copts.integ = run_tol();
        const ApproximationStack stack = make_stack(vdp.preset.model, Scheme::A, 2, Vec(radius * dir2(1, 0)));
        const BoundTrace z2 = solve_Z2(vdp.preset.model, stack, trace, copts);
        const auto [lower, upper] = bilateral_bounds(stack, z2);
        const double t_mid = 20.0;
        const double hi = upper.value_at(std::min(t_mid, upper.t_end()));
        const double lo = lower.value_at(std::min(t_mid, lower.t_end()));
        return (hi - lo) / std::max(hi, 1e-30);
    };
    const double gap_near = gap_at(0.9 * r2);
    const double gap_mid = gap_at(0.45 * r2);
    ok = ok && gap_mid < gap_near;
    line(5, "bilateral-sandwich", ok,
         "lower <= |x| <= upper on all presets at interior data; mid-horizon relative gap " + fmt(gap_near) +
             " near the boundary vs " + fmt(gap_mid) + " at half radius" + (note.empty() ? "" : "; " + note));
}

struct RegionTable {
    RegionEstimate a1, a2, a3, b1, b2, b3, z3, ref;
};

std::optional<RegionTable> g_table;

const RegionTable& region_table() {
    if (g_table) return *g_table;
    const Preset p = make_preset("vanderpol-8.1");
    RegionEstimator est(p.model);
    auto run = [&](RegionMethod::Kind kind, int m, Scheme s) {
        RegionQuery q = base_query(p, {kind, m, s});
        q.n_directions = 16;
        return est.estimate_region(q);
    };
    RegionTable t;
    t.a1 = run(RegionMethod::Kind::ComparisonZ2, 1, Scheme::A);
    t.a2 = run(RegionMethod::Kind::ComparisonZ2, 2, Scheme::A);
    t.a3 = run(RegionMethod::Kind::ComparisonZ2, 3, Scheme::A);
    t.b1 = run(RegionMethod::Kind::ComparisonZ2, 1, Scheme::B);
    t.b2 = run(RegionMethod::Kind::ComparisonZ2, 2, Scheme::B);
    t.b3 = run(RegionMethod::Kind::ComparisonZ2, 3, Scheme::B);
    t.z3 = run(RegionMethod::Kind::LinearizedZ3, 3, Scheme::A);
    t.ref = run(RegionMethod::Kind::ReferenceDirect, 1, Scheme::A);
    g_table = std::move(t);
    return *g_table;
}

void criterion_6_monotone_regions() {
    const RegionTable& t = region_table();
    const double tol = 1e-3;
    bool ok = true;
    std::string note;
    for (std::size_t i = 0; i < t.a1.directions.size(); ++i) {
        for (const RegionEstimate* est : {&t.a1, &t.a2, &t.a3, &t.b1, &t.b2, &t.b3, &t.ref})
            if (est->directions[i].flag != DirectionFlag::Ok) {
                ok = false;
                note = "flagged direction";
            }
        const double a1 = t.a1.directions[i].threshold, a2 = t.a2.directions[i].threshold,
                     a3 = t.a3.directions[i].threshold, ref = t.ref.directions[i].threshold;
        const double b1 = t.b1.directions[i].threshold, b2 = t.b2.directions[i].threshold,
                     b3 = t.b3.directions[i].threshold;
        if (!(a1 <= a2 + tol && a2 <= a3 + tol && a3 <= ref + tol)) {
            ok = false;
            note = "level ordering violated at angle " + fmt(t.a1.directions[i].angle);
        }
        if (!(a1 >= b1 - tol && a2 >= b2 - tol && a3 >= b3 - tol)) {
            ok = false;
            note = "scheme ordering violated at angle " + fmt(t.a1.directions[i].angle);
        }
    }
    line(6, "monotone-region-improvement", ok,
         "16 directions: r(m=1) <= r(m=2) <= r(m=3) <= r(reference) and scheme A >= scheme B at fixed m" +
             (note.empty() ? "" : "; " + note));
}

void criterion_7_linearized_excess() {
    const RegionTable& t = region_table();
    const double tol = 1e-3;
    bool ok = true;
    double min_gap = 1e300;
    for (std::size_t i = 0; i < t.a3.directions.size(); ++i) {
        const double gap = t.z3.directions[i].threshold - t.a3.directions[i].threshold;
        min_gap = std::min(min_gap, gap);
        ok = ok && gap >= -tol;
    }
    line(7, "linearized-excess", ok,
         "min over 16 directions of (linearized threshold minus nonlinear m=3 threshold) = " + fmt(min_gap));
}

void criterion_8_pulse_irrelevance() {
    const double t0 = 2.0;  // past the switch at pi/2
    auto estimate = [&](double nu) {
        const Preset p = make_preset("duffing-pulse", PresetOverrides{.nu = nu});
        RegionEstimator est(p.model);
        RegionQuery q = base_query(p, {RegionMethod::Kind::ComparisonZ2, 2, Scheme::A});
        q.t0 = t0;
        q.n_directions = 8;
        return est.estimate_region(q);
    };
    const RegionEstimate flat = estimate(0.0);
    const RegionEstimate down = estimate(-2.0);
    const RegionEstimate up = estimate(4.0);
    bool ok = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < flat.directions.size(); ++i) {
        ok = ok && flat.directions[i].flag == DirectionFlag::Ok;
        for (const RegionEstimate* est : {&down, &up}) {
            const double diff = std::abs(est->directions[i].threshold - flat.directions[i].threshold);
            worst = std::max(worst, diff);
            ok = ok && est->directions[i].flag == DirectionFlag::Ok && diff <= 2e-3;
        }
    }
    line(8, "pulse-irrelevance-after-switch", ok,
         "t0=2 boundaries for stepped stiffness (nu=-2, nu=4) vs constant: max per-direction deviation " +
             fmt(worst) + " (allowed 2x bisection tolerance = 0.002)");
}

void criterion_9_trivial_suite() {
    bool ok = true;
    std::string note;

    // Linear model: higher levels and the nonlinear bound vanish.
    {
        Preset p = make_preset("vanderpol-8.1");
        p.model.f = PolyVectorField(2);
        const ApproximationStack stack = make_stack(p.model, Scheme::A, 3, dir2(0.1, -0.05), 10.0);
        for (int k = 2; k <= 3; ++k)
            for (const auto& s : stack.y[k - 1].states) ok = ok && s.norm() < 1e-12;
        const FundamentalMatrixTrace trace = fundamental_matrix(p.model.A, 0.0, 10.0);
        ComparisonOptions copts;
        copts.integ = run_tol();
        const BoundTrace z2 = solve_Z2(p.model, stack, trace, copts);
        for (const auto& s : z2.Z.states) ok = ok && s.norm() == 0.0;
        if (!ok) note += "linear-model collapse failed; ";
    }

    // Zero data keeps everything at zero.
    {
        const Preset p = make_preset("vanderpol-8.1");
        const ApproximationStack stack = make_stack(p.model, Scheme::B, 2, Vec(Vec::Zero(2)), 10.0);
        const Trajectory x = direct_solve(p.model, 0.0, Vec::Zero(2), 10.0, run_tol());
        bool zero = true;
        for (const auto& s : stack.Ym.states) zero = zero && s.norm() == 0.0;
        for (const auto& s : x.states) zero = zero && s.norm() == 0.0;
        ok = ok && zero;
        if (!zero) note += "zero-data run not identically zero; ";
    }

    // Isotropic contraction diagnostics.
    {
        std::vector<std::vector<TimeSignal>> A{{TimeSignal::constant(-1.0), TimeSignal::constant(0.0)},
                                               {TimeSignal::constant(0.0), TimeSignal::constant(-1.0)}};
        const FundamentalMatrixTrace tr = fundamental_matrix(A, 0.0, 6.0);
        bool diag = true;
        for (std::size_t i = 0; i < tr.times.size(); ++i)
            diag = diag && std::abs(tr.p[i] + 1.0) < 1e-3 && std::abs(tr.c[i] - 1.0) < 1e-6;
        ok = ok && diag;
        if (!diag) note += "contraction diagnostics off; ";
    }

    // One-dimensional cubic separatrix.
    {
        PolySystemModel m;
        m.dim = 1;
        m.A = {{TimeSignal::constant(-1.0)}};
        m.f = PolyVectorField(1);
        m.f.add_term(0, TimeSignal::constant(1.0), {3});
        m.F0 = 0.0;
        m.eta = {TimeSignal::constant(0.0)};
        RegionEstimator est(m);
        RegionQuery q;
        q.horizon = 40.0;
        q.r_lo = 0.1;
        q.r_hi = 2.0;
        q.bisect_tol = 1e-3;
        q.method = {RegionMethod::Kind::ReferenceDirect, 1, Scheme::A};
        q.integ = run_tol();
        const double r = est.radial_bisect(Vec::Constant(1, 1.0), q);
        const bool sep = std::abs(r - 1.0) <= 2 * q.bisect_tol;
        ok = ok && sep;
        if (!sep) note += "cubic separatrix found at " + fmt(r) + "; ";
    }

    line(9, "trivial-cases", ok,
         note.empty() ? "linear collapse, zero data, contraction diagnostics, cubic separatrix all exact"
                      : note);
}

void criterion_10_determinism(const std::string& cli) {
    if (cli.empty()) {
        line(10, "byte-identical-outputs", false, "no --cli path provided");
        return;
    }
    const fs::path base = fs::temp_directory_path() / "tsr_acceptance_det";
    fs::remove_all(base);
    fs::create_directories(base);
    auto run = [&](const std::string& args, const std::string& out) {
        const std::string cmd = cli + " " + args + " --out " + (base / out).string() + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    bool ok = true;
    std::string note;
    const std::string sim_args = "simulate --preset vanderpol-8.1 --m 2 --x0 0.02,0 --horizon 15";
    if (run(sim_args, "sim_a") != 0 || run(sim_args, "sim_b") != 0) {
        ok = false;
        note += "simulate run failed; ";
    } else {
        for (const char* f : {"simulate.csv", "levels.csv"})
            if (read_file((base / "sim_a" / f).string()) != read_file((base / "sim_b" / f).string())) {
                ok = false;
                note += std::string(f) + " differs between runs; ";
            }
    }
    const std::string reg_args = "region --preset vanderpol-8.1 --methods z2:1 --directions 6 --horizon 40";
    if (run(reg_args + " --workers 1", "reg_a") != 0 || run(reg_args + " --workers 3", "reg_b") != 0) {
        ok = false;
        note += "region run failed; ";
    } else if (read_file((base / "reg_a" / "region_z2-m1-A.csv").string()) !=
               read_file((base / "reg_b" / "region_z2-m1-A.csv").string())) {
        ok = false;
        note += "region csv differs across worker counts; ";
    }
    fs::remove_all(base);
    line(10, "byte-identical-outputs", ok,
         note.empty() ? "repeated simulate runs and region runs at workers 1 vs 3 are byte-identical" : note);
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];

    criterion_1_two_maxima();
    criterion_2_envelope_certificate();
    criterion_3_telescoping();
    criterion_4_dominance();
    criterion_5_bilateral_sandwich();
    criterion_6_monotone_regions();
    criterion_7_linearized_excess();
    criterion_8_pulse_irrelevance();
    criterion_9_trivial_suite();
    criterion_10_determinism(cli);

    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
