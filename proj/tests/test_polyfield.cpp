#include "tsr/polyfield.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tsr;

namespace {

PolyVectorField cubic_velocity_field(double alpha2) {
    // f = [0, -alpha2 x2^3]
    PolyVectorField f(2);
    f.add_term(1, TimeSignal::constant(-alpha2), {0, 3});
    return f;
}

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

// Deterministic random polynomial fields for the derivative oracle.
PolyVectorField random_field(std::mt19937& rng, int dim, int max_deg) {
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    std::uniform_int_distribution<int> n_terms(1, 4), deg(0, max_deg);
    PolyVectorField f(dim);
    for (int i = 0; i < dim; ++i) {
        const int terms = n_terms(rng);
        for (int k = 0; k < terms; ++k) {
            std::vector<int> e(dim);
            int total = 0;
            for (int j = 0; j < dim; ++j) {
                e[j] = deg(rng);
                total += e[j];
            }
            if (total < 2) e[0] += 2 - total;
            f.add_term(i, TimeSignal::constant(coeff(rng)), e);
        }
    }
    return f;
}

}  // namespace

TEST_SUITE("polyfield") {

TEST_CASE("cubic field evaluation") {
    const PolyVectorField f = cubic_velocity_field(-100.0);
    const Vec v = f.eval(3.7, vec2(0.0, 1.0));
    CHECK(v[0] == 0.0);
    CHECK(v[1] == doctest::Approx(100.0));
    CHECK(f.eval(1.0, vec2(0.0, 0.0)).norm() == 0.0);
}

TEST_CASE("cubic displacement field evaluation") {
    // f = [0, -alpha2 x1^3] with alpha2 = -10
    PolyVectorField f(2);
    f.add_term(1, TimeSignal::constant(10.0), {3, 0});
    const Vec v = f.eval(0.0, vec2(2.0, 5.0));
    CHECK(v[0] == 0.0);
    CHECK(v[1] == doctest::Approx(80.0));
}

TEST_CASE("jacobian of the cubic field") {
    const PolyVectorField f = cubic_velocity_field(-100.0);
    const double y21 = 0.37;
    const Mat J = f.jacobian(0.0, vec2(0.0, y21));
    CHECK(J(0, 0) == 0.0);
    CHECK(J(0, 1) == 0.0);
    CHECK(J(1, 0) == 0.0);
    CHECK(J(1, 1) == doctest::Approx(300.0 * y21 * y21));
    CHECK(f.jacobian(0.0, vec2(0.0, 0.0)).norm() == 0.0);
}

TEST_CASE("jacobian matches central finite differences on random fields") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    const double h = 1e-7;
    for (int trial = 0; trial < 25; ++trial) {
        const int dim = 2 + trial % 3;
        const PolyVectorField f = random_field(rng, dim, 4);
        Vec x(dim);
        for (int j = 0; j < dim; ++j) x[j] = coord(rng);
        const Mat J = f.jacobian(0.4, x);
        for (int j = 0; j < dim; ++j) {
            Vec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const Vec col = (f.eval(0.4, xp) - f.eval(0.4, xm)) / (2 * h);
            for (int i = 0; i < dim; ++i) CHECK(std::abs(J(i, j) - col[i]) < 1e-6);
        }
    }
}

TEST_CASE("shift expansion of the cubic matches the binomial identity") {
    const PolyVectorField f = cubic_velocity_field(-100.0);
    const ShiftExpansion shift(f);
    const double Y22 = 0.21;
    const Vec u = vec2(0.13, Y22);
    // -alpha2 (3 Y22^2 z2 + 3 Y22 z2^2 + z2^3 + Y22^3) with -alpha2 = 100
    CHECK(shift.coefficient_at(1, {0, 1}, 0.0, u) == doctest::Approx(100.0 * 3 * Y22 * Y22));
    CHECK(shift.coefficient_at(1, {0, 2}, 0.0, u) == doctest::Approx(100.0 * 3 * Y22));
    CHECK(shift.coefficient_at(1, {0, 3}, 0.0, u) == doctest::Approx(100.0));
    CHECK(shift.coefficient_at(1, {0, 0}, 0.0, u) == doctest::Approx(100.0 * Y22 * Y22 * Y22));
}

TEST_CASE("scalar quadratic shift") {
    PolyVectorField f(1);
    f.add_term(0, TimeSignal::constant(1.0), {2});
    const ShiftExpansion shift(f);
    const Vec a = Vec::Constant(1, 0.8);
    CHECK(shift.coefficient_at(0, {2}, 0.0, a) == doctest::Approx(1.0));
    CHECK(shift.coefficient_at(0, {1}, 0.0, a) == doctest::Approx(1.6));
    CHECK(shift.coefficient_at(0, {0}, 0.0, a) == doctest::Approx(0.64));
}

TEST_CASE("shift by zero reproduces the field") {
    std::mt19937 rng(7);
    const PolyVectorField f = random_field(rng, 3, 3);
    const ShiftExpansion shift(f);
    const Vec u = Vec::Zero(3);
    Vec z(3);
    z << 0.3, -0.7, 0.2;
    CHECK((shift.eval(1.3, u, z) - f.eval(1.3, z)).norm() < 1e-12);
}

TEST_CASE("shifted evaluation equals the field at z + u") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> coord(-0.8, 0.8);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 2 + trial % 2;
        const PolyVectorField f = random_field(rng, dim, 4);
        const ShiftExpansion shift(f);
        Vec u(dim), z(dim);
        for (int j = 0; j < dim; ++j) {
            u[j] = coord(rng);
            z[j] = coord(rng);
        }
        const Vec lhs = shift.eval(0.7, u, z);
        const Vec rhs = f.eval(0.7, Vec(z + u));
        CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));
    }
}

TEST_CASE("norm bound sandwiches the shifted field") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> coord(-1.2, 1.2);
    int checked = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = 2 + trial % 2;
        const PolyVectorField f = random_field(rng, dim, 3);
        const ShiftExpansion shift(f);
        for (int s = 0; s < 1000; ++s) {
            Vec u(dim), z(dim);
            for (int j = 0; j < dim; ++j) {
                u[j] = coord(rng);
                z[j] = coord(rng);
            }
            const double t = coord(rng);
            NormBoundPolynomial q = shift.z_term_bound_at(t, u);
            q.coeff[0] = f.eval(t, u).lpNorm<1>();
            // The bound is analytic: no tolerance beyond roundoff slack.
            const double lhs = shift.eval(t, u, z).norm();
            CHECK(lhs <= q.eval(z.norm()) * (1 + 1e-12) + 1e-12);
            ++checked;
        }
    }
    CHECK(checked == 10000);
}

TEST_CASE("z-free polynomial collapses to a constant bound") {
    PolyVectorField f(2);
    const ShiftExpansion shift(f);
    const NormBoundPolynomial q = shift.z_term_bound_at(0.0, vec2(1.0, 2.0));
    CHECK(q.pi(3.0) == 0.0);
    CHECK(q.gamma() == 0.0);
}

TEST_CASE("field norm bound of the worked example") {
    // f = [a1 x1^2 x2, a2 x1 x2] gives |a1| s^3 + |a2| s^2.
    PolyVectorField f(2);
    f.add_term(0, TimeSignal::constant(2.5), {2, 1});
    f.add_term(1, TimeSignal::constant(-1.5), {1, 1});
    const NormBoundPolynomial L = field_norm_bound(f, 0.0);
    CHECK(L.eval(2.0) == doctest::Approx(2.5 * 8 + 1.5 * 4));
    CHECK(L.gamma() == 0.0);
}

TEST_CASE("lipschitz constants of the cubic field") {
    const PolyVectorField f = cubic_velocity_field(-100.0);
    const auto lip = lipschitz_constants(f, 0.1, 0.0, 40.0);
    // sup ||f'|| on the ball is 3 * 100 * R^2 = 3.
    CHECK(lip.l2 >= 3.0);
    CHECK(lip.l2 <= 3.0 * 1.05);
    // Dense sampling of the ball must not exceed the analytic value.
    double sampled = 0.0;
    for (int i = 0; i <= 50; ++i) {
        const double r = 0.1 * i / 50.0;
        sampled = std::max(sampled, f.jacobian(0.0, vec2(0.0, r)).norm());
    }
    CHECK(lip.l2 >= sampled);
}

TEST_CASE("lipschitz constants vanish with the ball for cubic fields") {
    const PolyVectorField f = cubic_velocity_field(-1.0);
    const auto tiny = lipschitz_constants(f, 1e-6, 0.0, 1.0);
    CHECK(tiny.l1 < 1e-10);
    CHECK(tiny.l2 < 1e-10);
    CHECK(tiny.l3 < 1e-4);
    PolyVectorField zero(2);
    const auto z = lipschitz_constants(zero, 1.0, 0.0, 1.0);
    CHECK(z.l1 == 0.0);
    CHECK(z.l2 == 0.0);
    CHECK(z.l3 == 0.0);
    CHECK_THROWS_AS(lipschitz_constants(f, 0.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("degree constraint enforcement") {
    PolyVectorField f(2);
    f.add_term(0, TimeSignal::constant(1.0), {1, 0});
    CHECK_THROWS_AS(f.require_superlinear(), std::invalid_argument);
    PolySystemModel m;
    m.dim = 2;
    m.A = {{TimeSignal::constant(0.0), TimeSignal::constant(1.0)},
           {TimeSignal::constant(-4.0), TimeSignal::constant(-1.2)}};
    m.f = f;
    m.F0 = 0.0;
    m.eta = {TimeSignal::constant(0.0), TimeSignal::constant(0.0)};
    CHECK_THROWS_AS(m.validate(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("eta sup norm convention") {
    PolySystemModel m;
    m.dim = 2;
    m.A = {{TimeSignal::constant(0.0), TimeSignal::constant(1.0)},
           {TimeSignal::constant(-4.0), TimeSignal::constant(-1.2)}};
    m.f = PolyVectorField(2);
    m.F0 = 1.0;
    m.eta = {TimeSignal::constant(0.0), TimeSignal::sinusoid(2.0, 1.0, 0.0)};
    CHECK_THROWS_AS(m.validate(0.0, 40.0), std::invalid_argument);
    m.eta[1] = TimeSignal::sinusoid(1.0, 1.0, 0.0);
    CHECK_NOTHROW(m.validate(0.0, 40.0));
}

}  // TEST_SUITE
