#pragma once

#include "tsr/odeint.hpp"
#include "tsr/signals.hpp"

#include <vector>

namespace tsr {

/// coeff(t) * x_1^{e_1} ... x_n^{e_n}
struct Monomial {
    TimeSignal coeff;
    std::vector<int> exponents;

    int total_degree() const {
        int d = 0;
        for (int e : exponents) d += e;
        return d;
    }
};

/// Polynomial vector field with time-dependent coefficients. When used as the
/// system nonlinearity every monomial must have total degree >= 2, so the
/// field vanishes at the origin together with its Jacobian.
class PolyVectorField {
  public:
    PolyVectorField() = default;
    explicit PolyVectorField(int dim) : dim_(dim), comps_(dim) {}

    int dim() const { return dim_; }
    const std::vector<std::vector<Monomial>>& components() const { return comps_; }

    void add_term(int component, TimeSignal coeff, std::vector<int> exponents);

    bool empty() const;
    int min_degree() const;
    int max_degree() const;
    std::vector<double> breakpoints() const;

    Vec eval(double t, const Vec& x) const;
    Mat jacobian(double t, const Vec& x) const;

    /// Enforces the degree >= 2 invariant required of a nonlinearity.
    void require_superlinear() const;

  private:
    int dim_ = 0;
    std::vector<std::vector<Monomial>> comps_;
};

/// q(s) = sum_k coeff[k] s^k with nonnegative coefficients; bounds the norm of
/// a vector polynomial evaluated at any z with ||z|| = s.
struct NormBoundPolynomial {
    std::vector<double> coeff;  // coeff[k] multiplies s^k

    double eval(double s) const;
    /// Constant part: value with every s-dependent term removed.
    double gamma() const { return coeff.empty() ? 0.0 : coeff[0]; }
    /// Coefficient of s^1.
    double linear() const { return coeff.size() > 1 ? coeff[1] : 0.0; }
    /// s-degree >= 1 part.
    double pi(double s) const;
    /// s-degree >= 2 part.
    double pi_minus(double s) const;
    int degree() const { return coeff.empty() ? 0 : static_cast<int>(coeff.size()) - 1; }

    void bump(int deg, double value);
};

/// Exact multinomial expansion of f(t, z + u) grouped by z-monomials with
/// coefficients that are polynomials in the reference point u.
class ShiftExpansion {
  public:
    explicit ShiftExpansion(const PolyVectorField& f);

    int dim() const { return dim_; }

    /// f(t, z + u) evaluated through the expansion (testing route).
    Vec eval(double t, const Vec& u, const Vec& z) const;

    /// Numeric coefficient of the z-monomial with exponents `z_exp` in
    /// component `comp` at reference (t, u).
    double coefficient_at(int comp, const std::vector<int>& z_exp, double t, const Vec& u) const;

    /// Norm-bound coefficients of the z-degree >= 1 part at (t, u): each term
    /// |coeff| |u|^{e_u} contributes at s-degree = total z-degree. The
    /// returned polynomial has gamma() == 0; the caller supplies the z-free
    /// part from the scheme's exactly evaluated forcing.
    NormBoundPolynomial z_term_bound_at(double t, const Vec& u) const;

  private:
    struct Term {
        std::vector<int> z_exp;
        std::vector<int> u_exp;
        double factor;  // product of binomial coefficients
        TimeSignal coeff;
        int z_degree;
    };
    int dim_ = 0;
    std::vector<std::vector<Term>> terms_;  // per component
};

/// L(t, s) with ||f(t, x)|| <= L(t, ||x||): one |coeff(t)| s^deg term per
/// monomial, via the 1-norm bound.
NormBoundPolynomial field_norm_bound(const PolyVectorField& f, double t);

struct LipschitzConstants {
    double l1;  // ||f(t,x)|| <= l1 ||x|| on the ball
    double l2;  // ||f(t,a)-f(t,b)|| <= l2 ||a-b|| on the ball
    double l3;  // ||f'(t,s)|| <= l3 ||s|| on the ball
};

/// Conservative constants valid on ||x|| <= radius over [t_lo, t_hi].
/// Analytic monomial bounds cross-checked against a deterministic sampling of
/// the ball; the larger value wins.
LipschitzConstants lipschitz_constants(const PolyVectorField& f, double radius, double t_lo, double t_hi);

/// x' = A(t) x + f(t, x) + F0 eta(t)
struct PolySystemModel {
    int dim = 0;
    std::vector<std::vector<TimeSignal>> A;  // row-major n x n
    PolyVectorField f;
    double F0 = 0.0;
    std::vector<TimeSignal> eta;

    Mat A_at(double t) const;
    Vec forcing_at(double t) const;  // F0 * eta(t)
    double forcing_norm_at(double t) const { return forcing_at(t).norm(); }
    std::vector<double> breakpoints() const;

    /// Degree constraint on f plus the unit-sup-norm convention on eta over
    /// the analysis horizon.
    void validate(double t_lo, double t_hi) const;
};

}  // namespace tsr
