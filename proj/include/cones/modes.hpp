#pragma once

// Symbolic algebra of separated functions on a product cone.
//
// A PolarExpr is a finite sum of terms
//
//     c * prod_a r_a^{kappa_a/beta_a + iota_a} trig_a(k_a theta_a)
//       * prod_i s_i^{p_i}
//
// with integer angular frequencies and integer Euclidean exponents.  Radial
// exponents are kept as the exact pair (kappa, iota): every function arising
// here (homogeneous harmonics, their products, their derivatives, polynomial
// dressings) has exponents of this shape, and storing the pair instead of a
// floating value means equal exponents always merge, so cancellations that
// are identities (a harmonic annihilated by the Laplacian, a derivative
// vanishing on a polynomial space) are exact at the level of term keys.

#include <string>
#include <vector>

#include "cones/geometry.hpp"

namespace cones {

// Radial exponent kappa / beta + iota of one cone factor.
struct RadialPow {
    int kappa = 0;
    int iota = 0;
    friend auto operator<=>(const RadialPow&, const RadialPow&) = default;
};

double radial_exponent(double beta, const RadialPow& e);

// trig(k theta) on one cone factor; k = 0 with sine = false is the constant 1.
struct AngularFactor {
    int k = 0;
    bool sine = false;
    friend auto operator<=>(const AngularFactor&, const AngularFactor&) = default;
};

struct Term {
    double coeff = 0.0;
    std::vector<RadialPow> r_pow;
    std::vector<AngularFactor> angular;
    std::vector<int> s_pow;

    // Degree under the dilation r -> l r, s -> l s.
    double homogeneity(const ConeSpec& spec) const;
};

class PolarExpr {
  public:
    PolarExpr() = default;  // zero with empty shape; usable as accumulator seed
    explicit PolarExpr(ConeSpec spec);  // the zero function on that space

    static PolarExpr constant(const ConeSpec& spec, double c);
    static PolarExpr coordinate_s(const ConeSpec& spec, int i);
    static PolarExpr radial_power(const ConeSpec& spec, int a, int p);  // r_a^p
    // r_a^{k/beta_a} trig(k theta_a): the factor's own harmonic
    static PolarExpr angular_mode(const ConeSpec& spec, int a, int k, bool sine);
    // general r_a^{kappa/beta_a + iota} trig(k theta_a)
    static PolarExpr radial_mode(const ConeSpec& spec, int a, RadialPow e,
                                 int k, bool sine);
    // s_i^p as a single term
    static PolarExpr s_monomial(const ConeSpec& spec,
                                const std::vector<int>& powers);
    // rho^2 = sum_a r_a^2 + sum_i s_i^2
    static PolarExpr squared_distance_to_apex(const ConeSpec& spec);

    const ConeSpec& spec() const { return spec_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool zero() const { return terms_.empty(); }
    double max_abs_coeff() const;

    // Merge like terms (exact integer keys) in a canonical order, drop zeros
    // and any coefficient below rel_tol times the largest magnitude.
    PolarExpr& simplify(double rel_tol = 0.0);

    // Evaluated pointwise.  Throws std::domain_error if some term is singular
    // or discontinuous at the point (negative radial exponent, or an angular
    // frequency with no radial factor, on the singular set).
    double eval(const ConePoint& p) const;
    bool evaluable_at(const ConePoint& p) const;

    // Common homogeneity degree of all terms; throws std::logic_error if the
    // expression is zero or inhomogeneous beyond tol.
    double homogeneity(double tol = 1e-9) const;

    std::string str() const;

    PolarExpr& operator+=(const PolarExpr& o);
    PolarExpr& operator-=(const PolarExpr& o);
    PolarExpr& operator*=(double c);
    friend PolarExpr operator+(PolarExpr x, const PolarExpr& y) { return x += y; }
    friend PolarExpr operator-(PolarExpr x, const PolarExpr& y) { return x -= y; }
    friend PolarExpr operator*(PolarExpr x, double c) { return x *= c; }
    friend PolarExpr operator*(double c, PolarExpr x) { return x *= c; }
    PolarExpr operator-() const;
    PolarExpr operator*(const PolarExpr& o) const;  // trig products expanded
    PolarExpr pow(int n) const;

    void push_term(Term t);  // appends without simplifying

  private:
    ConeSpec spec_;
    std::vector<Term> terms_;
};

// First-order coordinate symbols (all lower dilation degree by one).
PolarExpr d_s(const PolarExpr& u, int i);
PolarExpr d_r(const PolarExpr& u, int a);            // d/dr_a
PolarExpr d_theta_over_r(const PolarExpr& u, int a);  // (1/r_a) d/dtheta_a

// Conical Laplacian of one factor, d^2/dr^2 + (1/r) d/dr + (1/(beta r))^2
// d^2/dtheta^2, and the full Laplacian of the product.
PolarExpr conical_laplacian(const PolarExpr& u, int a);
PolarExpr laplacian(const PolarExpr& u);

// The admissible second-order operators: every combination of the coordinate
// symbols above that has bounded coefficients on the whole space.  Same-factor
// pure second derivatives (kinds rr_pure, tt_pure, rt_pure) are admissible
// only when that factor has beta < 1/2; the factor Laplacian is admissible
// for every beta.
struct DerivativeOp {
    enum class Kind {
        ss,          // d^2/ds_i ds_j                  (i <= j)
        rs,          // d^2/dr_a ds_i
        ts,          // (1/r_a) d^2/dtheta_a ds_i
        rr,          // d^2/dr_a dr_b                  (a < b)
        tt,          // (1/(r_a r_b)) d^2/dtheta_a dtheta_b   (a < b)
        rt,          // (1/r_b) d^2/dr_a dtheta_b      (a != b)
        factor_laplacian,  // conical Laplacian of factor a
        rr_pure,     // d^2/dr_a^2
        tt_pure,     // (1/r_a^2) d^2/dtheta_a^2
        rt_pure,     // (1/r_a) d^2/dr_a dtheta_a
    };
    Kind kind;
    int a = -1, b = -1;  // cone factor indices
    int i = -1, j = -1;  // Euclidean coordinate indices

    std::string str() const;
    friend auto operator<=>(const DerivativeOp&, const DerivativeOp&) = default;
};

std::vector<DerivativeOp> second_order_ops(const ConeSpec& spec);
PolarExpr apply(const DerivativeOp& op, const PolarExpr& u);

}  // namespace cones
