#pragma once

// Growth rates of homogeneous harmonics on a product cone.
//
// Every bounded-growth harmonic that is homogeneous under the dilations of
// the product splits per cone factor into r^{k/beta} trig(k theta) pieces, a
// harmonic polynomial in the Euclidean block, and polynomial radial dressing
// produced by joining the factors two at a time.  The admissible homogeneity
// degrees form the discrete set
//
//     d = sum_a k_a / beta_a + p + 2 * sum_l j_l,
//
// k_a >= 0, p the Euclidean harmonic degree, j_l >= 0 one join exponent per
// fold.  This header enumerates those degrees with multiplicity, builds the
// harmonics explicitly in the symbolic algebra, and exposes the subquadratic
// space that drives the pointwise polynomial approximation argument.

#include <vector>

#include "cones/modes.hpp"

namespace cones {

// Supremum of usable Hölder exponents: min over factors of 1, 1/beta - 1 for
// beta >= 1/2, 1/beta - 2 for beta < 1/2.  Positive iff every beta < 1/2
// factor has beta > 1/3... no constraint is imposed here; callers decide.
double max_holder_exponent(const ConeSpec& spec);

// Dimension of the homogeneous harmonic polynomials of degree p on R^q.
int harmonic_polynomial_dim(int q, int p);

// A basis of that space, expressed on the given product (cone coordinates
// unused).  Deterministic for fixed (q, p).
std::vector<PolarExpr> harmonic_polynomials(const ConeSpec& spec, int p);

// Data selecting one family of homogeneous harmonics.
struct ModeRecipe {
    std::vector<int> k;      // angular frequency per cone factor
    int p = 0;               // Euclidean harmonic degree (0 when q = 0)
    std::vector<int> joins;  // join exponent per fold, n + (q>0) - 1 entries

    double degree(const ConeSpec& spec) const;
    // trig choices times the Euclidean harmonic dimension
    int multiplicity(const ConeSpec& spec) const;
    std::string str() const;
};

struct GrowthRate {
    double degree = 0.0;
    int multiplicity = 0;
    std::vector<ModeRecipe> recipes;
};

// All growth rates up to max_degree, sorted, with degrees closer than
// merge_tol reported as one rate of summed multiplicity.
std::vector<GrowthRate> enumerate_growth_rates(const ConeSpec& spec,
                                               double max_degree,
                                               double merge_tol = 1e-9);

// Coefficients c_0..c_j of the radial dressing polynomial
// sum_i c_i tL^i (tL + tR)^{j-i} joining harmonics of degrees gammaL, gammaR
// on factors of real dimensions dimL, dimR (c_0 = 1).
std::vector<double> join_profile_coeffs(double gammaL, double gammaR, int dimL,
                                        int dimR, int j);

// The representative harmonic of a recipe (cosine in every factor, first
// Euclidean harmonic), and the full basis of its family.
PolarExpr build_mode(const ConeSpec& spec, const ModeRecipe& recipe);
std::vector<PolarExpr> build_mode_basis(const ConeSpec& spec,
                                        const ModeRecipe& recipe);

// Generating list for the space of harmonics of degree <= 2 (the constants,
// the Euclidean coordinates, the degree <= 2 cone modes present when
// beta >= 1/2, the Euclidean quadratic harmonics and the mixed quadratics).
// The list may be linearly dependent; projections use its span.
std::vector<PolarExpr> subquadratic_space(const ConeSpec& spec);

// Smallest growth rate strictly above 2 (the decay order of harmonics after
// subquadratic correction).  The first form scans the enumerated rates; the
// closed form minimizes over the finitely many candidate recipes.
double next_rate_above_quadratic(const ConeSpec& spec);
double next_rate_above_quadratic_closed_form(const ConeSpec& spec);

}  // namespace cones
