#pragma once

// Scaled L2 norms over geodesic balls, least-squares projection onto finite
// spans of harmonics, Campanato-style Hoelder estimation from dyadic decay,
// and the two growth inequalities that drive the correction iteration:
// monotonicity of ||u||_{B_rho} at a full singular point and its off-center
// perturbation.

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cones/geometry.hpp"
#include "cones/modes.hpp"
#include "cones/quadrature.hpp"

namespace cones {

using Integrand = BallQuadrature::Integrand;

// Wrap a symbolic expression as a pointwise integrand.  Evaluation failures
// on the singular set (negative radial exponents) propagate; the quadrature
// designs never place a point there.
Integrand as_integrand(const PolarExpr& u);

// The dilation-invariant norm (rho^{-m} int_{B(x,rho)} u^2 dV)^{1/2}.
struct ScaledNorm {
    double value = 0.0;
    double stderr_ = 0.0;
    ConePoint center;
    double radius = 0.0;
};

ScaledNorm scaled_norm(const BallQuadrature& quad, const Integrand& u);
ScaledNorm scaled_norm(const ConeSpec& spec, const Integrand& u,
                       const ConePoint& center, double radius,
                       const QuadConfig& cfg = {});

// L2(B) least-squares coefficients of f against a finite basis.
//
// The Gram matrix is assembled from the replicate-averaged point set,
// diagonally rescaled, and truncated to its numerically nonzero eigenspace
// (relative threshold 1e-10; the retained dimension and condition number are
// reported).  Coefficients are then re-solved once per replicate inside that
// fixed subspace, so the standard errors see both right-hand-side and Gram
// fluctuations.
struct Projection {
    Eigen::VectorXd coeffs;
    Eigen::VectorXd coeff_stderr;
    int rank = 0;            // retained eigenvalues of the scaled Gram matrix
    double condition = 0.0;  // within the retained eigenspace
};

Projection project_span(const std::vector<PolarExpr>& basis,
                        const BallQuadrature& quad, const Integrand& f);

// Sum of coeffs[i] * basis[i], merged termwise.
PolarExpr combine(const std::vector<PolarExpr>& basis,
                  const Eigen::VectorXd& coeffs);

// Weighted least squares for log(value) = intercept + slope * log(rho).
// Weights are the inverse variances of log(value), so scales with large
// relative error (typically the finest) count less.
struct DecayFit {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    int points_used = 0;  // rows with a positive value; 0 or 1 means no fit
};

DecayFit fit_log_slope(const std::vector<double>& rho,
                       const std::vector<double>& value,
                       const std::vector<double>& stderr_);

// One ball of a Campanato scan.
struct CampanatoRow {
    int center_index = 0;
    double rho = 0.0;
    double mean = 0.0;  // average of f over the ball
    double norm = 0.0;  // scaled L2 norm of f - mean on the same point set
    double norm_stderr = 0.0;
    double ratio = 0.0;  // norm / rho^alpha
};

struct CampanatoReport {
    double alpha = 0.0;
    double constant = 0.0;  // max ratio over all centers and scales
    std::vector<CampanatoRow> rows;
    DecayFit fit;  // pooled log-log decay of norm against rho
};

// 2^{-1}, ..., 2^{-depth}.
std::vector<double> dyadic_scales(int depth = 8);

// Scans |f - mean| over B(x, rho) for every center and scale; the maximal
// ratio against rho^alpha bounds the Hoelder seminorm up to a constant
// depending only on (alpha, beta, m).  Mean and norm share one point set per
// ball, and each ball draws an independent randomization stream.
CampanatoReport campanato_estimate(const ConeSpec& spec, const Integrand& f,
                                   const std::vector<ConePoint>& centers,
                                   double alpha,
                                   const std::vector<double>& scales,
                                   const QuadConfig& cfg = {});

// Brute-force two-point quotient sup |f(x) - f(y)| / d(x, y)^alpha over
// random pairs from a ball: the independent oracle the Campanato route is
// compared against.
double holder_pair_supremum(const ConeSpec& spec, const Integrand& f,
                            const ConePoint& center, double radius,
                            double alpha, int pairs,
                            std::uint64_t seed = 12345);

// One-sided variant anchored at the center:
// sup_y |f(y) - f(center)| / d(center, y)^alpha over a ball sample.
double holder_at_point(const ConeSpec& spec, const Integrand& f,
                       const ConePoint& center, double radius, double alpha,
                       std::uint64_t seed = 12345);

// ||u||_{B_rho} <= rho^degree ||u||_{B_1} for balls centered at a point of
// the full singular set, when u is spanned by harmonics of degree >= degree.
// Equality at every rho characterizes homogeneity of exact degree.
struct MonotonicityRow {
    double rho = 0.0;
    double lhs = 0.0;      // ||u||_{B_rho}
    double bound = 0.0;    // rho^degree * ||u||_{B_1}
    double stderr_ = 0.0;  // combined quadrature error of both sides
    double margin = 0.0;   // bound - lhs
};

struct MonotonicityReport {
    double degree = 0.0;
    std::vector<MonotonicityRow> rows;
    bool holds = false;   // lhs <= bound + 5 stderr at every scale
    bool strict = false;  // margin >= 5 stderr at every scale
    double max_equality_error = 0.0;  // max |lhs - bound| / bound
};

// 0.1, 0.2, ..., 0.9.
std::vector<double> default_monotonicity_scales();

MonotonicityReport check_monotonicity(const ConeSpec& spec, const Integrand& u,
                                      double degree,
                                      const std::vector<double>& scales,
                                      const QuadConfig& cfg = {});

// Sufficient factor for the off-center decay step: comparing B(x, lambda)
// and B(x, 1) with concentric balls at the apex costs
//   F(eps) = lambda^{dstar-2-alpha} (1+eps/lambda)^{m+dstar} (1-eps)^{-m-dstar}
// at eps = |x|, and the decay inequality follows whenever F(eps) < 1.
double off_center_factor(const ConeSpec& spec, double eps, double lambda,
                         double alpha, double dstar);

struct OffCenterReport {
    double eps = 0.0;               // distance of the center to the apex
    double sufficient_bound = 0.0;  // F(eps)
    bool applicable = false;        // F(eps) < 1
    double lhs = 0.0;               // ||u||_{B(x, lambda)}
    double rhs = 0.0;               // lambda^{2+alpha} ||u||_{B(x, 1)}
    double stderr_ = 0.0;           // combined quadrature error
    // Measured lhs < rhs with a 5 stderr margin.  Independent of
    // `applicable`: the inequality can hold beyond the sufficient bound.
    bool passed = false;
};

// u must be spanned by harmonics orthogonal to the subquadratic space and
// 0 < alpha < mu.  Evaluates both sides by quadrature; when F(eps) >= 1 the
// check is reported inapplicable rather than failed.
OffCenterReport check_off_center_decay(const ConeSpec& spec,
                                       const ConePoint& x, const Integrand& u,
                                       double lambda, double alpha,
                                       const QuadConfig& cfg = {});

}  // namespace cones
