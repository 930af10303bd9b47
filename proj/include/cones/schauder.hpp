#pragma once

// Pointwise second derivatives by scale iteration.
//
// Around a point x the function is examined on the shrinking balls
// B(x, lambda^k).  Every scale is classified: at a good scale each cone
// factor is either near its apex (kept in the model cone) or far enough to
// develop onto a Euclidean plane.  The function is projected onto the
// model's subquadratic harmonics over the ball, the projection is
// subtracted, and its second derivatives at the center accumulate into tau.
// When the remainders decay like lambda^{(2+alpha)k}, tau converges to the
// second derivative at x and the remainder sizes control a Campanato-type
// seminorm of the derivative.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cones/analysis.hpp"
#include "cones/geometry.hpp"
#include "cones/modes.hpp"
#include "cones/quadrature.hpp"
#include "cones/solver_spectral.hpp"
#include "cones/spectrum.hpp"

namespace cones {

// ---------------------------------------------------------------------------
// Change of frame at the center of a developing chart
// ---------------------------------------------------------------------------

// At the chart's center the radial/angular directions of a developed factor
// align with its new Euclidean pair (X, Y):
//
//     d/dr             -> d/dX
//     (1/r) d/dtheta   -> beta d/dY
//
// and the same-factor second-order combinations pick up the curvature of the
// polar frame through first-order terms weighted by 1/r_c, where r_c is the
// factor radius of the center:
//
//     d^2/dr^2              -> d^2/dX^2
//     (1/r^2) d^2/dtheta^2  -> beta^2 (d^2/dY^2 - (1/r_c) d/dX)
//     (1/r) d^2/dr dtheta   -> beta (d^2/dX dY + (1/r_c) d/dY)
//
// Kept factors and original Euclidean coordinates pass through unchanged;
// cross-factor operators factor into the first-order rules.
struct FrameMap {
    ConeSpec source;
    ConeSpec model;
    std::vector<int> kept;            // original cone indices kept, ascending
    std::vector<int> developed;       // original cone indices developed
    std::vector<double> developed_r;  // r_a(center) per developed factor
    ConePoint center_model;           // image of the center in the model
};

FrameMap make_frame(const ConeSpec& spec, const ConePoint& center,
                    const std::vector<int>& kept_factors);

// The operator rewritten through the frame, applied to a model-cone
// expression, evaluated at the image of the center.
double frame_derivative(const FrameMap& frame, const DerivativeOp& op,
                        const PolarExpr& model_expr);

// ---------------------------------------------------------------------------
// The iteration
// ---------------------------------------------------------------------------

struct ScaleStep {
    int k = 0;
    double rho = 0.0;            // lambda^k
    bool good = false;
    double norm = 0.0;           // scaled L2 of the remainder on B(x, rho)
    double norm_stderr = 0.0;
    Eigen::VectorXd coeffs;         // projection coefficients (good scales)
    Eigen::VectorXd coeff_stderr;
    std::vector<double> tau;        // per-operator contribution of this scale
    std::vector<double> tau_stderr;
};

struct DerivativeTrace {
    ConePoint x;
    double alpha = 0.0;
    double lambda = 0.5;
    std::vector<DerivativeOp> ops;
    std::vector<ScaleStep> steps;
    std::vector<double> tau;         // accumulated totals per operator
    std::vector<double> tau_stderr;  // root-sum-square of per-scale stderr
    double decay_constant = 0.0;     // max over scales of norm / rho^(2+alpha)
    DecayFit norm_fit;               // slope of log norm against log rho
};

struct IterationParams {
    ScaleParams scales;
    int k_last = 10;   // scales k = 0 .. k_last
    QuadConfig quad;   // per-scale quadratures are reseeded from quad.seed
    void validate() const;
};

// Runs the iteration for a bounded function u given by evaluation only.
// Bad scales subtract nothing; their count is bounded by
// bad_scale_bound(spec, params.scales) independently of x.
DerivativeTrace schauder_iterate(const ConeSpec& spec, const Integrand& u,
                                 const ConePoint& x, double alpha,
                                 const std::vector<DerivativeOp>& ops,
                                 const IterationParams& params = {});

// ---------------------------------------------------------------------------
// End-to-end interior estimate check
// ---------------------------------------------------------------------------

struct SchauderParams {
    IterationParams iteration;
    double delta = 0.1;          // Hölder weight in the normalization
    double domain_radius = 2.0;  // Dirichlet ball of the solve
    std::vector<double> derivative_scales;  // for ||Du - tau|| / rho^alpha;
                                            // dyadic_scales(6) when empty
    void validate() const;
};

struct HoelderReport {
    ConePoint x;
    double alpha = 0.0;
    double f_value = 0.0;   // f(x)
    double f_holder = 0.0;  // sup_y |f(y) - f(x)| / d(x,y)^alpha over B(x,1)
    double u_l2 = 0.0;      // L2 norm of u over the solve ball
    double normalization = 0.0;  // the division constant M
    std::vector<DerivativeOp> ops;
    std::vector<double> tau;         // second derivatives, in units of u
    std::vector<double> tau_stderr;
    double campanato = 0.0;          // K: worst operator, max over scales of
                                     // ||Du - tau|| on B(x, rho) / rho^alpha
    DecayFit derivative_fit;         // log ||Du - tau|| against log rho for
                                     // the worst operator
    double ratio = 0.0;  // (max |tau| + K) / (|f(x)| + f_holder + u_l2)
    DerivativeTrace trace;
};

// Solves the Dirichlet problem for f on the apex ball of domain_radius with
// zero boundary data, then extracts second derivatives of the solution at
// each requested point: normalize, iterate, convert tau back to the original
// units, and measure the Campanato quotients of Du - tau directly from the
// symbolic derivative.  Throws std::invalid_argument when alpha is not in
// (0, max_holder_exponent(spec)), and propagates std::domain_error from the
// solver when f is outside its class.
std::vector<HoelderReport> verify_schauder(const ConeSpec& spec,
                                           const PolarExpr& f,
                                           const std::vector<ConePoint>& points,
                                           double alpha,
                                           const SchauderParams& params = {});

}  // namespace cones
