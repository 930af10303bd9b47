#pragma once

// Geometry of finite products of two-dimensional metric cones with a flat
// Euclidean block:
//
//     X = C(beta_1) x ... x C(beta_n) x R^q,   0 < beta_a < 1,
//
// where C(beta) is the flat cone of total angle 2*pi*beta, coordinatized by
// (r, theta) with r >= 0, theta in [0, 2*pi), and metric
// dr^2 + beta^2 r^2 dtheta^2.  The total dimension is m = 2n + q.  Points of
// X are stored in these polar-product coordinates; the singular set of
// factor a is {r_a = 0}.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cones {

// Angle data for the product cone.  Model cones produced by scale
// classification may have an empty angle list (purely Euclidean model);
// primary input spaces are required to have n >= 1 and m >= 3.
struct ConeSpec {
    std::vector<double> betas;
    int euclidean_dim = 0;

    int cone_count() const { return static_cast<int>(betas.size()); }
    int total_dim() const { return 2 * cone_count() + euclidean_dim; }

    // Throws std::invalid_argument unless every beta lies in (0,1) and
    // euclidean_dim >= 0.
    void validate() const;
    // Additionally requires n >= 1 and m >= 3 (the standing assumptions for
    // all spectral/analytic operations on a primary space).
    void validate_primary() const;

    bool operator==(const ConeSpec&) const = default;
};

// A point, stored as one (r, theta) pair per cone factor plus the Euclidean
// block.  canonicalize() clamps tiny negative radii, wraps theta into
// [0, 2*pi), and zeroes theta on the singular set.
struct ConePoint {
    std::vector<std::array<double, 2>> polar;  // (r_a, theta_a)
    std::vector<double> s;

    double r(int a) const { return polar[a][0]; }
    double theta(int a) const { return polar[a][1]; }
    void canonicalize();
    bool on_singular_set(int a) const { return polar[a][0] == 0.0; }
};

// Convenience constructors.
ConePoint make_point(const ConeSpec& spec,
                     const std::vector<double>& radii,
                     const std::vector<double>& angles,
                     const std::vector<double>& s);
ConePoint apex_point(const ConeSpec& spec);          // all r_a = 0, s = 0
void check_point(const ConeSpec& spec, const ConePoint& p);  // shape check

// ---------------------------------------------------------------------------
// Distance and dilation
// ---------------------------------------------------------------------------

// Geodesic distance within a single cone factor.  Both geodesic candidates
// (the developed chord and the path through the apex) reduce to the single
// formula sqrt(r^2 + r'^2 - 2 r r' cos(beta * dtheta)) with dtheta the
// wrapped angular difference in [0, pi], because beta * dtheta < pi always
// holds for beta < 1 and the chord then beats the apex path strictly.
double factor_distance(double beta, double r0, double theta0, double r1,
                       double theta1);

// Product metric: sqrt of the sum of squared factor distances plus the
// squared Euclidean distance of the s-blocks.
double distance(const ConeSpec& spec, const ConePoint& x, const ConePoint& y);

// The dilation (r_a, theta_a, s) -> (lambda r_a, theta_a, lambda s); an exact
// homothety of the metric: d(dilate(x), dilate(y)) = lambda * d(x, y).
ConePoint dilate(const ConePoint& x, double lambda);

// Largest fraction of the center-to-apex distance a ball radius may take
// while the ball stays an embedded Euclidean disc after developing:
// c_beta = sin(pi*beta) for beta <= 1/2 and 1 for beta > 1/2.  A unit ball
// around a point at factor radius r develops iff r > 1 / c_beta.
double develop_fraction(double beta);
inline double unit_ball_develop_threshold(double beta) {
    return 1.0 / develop_fraction(beta);
}

// ---------------------------------------------------------------------------
// Developing charts
// ---------------------------------------------------------------------------

// A chart that flattens a chosen subset of cone factors around a ball
// B(center, radius).  Each developed factor a is cut along the ray opposite
// theta_a(center) and mapped by
//     (r, theta) -> (r cos(beta*dth), r sin(beta*dth)) - (r_a(center), 0),
// dth = wrapped(theta - theta_a(center)) in (-pi, pi], so the center lands at
// the origin of every developed pair.  The map is a local isometry wherever
// the ball avoids the factor's singular set; it is a global isometry of the
// ball onto a Euclidean ball iff radius < c_beta * r_a(center) for every
// developed factor (reported per factor in embedded_disc).
class DevelopedChart {
  public:
    DevelopedChart(const ConeSpec& spec, ConePoint center, double radius,
                   std::vector<int> factors);

    const ConeSpec& source_spec() const { return spec_; }
    const ConePoint& center() const { return center_; }
    double radius() const { return radius_; }
    const std::vector<int>& developed_factors() const { return factors_; }
    bool embedded_disc(int a) const;  // a = original factor index

    // The target space: kept cone factors in original order, Euclidean block
    // = original s coordinates followed by one (X, Y) pair per developed
    // factor in ascending factor order.
    ConeSpec model_spec() const;
    ConePoint to_model(const ConePoint& p) const;
    ConePoint from_model(const ConePoint& q) const;

  private:
    ConeSpec spec_;
    ConePoint center_;
    double radius_;
    std::vector<int> factors_;        // developed, ascending
    std::vector<int> kept_;           // complement, ascending
};

// Throws std::domain_error if the ball touches the singular set of a factor
// being developed (radius >= r_a(center)).
DevelopedChart develop(const ConeSpec& spec, const ConePoint& center,
                       double radius, const std::vector<int>& factors);

// ---------------------------------------------------------------------------
// Scale classification
// ---------------------------------------------------------------------------

struct ScaleParams {
    double lambda = 0.5;   // in (0,1)
    double eps0 = 0.05;    // near-apex threshold, must satisfy eps0 < 1
    int k_min = -40;
    int k_max = 60;
    void validate() const;
};

// Classification of one dyadic scale k around a point x.  At scale k the
// ball B(x, lambda^k) is rescaled to the unit ball around x_k = lambda^{-k} x.
// The scale is good iff every cone factor is either near its apex
// (r_a(x_k) < eps0; the factor is kept in the model) or fully developable
// (r_a(x_k) > 1/c_{beta_a}; the factor is replaced by a Euclidean plane).
// center_distance is the distance from x_k to the model cone's singular
// locus, i.e. sqrt(sum of r_a(x_k)^2 over kept factors); it is < eps0 *
// sqrt(#kept) and callers needing strict eps0-closeness threshold it
// themselves.
struct ScaleClassification {
    int k = 0;
    bool good = false;
    std::vector<int> kept_factors;   // ascending original indices, good only
    ConeSpec model;                  // good only; == input spec when all kept
    double center_distance = 0.0;    // good only
};

std::vector<ScaleClassification> classify_scales(const ConeSpec& spec,
                                                 const ConePoint& x,
                                                 const ScaleParams& params);

// Integer-count form of the bad-scale bound the classification satisfies:
// the bad set is covered by one closed interval of k-length
// (log 1/lambda)^{-1} log(c_a / eps0) per factor, c_a = 1/c_{beta_a}, and a
// closed interval of length L contains at most floor(L)+1 integers.
double bad_scale_bound(const ConeSpec& spec, const ScaleParams& params);
// The measure-of-bad-set form n (log 1/lambda)^{-1} (log 1/eps0 + log c +
// 0.5 log n) with c = max_a 1/c_{beta_a}, reported alongside for reference.
double bad_scale_length(const ConeSpec& spec, const ScaleParams& params);

// ---------------------------------------------------------------------------
// Volume
// ---------------------------------------------------------------------------

// Riemannian volume element: dV = (prod_a beta_a) * dLebesgue in
// (r cos theta, r sin theta, s) coordinates.
double volume_density(const ConeSpec& spec);

// Volume of the m-dimensional Euclidean unit ball.
double euclidean_unit_ball_volume(int m);

// Exact volume of a ball centered on the full singular set (all r_a = 0):
// prod(beta) * omega_m * radius^m.  For general centers use the quadrature
// path in analysis (ball_volume there falls back to this closed form when
// applicable).
double singular_center_ball_volume(const ConeSpec& spec, double radius);

}  // namespace cones
