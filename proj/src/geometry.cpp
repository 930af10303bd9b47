#include "cones/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cones {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double t) {
    double w = std::fmod(t, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

// Wrapped absolute angular difference in [0, pi].
double angular_gap(double t0, double t1) {
    double d = std::fabs(wrap_angle(t0) - wrap_angle(t1));
    return std::min(d, kTwoPi - d);
}
}  // namespace

void ConeSpec::validate() const {
    // beta = 1 (a flat plane factor in polar form) is tolerated here so the
    // same machinery can serve covering arguments; the estimates proper
    // require beta < 1, enforced by validate_primary().
    for (double b : betas) {
        if (!(b > 0.0 && b <= 1.0))
            throw std::invalid_argument("cone angle fraction must lie in (0,1], got " +
                                        std::to_string(b));
    }
    if (euclidean_dim < 0)
        throw std::invalid_argument("euclidean_dim must be >= 0");
    if (total_dim() < 1) throw std::invalid_argument("space has dimension 0");
}

void ConeSpec::validate_primary() const {
    validate();
    for (double b : betas)
        if (!(b < 1.0))
            throw std::invalid_argument("cone angle fraction must be < 1, got " +
                                        std::to_string(b));
    if (cone_count() < 1)
        throw std::invalid_argument("need at least one cone factor");
    if (total_dim() < 3)
        throw std::invalid_argument("total dimension must be >= 3, got " +
                                    std::to_string(total_dim()));
}

void ConePoint::canonicalize() {
    for (auto& rc : polar) {
        if (rc[0] < 0.0) {
            if (rc[0] < -1e-12)
                throw std::invalid_argument("negative cone radius");
            rc[0] = 0.0;
        }
        rc[1] = (rc[0] == 0.0) ? 0.0 : wrap_angle(rc[1]);
    }
}

ConePoint make_point(const ConeSpec& spec, const std::vector<double>& radii,
                     const std::vector<double>& angles,
                     const std::vector<double>& s) {
    const auto n = static_cast<size_t>(spec.cone_count());
    if (radii.size() != n || angles.size() != n ||
        s.size() != static_cast<size_t>(spec.euclidean_dim))
        throw std::invalid_argument("point shape does not match spec");
    ConePoint p;
    p.polar.resize(n);
    for (size_t a = 0; a < n; ++a) p.polar[a] = {radii[a], angles[a]};
    p.s = s;
    p.canonicalize();
    return p;
}

ConePoint apex_point(const ConeSpec& spec) {
    ConePoint p;
    p.polar.assign(spec.cone_count(), {0.0, 0.0});
    p.s.assign(spec.euclidean_dim, 0.0);
    return p;
}

void check_point(const ConeSpec& spec, const ConePoint& p) {
    if (p.polar.size() != static_cast<size_t>(spec.cone_count()) ||
        p.s.size() != static_cast<size_t>(spec.euclidean_dim))
        throw std::invalid_argument("point shape does not match spec");
}

double factor_distance(double beta, double r0, double theta0, double r1,
                       double theta1) {
    const double phi = beta * angular_gap(theta0, theta1);
    // Half-angle form of the law of cosines; unlike the textbook expression
    // it stays accurate when the two points are close together.
    const double sin_half = std::sin(0.5 * phi);
    const double dr = r0 - r1;
    return std::sqrt(dr * dr + 4.0 * r0 * r1 * sin_half * sin_half);
}

double distance(const ConeSpec& spec, const ConePoint& x, const ConePoint& y) {
    check_point(spec, x);
    check_point(spec, y);
    double sum = 0.0;
    for (int a = 0; a < spec.cone_count(); ++a) {
        const double d = factor_distance(spec.betas[a], x.r(a), x.theta(a),
                                         y.r(a), y.theta(a));
        sum += d * d;
    }
    for (int i = 0; i < spec.euclidean_dim; ++i) {
        const double d = x.s[i] - y.s[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

ConePoint dilate(const ConePoint& x, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("dilation factor must be > 0");
    ConePoint y = x;
    for (auto& rc : y.polar) rc[0] *= lambda;
    for (auto& v : y.s) v *= lambda;
    return y;
}

double develop_fraction(double beta) {
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("cone angle fraction must lie in (0,1]");
    return beta <= 0.5 ? std::sin(std::numbers::pi * beta) : 1.0;
}

// ---------------------------------------------------------------------------
// DevelopedChart
// ---------------------------------------------------------------------------

DevelopedChart::DevelopedChart(const ConeSpec& spec, ConePoint center,
                               double radius, std::vector<int> factors)
    : spec_(spec), center_(std::move(center)), radius_(radius),
      factors_(std::move(factors)) {
    spec_.validate();
    check_point(spec_, center_);
    if (!(radius_ > 0.0)) throw std::invalid_argument("chart radius must be > 0");
    std::sort(factors_.begin(), factors_.end());
    if (std::adjacent_find(factors_.begin(), factors_.end()) != factors_.end())
        throw std::invalid_argument("duplicate factor index in develop list");
    for (int a : factors_) {
        if (a < 0 || a >= spec_.cone_count())
            throw std::invalid_argument("factor index out of range");
        if (radius_ >= center_.r(a))
            throw std::domain_error(
                "ball meets the singular set of factor " + std::to_string(a) +
                ": radius " + std::to_string(radius_) + " >= r = " +
                std::to_string(center_.r(a)));
    }
    for (int a = 0; a < spec_.cone_count(); ++a)
        if (!std::binary_search(factors_.begin(), factors_.end(), a))
            kept_.push_back(a);
}

bool DevelopedChart::embedded_disc(int a) const {
    if (!std::binary_search(factors_.begin(), factors_.end(), a))
        throw std::invalid_argument("factor is not being developed");
    return radius_ < develop_fraction(spec_.betas[a]) * center_.r(a);
}

ConeSpec DevelopedChart::model_spec() const {
    ConeSpec m;
    for (int a : kept_) m.betas.push_back(spec_.betas[a]);
    m.euclidean_dim = spec_.euclidean_dim + 2 * static_cast<int>(factors_.size());
    return m;
}

ConePoint DevelopedChart::to_model(const ConePoint& p) const {
    check_point(spec_, p);
    ConePoint q;
    q.polar.reserve(kept_.size());
    for (int a : kept_) q.polar.push_back(p.polar[a]);
    q.s = p.s;
    for (int a : factors_) {
        // Branch of the angle relative to the cut: difference wrapped into
        // (-pi, pi] so the center sits mid-chart.
        double dth = std::remainder(p.theta(a) - center_.theta(a), kTwoPi);
        const double phi = spec_.betas[a] * dth;
        q.s.push_back(p.r(a) * std::cos(phi) - center_.r(a));
        q.s.push_back(p.r(a) * std::sin(phi));
    }
    return q;
}

ConePoint DevelopedChart::from_model(const ConePoint& q) const {
    ConeSpec ms = model_spec();
    check_point(ms, q);
    ConePoint p;
    p.polar.resize(spec_.cone_count());
    for (size_t i = 0; i < kept_.size(); ++i) p.polar[kept_[i]] = q.polar[i];
    p.s.assign(q.s.begin(), q.s.begin() + spec_.euclidean_dim);
    size_t pos = spec_.euclidean_dim;
    for (int a : factors_) {
        const double X = q.s[pos] + center_.r(a);
        const double Y = q.s[pos + 1];
        pos += 2;
        const double r = std::hypot(X, Y);
        const double phi = std::atan2(Y, X);  // in (-pi, pi]
        p.polar[a] = {r, wrap_angle(center_.theta(a) + phi / spec_.betas[a])};
    }
    p.canonicalize();
    return p;
}

DevelopedChart develop(const ConeSpec& spec, const ConePoint& center,
                       double radius, const std::vector<int>& factors) {
    return DevelopedChart(spec, center, radius, factors);
}

// ---------------------------------------------------------------------------
// Scale classification
// ---------------------------------------------------------------------------

void ScaleParams::validate() const {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("lambda must lie in (0,1)");
    if (!(eps0 > 0.0 && eps0 < 1.0))
        throw std::invalid_argument("eps0 must lie in (0,1)");
    if (k_min > k_max) throw std::invalid_argument("k_min > k_max");
}

std::vector<ScaleClassification> classify_scales(const ConeSpec& spec,
                                                 const ConePoint& x,
                                                 const ScaleParams& params) {
    spec.validate();
    check_point(spec, x);
    params.validate();
    const int n = spec.cone_count();
    std::vector<double> threshold(n);
    for (int a = 0; a < n; ++a)
        threshold[a] = unit_ball_develop_threshold(spec.betas[a]);

    std::vector<ScaleClassification> out;
    out.reserve(params.k_max - params.k_min + 1);
    for (int k = params.k_min; k <= params.k_max; ++k) {
        ScaleClassification sc;
        sc.k = k;
        const double scale = std::pow(params.lambda, -double(k));
        bool good = true;
        double dist2 = 0.0;
        std::vector<int> kept;
        for (int a = 0; a < n; ++a) {
            const double r = scale * x.r(a);
            if (r < params.eps0) {
                kept.push_back(a);
                dist2 += r * r;
            } else if (!(r > threshold[a])) {
                good = false;
                break;
            }
        }
        sc.good = good;
        if (good) {
            sc.kept_factors = std::move(kept);
            for (int a : sc.kept_factors) sc.model.betas.push_back(spec.betas[a]);
            sc.model.euclidean_dim =
                spec.euclidean_dim +
                2 * (n - static_cast<int>(sc.model.betas.size()));
            sc.center_distance = std::sqrt(dist2);
        }
        out.push_back(std::move(sc));
    }
    return out;
}

double bad_scale_bound(const ConeSpec& spec, const ScaleParams& params) {
    const double logl = std::log(1.0 / params.lambda);
    double total = 0.0;
    for (double b : spec.betas) {
        const double len =
            std::log(unit_ball_develop_threshold(b) / params.eps0) / logl;
        total += 1.0 + std::floor(len);
    }
    return total;
}

double bad_scale_length(const ConeSpec& spec, const ScaleParams& params) {
    const double n = static_cast<double>(spec.cone_count());
    if (n == 0) return 0.0;
    double c = 1.0;
    for (double b : spec.betas)
        c = std::max(c, unit_ball_develop_threshold(b));
    return n / std::log(1.0 / params.lambda) *
           (std::log(1.0 / params.eps0) + std::log(c) + 0.5 * std::log(n));
}

// ---------------------------------------------------------------------------
// Volume
// ---------------------------------------------------------------------------

double volume_density(const ConeSpec& spec) {
    double d = 1.0;
    for (double b : spec.betas) d *= b;
    return d;
}

double euclidean_unit_ball_volume(int m) {
    if (m < 0) throw std::invalid_argument("negative dimension");
    return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

double singular_center_ball_volume(const ConeSpec& spec, double radius) {
    return volume_density(spec) * euclidean_unit_ball_volume(spec.total_dim()) *
           std::pow(radius, spec.total_dim());
}

}  // namespace cones
