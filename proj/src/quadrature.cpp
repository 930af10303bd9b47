#include "cones/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cones {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                           31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

// SplitMix64; used only to derive replicate shifts from the seed.
std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4ecda0f49ce1dULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

void QuadConfig::validate() const {
    if (log2_points < 4 || log2_points > 24)
        throw std::invalid_argument("quadrature: log2_points out of [4, 24]");
    if (replicates < 2 || replicates > 64)
        throw std::invalid_argument("quadrature: need between 2 and 64 replicates");
    if (!(radial_bias >= 0.0 && radial_bias < 1.0))
        throw std::invalid_argument("quadrature: radial_bias out of [0, 1)");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (salt + 1));
    std::uint64_t z = splitmix64(state);
    return z ^ splitmix64(state);
}

double radical_inverse(int base, std::uint64_t index) {
    double inv_base = 1.0 / base;
    double scale = inv_base;
    double value = 0.0;
    while (index > 0) {
        value += static_cast<double>(index % base) * scale;
        index /= base;
        scale *= inv_base;
    }
    return value;
}

BallQuadrature::BallQuadrature(const ConeSpec& spec, ConePoint center,
                               double radius, const QuadConfig& cfg)
    : spec_(spec), center_(std::move(center)), radius_(radius) {
    spec_.validate();
    check_point(spec_, center_);
    cfg.validate();
    if (!(radius > 0.0)) throw std::invalid_argument("quadrature: radius must be positive");

    const int n = spec_.cone_count();
    const int q = spec_.euclidean_dim;
    const int dims = 2 * n + q;
    if (dims > static_cast<int>(std::size(kPrimes)))
        throw std::invalid_argument("quadrature: dimension too large for Halton bases");

    // Per-factor sampling windows and the constant part of the weight.
    std::vector<double> r_lo(n), r_hi(n), half_width(n);
    double const_weight = volume_density(spec_);
    for (int a = 0; a < n; ++a) {
        double rc = center_.r(a);
        r_lo[a] = std::max(0.0, rc - radius);
        r_hi[a] = rc + radius;
        if (r_lo[a] > 0.0) {
            double arg = radius / (2.0 * std::sqrt(r_lo[a] * rc));
            double dtheta = (2.0 / spec_.betas[a]) * std::asin(std::min(1.0, arg));
            half_width[a] = std::min(kPi, dtheta);
            const_weight *= half_width[a] * (r_hi[a] * r_hi[a] - r_lo[a] * r_lo[a]);
        } else {
            half_width[a] = kPi;
            // Disc: int_0^R F(r) r dr = R^2/(2-g) int_0^1 F(R u^{1/(2-g)}) u^{g/(2-g)} du.
            const_weight *= kTwoPi * r_hi[a] * r_hi[a] / (2.0 - cfg.radial_bias);
        }
    }
    for (int i = 0; i < q; ++i) const_weight *= 2.0 * radius;

    const std::uint64_t npts = 1ULL << cfg.log2_points;
    const double bias_pow = cfg.radial_bias / (2.0 - cfg.radial_bias);
    const double inv_bias_exp = 1.0 / (2.0 - cfg.radial_bias);

    points_.resize(cfg.replicates);
    weights_.resize(cfg.replicates);
    std::uint64_t rng_state = cfg.seed;
    for (int rep = 0; rep < cfg.replicates; ++rep) {
        std::vector<double> shift(dims);
        for (int d = 0; d < dims; ++d) shift[d] = uniform01(splitmix64(rng_state));

        points_[rep].reserve(npts / 2);
        weights_[rep].reserve(npts / 2);
        for (std::uint64_t i = 1; i <= npts; ++i) {
            ConePoint p;
            p.polar.resize(n);
            p.s.resize(q);
            double w = const_weight;
            for (int a = 0; a < n; ++a) {
                double ur = radical_inverse(kPrimes[2 * a], i) + shift[2 * a];
                ur -= std::floor(ur);
                double ut = radical_inverse(kPrimes[2 * a + 1], i) + shift[2 * a + 1];
                ut -= std::floor(ut);
                double r;
                if (r_lo[a] > 0.0) {
                    r = std::sqrt(r_lo[a] * r_lo[a] +
                                  ur * (r_hi[a] * r_hi[a] - r_lo[a] * r_lo[a]));
                } else {
                    // Keep r strictly positive so integrands with integrable
                    // cusps at the singular set stay evaluable.
                    if (ur <= 0.0) ur = 0x1.0p-60;
                    r = r_hi[a] * std::pow(ur, inv_bias_exp);
                    if (bias_pow > 0.0) w *= std::pow(ur, bias_pow);
                }
                p.polar[a][0] = r;
                p.polar[a][1] = center_.theta(a) + half_width[a] * (2.0 * ut - 1.0);
            }
            for (int j = 0; j < q; ++j) {
                double us = radical_inverse(kPrimes[2 * n + j], i) + shift[2 * n + j];
                us -= std::floor(us);
                p.s[j] = center_.s[j] + radius * (2.0 * us - 1.0);
            }
            if (distance(spec_, center_, p) <= radius) {
                p.canonicalize();
                points_[rep].push_back(std::move(p));
                weights_[rep].push_back(w / static_cast<double>(npts));
            }
        }
    }
}

std::vector<double> BallQuadrature::replicate_integrals(const Integrand& f) const {
    std::vector<double> out(points_.size());
    for (std::size_t rep = 0; rep < points_.size(); ++rep) {
        double acc = 0.0;
        const auto& pts = points_[rep];
        const auto& wts = weights_[rep];
        for (std::size_t i = 0; i < pts.size(); ++i) acc += wts[i] * f(pts[i]);
        out[rep] = acc;
    }
    return out;
}

Estimate summarize(const std::vector<double>& replicate_values) {
    const std::size_t r = replicate_values.size();
    if (r == 0) return {};
    double mean = 0.0;
    for (double v : replicate_values) mean += v;
    mean /= static_cast<double>(r);
    if (r == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : replicate_values) ss += (v - mean) * (v - mean);
    double stderr_ = std::sqrt(ss / (static_cast<double>(r) * static_cast<double>(r - 1)));
    return {mean, stderr_};
}

Estimate BallQuadrature::integrate(const Integrand& f) const {
    return summarize(replicate_integrals(f));
}

Estimate BallQuadrature::volume() const {
    return integrate([](const ConePoint&) { return 1.0; });
}

Estimate BallQuadrature::average(const Integrand& f) const {
    std::vector<double> ratios(points_.size());
    for (std::size_t rep = 0; rep < points_.size(); ++rep) {
        double num = 0.0, den = 0.0;
        const auto& pts = points_[rep];
        const auto& wts = weights_[rep];
        for (std::size_t i = 0; i < pts.size(); ++i) {
            num += wts[i] * f(pts[i]);
            den += wts[i];
        }
        ratios[rep] = den > 0.0 ? num / den : 0.0;
    }
    return summarize(ratios);
}

Estimate BallQuadrature::scaled_l2(const Integrand& f) const {
    auto ints = replicate_integrals([&f](const ConePoint& p) {
        double v = f(p);
        return v * v;
    });
    double scale = std::pow(radius_, -spec_.total_dim());
    for (double& v : ints) v *= scale;
    Estimate e = summarize(ints);
    double norm = std::sqrt(std::max(e.value, 0.0));
    double err = norm > 1e-150 ? e.stderr_ / (2.0 * norm) : std::sqrt(std::max(e.stderr_, 0.0));
    return {norm, err};
}

}  // namespace cones
