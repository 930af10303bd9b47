#pragma once

// Quasi-Monte Carlo quadrature over geodesic balls of a product cone.
//
// Points are drawn from a low-discrepancy (Halton) design in the unit cube,
// randomized by independent Cranley-Patterson shifts per replicate; the
// spread of the replicate estimates gives an honest standard error.  The
// design is a pure function of (dimension, point count, replicate count,
// seed); the map onto a concrete ball depends only on (center, radius).  For
// centers on the full singular set this map is an exact homothety in the
// radius, so ratios of estimates across radii for dilation-homogeneous
// integrands are exact (no quadrature noise).
//
// The sampling region bounds the ball per factor: r in [max(0, r_c - rho),
// r_c + rho] with an angular window derived from the chord bound
// 4 r r' sin^2(beta dtheta / 2) <= rho^2, and a coordinate box for the
// Euclidean block.  Membership in the geodesic ball is decided by the exact
// distance; rejected points simply contribute zero.

#include <cstdint>
#include <functional>
#include <vector>

#include "cones/geometry.hpp"

namespace cones {

struct QuadConfig {
    int log2_points = 13;      // points per replicate = 2^log2_points
    int replicates = 8;        // >= 2 for a standard error
    std::uint64_t seed = 0x5eed5eed5eedULL;
    // In [0, 1): > 0 concentrates radial samples of near-singular factors at
    // small r (importance-weighted), for integrands with r^{-s} cusps.
    double radial_bias = 0.0;
    void validate() const;
};

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;  // standard error across replicates
};

// Base-b radical inverse of index i (van der Corput in base b).
double radical_inverse(int base, std::uint64_t index);

// Deterministically derive an independent randomization stream from a base
// seed and a salt; distinct salts give effectively independent designs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

class BallQuadrature {
  public:
    BallQuadrature(const ConeSpec& spec, ConePoint center, double radius,
                   const QuadConfig& cfg = {});

    const ConeSpec& spec() const { return spec_; }
    const ConePoint& center() const { return center_; }
    double radius() const { return radius_; }
    int replicates() const { return static_cast<int>(points_.size()); }

    // Accepted sample points of one replicate with their Riemannian volume
    // weights (sum of weights over a replicate estimates vol(B)).
    const std::vector<ConePoint>& points(int rep) const { return points_[rep]; }
    const std::vector<double>& weights(int rep) const { return weights_[rep]; }

    using Integrand = std::function<double(const ConePoint&)>;

    // One estimate of int_B f dV per replicate.
    std::vector<double> replicate_integrals(const Integrand& f) const;
    Estimate integrate(const Integrand& f) const;
    Estimate volume() const;
    // Ratio estimator (int f / int 1) on the shared point set.
    Estimate average(const Integrand& f) const;
    // (rho^{-m} int_B f^2 dV)^{1/2} with propagated standard error.
    Estimate scaled_l2(const Integrand& f) const;

  private:
    ConeSpec spec_;
    ConePoint center_;
    double radius_;
    std::vector<std::vector<ConePoint>> points_;
    std::vector<std::vector<double>> weights_;
};

// Mean and standard error of a vector of replicate estimates.
Estimate summarize(const std::vector<double>& replicate_values);

}  // namespace cones
