#pragma once

// Finite-difference oracle for  Delta u = f  on a single-cone-factor product
// C(S^1_{2 pi beta}) x R, discretized per Fourier mode in the cone angle.
//
// Each mode k solves  (1/r)(r a_r)_r - (k/beta)^2 a / r^2 + a_ss = f_k  on
// the rectangle [0, r_max] x [-s_half, s_half] in flux form (symmetrized by
// the cell measure), with Dirichlet data taken from a reference expression on
// the far sides and the mode-regularity condition on the axis: a one-sided
// flux cell for k = 0 and a(0, s) = 0 for k >= 1.  The scheme is second
// order away from the axis; the route is independent of the closed-form
// solver and is used to cross-check it.

#include <vector>

#include <Eigen/Dense>

#include "cones/modes.hpp"

namespace cones {

struct FdGridConfig {
    int nr = 96;          // radial cells; nodes r_i = i * r_max / nr
    int ns = 192;         // s cells; nodes s_j = -s_half + j * 2 s_half / ns
    double r_max = 1.0;
    double s_half = 1.0;
    void validate() const;
};

struct FourierMode {
    int k = 0;
    bool sine = false;
    Eigen::MatrixXd grid;  // (nr + 1) x (ns + 1) nodal values
};

struct FdSolution {
    ConeSpec spec;
    FdGridConfig config;
    std::vector<FourierMode> modes;
    double residual = 0.0;  // largest interior stencil defect, a posteriori

    double r_node(int i) const;
    double s_node(int j) const;
    // Bilinear in (r, s) per mode, then the trigonometric sum in the angle.
    // Throws std::domain_error outside the grid rectangle.
    double eval(const ConePoint& p) const;
};

FdSolution solve_fd_oracle(const ConeSpec& spec, const PolarExpr& f,
                           const PolarExpr& dirichlet_reference,
                           const FdGridConfig& cfg = {});

// The beta = 1/2 route through the branched double cover: the problem is
// pulled back to the flat plane (beta = 1, angular frequencies doubled),
// solved there, and pushed forward.  The pulled-back mode potentials
// (2k)^2 / r^2 coincide with the direct ones (k / (1/2))^2 / r^2, which is
// the covering argument in discrete form; the test suite asserts the two
// routes agree to the last bit.
FdSolution solve_double_cover(const ConeSpec& spec, const PolarExpr& f,
                              const PolarExpr& dirichlet_reference,
                              const FdGridConfig& cfg = {});

}  // namespace cones
