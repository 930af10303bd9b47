#pragma once

// Spectral solver for the Dirichlet problem on apex-centered balls.
//
// Right-hand sides and boundary data are expanded exactly (by term matching)
// into rho^{2l}-weighted homogeneous harmonics.  For that class the particular
// solution is closed-form, one division per component, and the harmonic
// correction is read off from boundary coefficients, so the returned solution
// satisfies the equation symbolically rather than to discretization error.

#include <vector>

#include "cones/modes.hpp"

namespace cones {

// One component  coeff * rho^{2 power} * mode  with a harmonic mode factor.
struct ModeComponent {
    double coeff = 0.0;
    int power = 0;            // radial weight rho^{2*power}
    double degree = 0.0;      // homogeneity of the harmonic factor
    double eigenvalue = 0.0;  // degree * (degree + m - 2)
    PolarExpr mode;           // harmonic, homogeneity == degree
};

// Decompose f into rho^{2l}-weighted harmonics.  Throws std::domain_error
// when f lies outside that class (relative matching residual above 1e-9).
std::vector<ModeComponent> expand_in_modes(const ConeSpec& spec,
                                           const PolarExpr& f);

struct SpectralSolution {
    ConeSpec spec;
    double radius = 1.0;
    PolarExpr u;
    PolarExpr f;
    double residual = 0.0;           // largest coefficient of lap(u) - f
    double boundary_residual = 0.0;  // max |u - g| over boundary samples
};

// Solve  Delta u = f  on B(apex, radius) with boundary data g.  Each
// component divides by (e+2)(e+m) - eigenvalue with e the component degree;
// the divisor equals 4d + 2m > 0 at e = d and grows from there, so the
// resonance guard is an assertion rather than a reachable branch.
SpectralSolution solve_dirichlet_apex(const ConeSpec& spec, const PolarExpr& f,
                                      const PolarExpr& g, double radius = 1.0);

}  // namespace cones
