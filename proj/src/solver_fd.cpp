#include "cones/solver_fd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace cones {

namespace {

struct ProfileTerm {
    double coeff = 0.0;
    double r_exp = 0.0;
    int s_pow = 0;
};

using ProfileMap = std::map<std::pair<int, bool>, std::vector<ProfileTerm>>;

// Split a single-factor expression into per-angular-mode radial profiles,
// with the angular frequency relabeled by `k_scale` (the double cover pulls
// back mode k to mode 2k with the same profile).
ProfileMap fourier_profiles(const ConeSpec& spec, const PolarExpr& expr,
                            int k_scale) {
    ProfileMap out;
    PolarExpr reduced = expr;
    reduced.simplify();
    for (const Term& t : reduced.terms()) {
        ProfileTerm pt;
        pt.coeff = t.coeff;
        pt.r_exp = radial_exponent(spec.betas[0], t.r_pow[0]);
        pt.s_pow = t.s_pow.empty() ? 0 : t.s_pow[0];
        int k = 0;
        bool sine = false;
        if (!t.angular.empty()) {
            k = t.angular[0].k;
            sine = t.angular[0].sine;
        }
        if (pt.r_exp < 0.0)
            throw std::domain_error("fd solver: profile with a negative radial power");
        out[{k * k_scale, sine}].push_back(pt);
    }
    return out;
}

double profile_value(const std::vector<ProfileTerm>& terms, double r, double s) {
    double acc = 0.0;
    for (const auto& t : terms) {
        double v = t.coeff;
        if (t.r_exp != 0.0) v *= std::pow(r, t.r_exp);
        for (int p = 0; p < t.s_pow; ++p) v *= s;
        acc += v;
    }
    return acc;
}

// Solve one Fourier mode on the (r, s) rectangle.  `freq` is the effective
// angular frequency k / beta entering the potential.
Eigen::MatrixXd solve_mode(double freq, const std::vector<ProfileTerm>& rhs,
                           const std::vector<ProfileTerm>& ref,
                           const FdGridConfig& cfg) {
    const int nr = cfg.nr, ns = cfg.ns;
    const double hr = cfg.r_max / nr;
    const double hs = 2.0 * cfg.s_half / ns;
    auto r_at = [hr](int i) { return i * hr; };
    auto s_at = [&cfg, hs](int j) { return -cfg.s_half + j * hs; };

    Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(nr + 1, ns + 1);
    // Dirichlet sides from the reference: r = r_max and s = +-s_half; the
    // axis column is reference data too when the potential forces a(0) = 0.
    for (int j = 0; j <= ns; ++j) grid(nr, j) = profile_value(ref, r_at(nr), s_at(j));
    for (int i = 0; i <= nr; ++i) {
        grid(i, 0) = profile_value(ref, r_at(i), s_at(0));
        grid(i, ns) = profile_value(ref, r_at(i), s_at(ns));
    }
    const int i0 = freq == 0.0 ? 0 : 1;  // axis unknown only for k = 0

    const int cols = ns - 1;
    const int unknowns = (nr - i0) * cols;
    auto index = [i0, cols](int i, int j) { return (i - i0) * cols + (j - 1); };

    // Row i is scaled by the radial cell measure (r_i interior, hr/8 for the
    // one-sided axis cell), which makes the flux stencil symmetric definite.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(unknowns) * 5);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(unknowns);
    for (int i = i0; i < nr; ++i) {
        const double r = r_at(i);
        const double mu = i == 0 ? hr / 8.0 : r;
        const double flux_lo = i == 0 ? 0.0 : (r - 0.5 * hr) / (hr * hr);
        const double flux_hi = (r + 0.5 * hr) / (hr * hr);
        const double s_coef = mu / (hs * hs);
        const double pot = i == 0 ? 0.0 : freq * freq / r;
        for (int j = 1; j < ns; ++j) {
            const int row = index(i, j);
            double diag = flux_lo + flux_hi + 2.0 * s_coef + pot;
            trip.emplace_back(row, row, diag);
            double rhs_val = -mu * profile_value(rhs, r, s_at(j));

            auto couple = [&](int ii, int jj, double c) {
                if (ii == nr || jj == 0 || jj == ns || ii < i0)
                    rhs_val += c * grid(ii, jj);
                else
                    trip.emplace_back(row, index(ii, jj), -c);
            };
            if (i > i0 || i0 == 0) {
                if (i > 0) couple(i - 1, j, flux_lo);
            } else {
                rhs_val += flux_lo * grid(0, j);  // axis held at zero for k >= 1
            }
            couple(i + 1, j, flux_hi);
            couple(i, j - 1, s_coef);
            couple(i, j + 1, s_coef);
            b[row] = rhs_val;
        }
    }
    Eigen::SparseMatrix<double> a(unknowns, unknowns);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("fd solver: factorization failed");
    Eigen::VectorXd x = solver.solve(b);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("fd solver: linear solve failed");

    for (int i = i0; i < nr; ++i)
        for (int j = 1; j < ns; ++j) grid(i, j) = x[index(i, j)];
    if (i0 == 1)
        for (int j = 0; j <= ns; ++j) grid(0, j) = 0.0;
    return grid;
}

// Largest defect of the unscaled stencil against the right-hand side over
// interior nodes (the solve is direct, so this measures conditioning only).
double mode_residual(double freq, const std::vector<ProfileTerm>& rhs,
                     const Eigen::MatrixXd& grid, const FdGridConfig& cfg) {
    const int nr = cfg.nr, ns = cfg.ns;
    const double hr = cfg.r_max / nr;
    const double hs = 2.0 * cfg.s_half / ns;
    double worst = 0.0;
    for (int i = freq == 0.0 ? 0 : 1; i < nr; ++i) {
        const double r = i * hr;
        for (int j = 1; j < ns; ++j) {
            const double s = -cfg.s_half + j * hs;
            const double ss =
                (grid(i, j + 1) - 2.0 * grid(i, j) + grid(i, j - 1)) / (hs * hs);
            double lap;
            if (i == 0) {
                lap = 4.0 * (grid(1, j) - grid(0, j)) / (hr * hr) + ss;
            } else {
                lap = ((r + 0.5 * hr) * (grid(i + 1, j) - grid(i, j)) -
                       (r - 0.5 * hr) * (grid(i, j) - grid(i - 1, j))) /
                          (r * hr * hr) -
                      freq * freq / (r * r) * grid(i, j) + ss;
            }
            worst = std::max(worst, std::abs(lap - profile_value(rhs, r, s)));
        }
    }
    return worst;
}

FdSolution solve_profiles(const ConeSpec& spec, double beta_eff,
                          const ProfileMap& rhs, const ProfileMap& ref,
                          const FdGridConfig& cfg) {
    FdSolution sol;
    sol.spec = spec;
    sol.config = cfg;

    std::vector<std::pair<int, bool>> keys;
    for (const auto& kv : rhs) keys.push_back(kv.first);
    for (const auto& kv : ref)
        if (!rhs.count(kv.first)) keys.push_back(kv.first);
    std::sort(keys.begin(), keys.end());

    static const std::vector<ProfileTerm> kEmpty;
    for (const auto& key : keys) {
        if (key.first == 0 && key.second) continue;  // sin(0 theta) is void
        const auto& fk = rhs.count(key) ? rhs.at(key) : kEmpty;
        const auto& gk = ref.count(key) ? ref.at(key) : kEmpty;
        const double freq = key.first / beta_eff;
        FourierMode mode;
        mode.k = key.first;
        mode.sine = key.second;
        mode.grid = solve_mode(freq, fk, gk, cfg);
        sol.residual = std::max(sol.residual, mode_residual(freq, fk, mode.grid, cfg));
        sol.modes.push_back(std::move(mode));
    }
    return sol;
}

void require_single_factor(const ConeSpec& spec) {
    spec.validate();
    if (spec.cone_count() != 1 || spec.euclidean_dim != 1)
        throw std::invalid_argument(
            "fd solver: supported layout is one cone factor times R");
}

}  // namespace

void FdGridConfig::validate() const {
    if (nr < 4 || ns < 4) throw std::invalid_argument("fd grid: need at least 4 cells per side");
    if (!(r_max > 0.0) || !(s_half > 0.0))
        throw std::invalid_argument("fd grid: extents must be positive");
}

double FdSolution::r_node(int i) const { return i * config.r_max / config.nr; }

double FdSolution::s_node(int j) const {
    return -config.s_half + j * 2.0 * config.s_half / config.ns;
}

double FdSolution::eval(const ConePoint& p) const {
    check_point(spec, p);
    const double r = p.r(0), theta = p.theta(0), s = p.s[0];
    const double hr = config.r_max / config.nr;
    const double hs = 2.0 * config.s_half / config.ns;
    if (r > config.r_max + 1e-12 || std::abs(s) > config.s_half + 1e-12)
        throw std::domain_error("fd solution: point outside the grid");
    const double fi = std::min(std::max(r / hr, 0.0), double(config.nr) - 1e-12);
    const double fj = std::min(std::max((s + config.s_half) / hs, 0.0),
                               double(config.ns) - 1e-12);
    const int i = static_cast<int>(fi);
    const int j = static_cast<int>(fj);
    const double wi = fi - i, wj = fj - j;

    double acc = 0.0;
    for (const auto& mode : this->modes) {
        const double v =
            (1.0 - wi) * ((1.0 - wj) * mode.grid(i, j) + wj * mode.grid(i, j + 1)) +
            wi * ((1.0 - wj) * mode.grid(i + 1, j) + wj * mode.grid(i + 1, j + 1));
        acc += v * (mode.sine ? std::sin(mode.k * theta) : std::cos(mode.k * theta));
    }
    return acc;
}

FdSolution solve_fd_oracle(const ConeSpec& spec, const PolarExpr& f,
                           const PolarExpr& dirichlet_reference,
                           const FdGridConfig& cfg) {
    require_single_factor(spec);
    cfg.validate();
    return solve_profiles(spec, spec.betas[0], fourier_profiles(spec, f, 1),
                          fourier_profiles(spec, dirichlet_reference, 1), cfg);
}

FdSolution solve_double_cover(const ConeSpec& spec, const PolarExpr& f,
                              const PolarExpr& dirichlet_reference,
                              const FdGridConfig& cfg) {
    require_single_factor(spec);
    cfg.validate();
    if (std::abs(spec.betas[0] - 0.5) > 1e-12)
        throw std::invalid_argument("double cover: requires beta = 1/2");
    // Pull back along theta -> 2 theta: mode k becomes mode 2k on the flat
    // plane (beta = 1), radial profiles unchanged.
    FdSolution flat =
        solve_profiles(spec, 1.0, fourier_profiles(spec, f, 2),
                       fourier_profiles(spec, dirichlet_reference, 2), cfg);
    // Push forward: relabel the frequencies back to the cone.
    FdSolution sol = std::move(flat);
    for (auto& mode : sol.modes) mode.k /= 2;
    return sol;
}

}  // namespace cones
