#include "cones/solver_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include <Eigen/Dense>

#include "cones/geometry.hpp"
#include "cones/quadrature.hpp"
#include "cones/spectrum.hpp"

namespace cones {

namespace {

using TermKey =
    std::tuple<std::vector<RadialPow>, std::vector<AngularFactor>, std::vector<int>>;

TermKey key_of(const Term& t) { return {t.r_pow, t.angular, t.s_pow}; }

// Homogeneous pieces of an expression, grouped by degree (merged within tol).
std::vector<std::pair<double, PolarExpr>> homogeneous_components(
    const ConeSpec& spec, const PolarExpr& f) {
    std::vector<std::pair<double, PolarExpr>> out;
    PolarExpr reduced = f;
    reduced.simplify();
    for (const Term& t : reduced.terms()) {
        const double h = t.homogeneity(spec);
        auto it = std::find_if(out.begin(), out.end(), [h](const auto& c) {
            return std::abs(c.first - h) <= 1e-9;
        });
        if (it == out.end()) {
            out.emplace_back(h, PolarExpr(spec));
            it = std::prev(out.end());
        }
        it->second.push_term(t);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

// Candidate harmonics rho^{2l} * mode whose total degree matches e.
std::vector<ModeComponent> candidates_for_degree(const ConeSpec& spec, double e) {
    const int m = spec.total_dim();
    const PolarExpr rho2 = PolarExpr::squared_distance_to_apex(spec);
    auto rates = enumerate_growth_rates(spec, e + 1e-6);
    std::vector<ModeComponent> out;
    for (int l = 0; e - 2.0 * l >= -1e-9; ++l) {
        const double d = e - 2.0 * l;
        for (const auto& rate : rates) {
            if (std::abs(rate.degree - d) > 1e-9) continue;
            for (const auto& recipe : rate.recipes) {
                for (auto& mode : build_mode_basis(spec, recipe)) {
                    ModeComponent c;
                    c.coeff = 1.0;
                    c.power = l;
                    c.degree = rate.degree;
                    c.eigenvalue = rate.degree * (rate.degree + m - 2);
                    c.mode = std::move(mode);
                    out.push_back(std::move(c));
                }
            }
        }
    }
    return out;
}

PolarExpr component_expr(const ConeSpec& spec, const ModeComponent& c) {
    PolarExpr e = c.mode * c.coeff;
    if (c.power > 0)
        e = e * PolarExpr::squared_distance_to_apex(spec).pow(c.power);
    return e.simplify();
}

// Deterministic sample of the boundary sphere: interior directions from a
// fixed low-discrepancy stream, pushed out to |x| = radius.
std::vector<ConePoint> boundary_samples(const ConeSpec& spec, double radius,
                                        int count) {
    QuadConfig cfg;
    cfg.log2_points = 8;
    cfg.replicates = 2;
    BallQuadrature quad(spec, apex_point(spec), 1.0, cfg);
    std::vector<ConePoint> out;
    for (int rep = 0; rep < quad.replicates() && static_cast<int>(out.size()) < count; ++rep) {
        for (const auto& p : quad.points(rep)) {
            double rho = distance(spec, apex_point(spec), p);
            if (rho < 0.05) continue;
            out.push_back(dilate(p, radius / rho));
            if (static_cast<int>(out.size()) == count) break;
        }
    }
    return out;
}

}  // namespace

std::vector<ModeComponent> expand_in_modes(const ConeSpec& spec,
                                           const PolarExpr& f) {
    spec.validate();
    std::vector<ModeComponent> out;
    for (auto& [degree, piece] : homogeneous_components(spec, f)) {
        auto cands = candidates_for_degree(spec, degree);
        if (cands.empty())
            throw std::domain_error(
                "expand_in_modes: no harmonics of degree " + std::to_string(degree));

        // Index the union of term keys of the piece and all candidates.
        std::map<TermKey, int> keys;
        auto index_terms = [&keys](const PolarExpr& e) {
            for (const Term& t : e.terms()) keys.emplace(key_of(t), 0);
        };
        index_terms(piece);
        std::vector<PolarExpr> cand_exprs;
        cand_exprs.reserve(cands.size());
        for (const auto& c : cands) {
            cand_exprs.push_back(component_expr(spec, c));
            index_terms(cand_exprs.back());
        }
        int row = 0;
        for (auto& kv : keys) kv.second = row++;

        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(row, cands.size());
        Eigen::VectorXd b = Eigen::VectorXd::Zero(row);
        for (const Term& t : piece.terms()) b[keys.at(key_of(t))] += t.coeff;
        for (std::size_t j = 0; j < cand_exprs.size(); ++j)
            for (const Term& t : cand_exprs[j].terms())
                a(keys.at(key_of(t)), j) += t.coeff;

        Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
        const double rel = (a * c - b).norm() / b.norm();
        if (!(rel <= 1e-9))
            throw std::domain_error(
                "expand_in_modes: component of degree " + std::to_string(degree) +
                " is outside the harmonic span (residual " + std::to_string(rel) + ")");

        const double scale = c.cwiseAbs().maxCoeff();
        for (std::size_t j = 0; j < cands.size(); ++j) {
            if (std::abs(c[j]) <= 1e-13 * scale) continue;
            ModeComponent comp = cands[j];
            comp.coeff = c[j];
            out.push_back(std::move(comp));
        }
    }
    return out;
}

SpectralSolution solve_dirichlet_apex(const ConeSpec& spec, const PolarExpr& f,
                                      const PolarExpr& g, double radius) {
    spec.validate();
    if (!(radius > 0.0))
        throw std::invalid_argument("solve_dirichlet_apex: radius must be positive");
    const int m = spec.total_dim();

    SpectralSolution sol;
    sol.spec = spec;
    sol.radius = radius;
    sol.f = f;
    PolarExpr u(spec);

    for (const auto& comp : expand_in_modes(spec, f)) {
        const double e = 2.0 * comp.power + comp.degree;
        const double denom = (e + 2.0) * (e + m) - comp.eigenvalue;
        if (!(denom > 0.0))
            throw std::logic_error("solve_dirichlet_apex: resonant component");
        // Particular term rho^{2(l+1)} mode / denom, minus its own boundary
        // values extended harmonically (the mode itself, weighted by R^{2l+2}).
        ModeComponent lifted = comp;
        lifted.coeff = comp.coeff / denom;
        lifted.power = comp.power + 1;
        u += component_expr(spec, lifted);
        u -= comp.mode * (lifted.coeff * std::pow(radius, 2.0 * lifted.power));
    }
    for (const auto& comp : expand_in_modes(spec, g)) {
        // Harmonic extension of the boundary restriction of rho^{2l} mode.
        u += comp.mode * (comp.coeff * std::pow(radius, 2.0 * comp.power));
    }
    u.simplify();
    sol.u = u;

    PolarExpr defect = laplacian(u) - f;
    defect.simplify();
    sol.residual = defect.max_abs_coeff();

    sol.boundary_residual = 0.0;
    for (const auto& p : boundary_samples(spec, radius, 64)) {
        const double diff = std::abs(u.eval(p) - g.eval(p));
        sol.boundary_residual = std::max(sol.boundary_residual, diff);
    }
    return sol;
}

}  // namespace cones
