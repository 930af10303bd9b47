#include "cones/spectrum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace cones {

namespace {

// Multi-indices of total degree p in q variables, lexicographic, first
// coordinate varying slowest.
std::vector<std::vector<int>> monomials_of_degree(int q, int p) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(q, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == q - 1) {
            idx[pos] = left;
            out.push_back(idx);
            return;
        }
        for (int v = left; v >= 0; --v) {
            idx[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    if (q > 0 && p >= 0) rec(0, p);
    return out;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double out = 1.0;
    for (int i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
    return out;
}

}  // namespace

double max_holder_exponent(const ConeSpec& spec) {
    spec.validate_primary();
    double mu = 1.0;
    for (double b : spec.betas) {
        const double cap = b >= 0.5 ? 1.0 / b - 1.0 : 1.0 / b - 2.0;
        mu = std::min(mu, cap);
    }
    return mu;
}

int harmonic_polynomial_dim(int q, int p) {
    if (p < 0) return 0;
    if (p == 0) return 1;
    if (q == 0) return 0;
    if (q == 1) return p <= 1 ? 1 : 0;
    return static_cast<int>(
        std::lround(binom(p + q - 1, q - 1) - binom(p + q - 3, q - 1)));
}

std::vector<PolarExpr> harmonic_polynomials(const ConeSpec& spec, int p) {
    const int q = spec.euclidean_dim;
    if (p < 0) return {};
    if (p == 0) return {PolarExpr::constant(spec, 1.0)};
    if (q == 0) return {};
    const auto mono = monomials_of_degree(q, p);
    const int N = static_cast<int>(mono.size());

    Eigen::MatrixXd basis_coeffs;
    if (p < 2) {
        basis_coeffs = Eigen::MatrixXd::Identity(N, N);
    } else {
        // Kernel of the Laplacian acting on degree-p monomial coefficients.
        const auto mono2 = monomials_of_degree(q, p - 2);
        auto find2 = [&mono2](const std::vector<int>& m) {
            auto it = std::find(mono2.begin(), mono2.end(), m);
            return static_cast<int>(it - mono2.begin());
        };
        Eigen::MatrixXd L =
            Eigen::MatrixXd::Zero(static_cast<int>(mono2.size()), N);
        for (int c = 0; c < N; ++c) {
            for (int i = 0; i < q; ++i) {
                if (mono[c][i] < 2) continue;
                std::vector<int> m = mono[c];
                m[i] -= 2;
                L(find2(m), c) += mono[c][i] * (mono[c][i] - 1);
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
        basis_coeffs = lu.kernel();
    }

    std::vector<PolarExpr> out;
    for (int c = 0; c < basis_coeffs.cols(); ++c) {
        // Normalize so the largest coefficient is +1.
        int arg = 0;
        for (int rr = 1; rr < N; ++rr)
            if (std::fabs(basis_coeffs(rr, c)) > std::fabs(basis_coeffs(arg, c)))
                arg = rr;
        const double scale = basis_coeffs(arg, c);
        PolarExpr h(spec);
        for (int rr = 0; rr < N; ++rr) {
            const double coeff = basis_coeffs(rr, c) / scale;
            if (coeff != 0.0)
                h += coeff * PolarExpr::s_monomial(spec, mono[rr]);
        }
        out.push_back(h.simplify(1e-13));
    }
    if (static_cast<int>(out.size()) != harmonic_polynomial_dim(q, p))
        throw std::logic_error("harmonic polynomial count mismatch");
    return out;
}

// ---------------------------------------------------------------------------
// Recipes and enumeration
// ---------------------------------------------------------------------------

double ModeRecipe::degree(const ConeSpec& spec) const {
    double d = p;
    for (size_t a = 0; a < k.size(); ++a) d += k[a] / spec.betas[a];
    for (int j : joins) d += 2.0 * j;
    return d;
}

int ModeRecipe::multiplicity(const ConeSpec& spec) const {
    int m = harmonic_polynomial_dim(spec.euclidean_dim, p);
    for (int ka : k)
        if (ka >= 1) m *= 2;
    return m;
}

std::string ModeRecipe::str() const {
    std::ostringstream os;
    os << "k=[";
    for (size_t a = 0; a < k.size(); ++a) os << (a ? "," : "") << k[a];
    os << "] p=" << p << " j=[";
    for (size_t l = 0; l < joins.size(); ++l) os << (l ? "," : "") << joins[l];
    os << "]";
    return os.str();
}

std::vector<GrowthRate> enumerate_growth_rates(const ConeSpec& spec,
                                               double max_degree,
                                               double merge_tol) {
    spec.validate();
    if (!(merge_tol > 0.0)) throw std::invalid_argument("merge_tol must be > 0");
    const int n = spec.cone_count();
    const int q = spec.euclidean_dim;
    const int folds = std::max(0, n + (q > 0 ? 1 : 0) - 1);
    const double cap = max_degree + merge_tol;

    std::vector<std::pair<double, ModeRecipe>> found;
    ModeRecipe rec;
    rec.k.assign(n, 0);
    rec.joins.assign(folds, 0);

    std::function<void(int, double)> fill_joins = [&](int pos, double base) {
        if (pos == folds) {
            found.push_back({base, rec});
            return;
        }
        for (int j = 0;; ++j) {
            const double d = base + 2.0 * j;
            if (d > cap) break;
            rec.joins[pos] = j;
            fill_joins(pos + 1, d);
        }
        rec.joins[pos] = 0;
    };

    auto fill_p = [&](double base) {
        for (int p = 0;; ++p) {
            const double d = base + p;
            if (d > cap) break;
            rec.p = p;
            if (rec.multiplicity(spec) > 0) fill_joins(0, d);
        }
        rec.p = 0;
    };

    std::function<void(int, double)> fill_k = [&](int a, double base) {
        if (a == n) {
            fill_p(base);
            return;
        }
        for (int ka = 0;; ++ka) {
            const double d = base + ka / spec.betas[a];
            if (d > cap) break;
            rec.k[a] = ka;
            fill_k(a + 1, d);
        }
        rec.k[a] = 0;
    };

    fill_k(0, 0.0);

    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        if (x.second.k != y.second.k) return x.second.k < y.second.k;
        if (x.second.p != y.second.p) return x.second.p < y.second.p;
        return x.second.joins < y.second.joins;
    });

    std::vector<GrowthRate> out;
    for (auto& [d, r] : found) {
        if (out.empty() || d - out.back().degree > merge_tol) {
            out.push_back({d, 0, {}});
        }
        out.back().multiplicity += r.multiplicity(spec);
        out.back().recipes.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Explicit harmonics
// ---------------------------------------------------------------------------

std::vector<double> join_profile_coeffs(double gammaL, double gammaR, int dimL,
                                        int dimR, int j) {
    if (dimL < 1 || dimR < 1) throw std::invalid_argument("factor dimension < 1");
    if (j < 0) throw std::invalid_argument("join exponent < 0");
    const double g = gammaL + gammaR;
    const double m = dimL + dimR;
    std::vector<double> c(j + 1);
    c[0] = 1.0;
    for (int i = 0; i < j; ++i) {
        const double num = 4.0 * i * (i - 1.0) + (4.0 * g + 2.0 * m) * i -
                           2.0 * j * (2.0 * g + 2.0 * j + m - 2.0);
        const double den = (i + 1.0) * (4.0 * i + 4.0 * gammaL + 2.0 * dimL);
        c[i + 1] = c[i] * num / den;
    }
    return c;
}

namespace {

// One fold of the join: u = uL * uR * sum_i c_i tL^i (tL + tR)^{j-i}.
PolarExpr fold_join(const PolarExpr& uL, double gammaL, int dimL,
                    const PolarExpr& tL, const PolarExpr& uR, double gammaR,
                    int dimR, const PolarExpr& tR, int j) {
    const auto c = join_profile_coeffs(gammaL, gammaR, dimL, dimR, j);
    const PolarExpr tsum = tL + tR;
    PolarExpr profile;
    for (int i = 0; i <= j; ++i) {
        if (c[i] == 0.0) continue;
        profile += c[i] * (tL.pow(i) * tsum.pow(j - i));
    }
    if (j == 0) profile = PolarExpr::constant(uL.spec(), 1.0);
    return (uL * uR * profile).simplify();
}

}  // namespace

std::vector<PolarExpr> build_mode_basis(const ConeSpec& spec,
                                        const ModeRecipe& recipe) {
    spec.validate();
    const int n = spec.cone_count();
    const int q = spec.euclidean_dim;
    const int folds = std::max(0, n + (q > 0 ? 1 : 0) - 1);
    if (static_cast<int>(recipe.k.size()) != n ||
        static_cast<int>(recipe.joins.size()) != folds)
        throw std::invalid_argument("recipe shape does not match spec");
    if (q == 0 && recipe.p != 0)
        throw std::invalid_argument("Euclidean harmonic degree without Euclidean block");
    for (int ka : recipe.k)
        if (ka < 0) throw std::invalid_argument("negative angular frequency");
    if (recipe.multiplicity(spec) == 0) return {};

    // Alternatives per slot: trig choice for each k >= 1, harmonic basis
    // element for the Euclidean block.
    std::vector<int> slots;  // number of variants per cone factor
    for (int a = 0; a < n; ++a) slots.push_back(recipe.k[a] >= 1 ? 2 : 1);
    std::vector<PolarExpr> euclid =
        q > 0 ? harmonic_polynomials(spec, recipe.p)
              : std::vector<PolarExpr>{PolarExpr::constant(spec, 1.0)};

    std::vector<PolarExpr> out;
    std::vector<int> choice(n, 0);
    for (size_t h = 0; h < euclid.size(); ++h) {
        std::fill(choice.begin(), choice.end(), 0);
        while (true) {
            // Left fold across the cone factors, then the Euclidean block.
            PolarExpr mode = PolarExpr::angular_mode(spec, 0, recipe.k[0],
                                                     choice[0] == 1);
            double gamma = recipe.k[0] / spec.betas[0];
            int dim = 2;
            PolarExpr t_acc = PolarExpr::radial_power(spec, 0, 2);
            for (int a = 1; a < n; ++a) {
                const double ea = recipe.k[a] / spec.betas[a];
                PolarExpr ua = PolarExpr::angular_mode(spec, a, recipe.k[a],
                                                       choice[a] == 1);
                PolarExpr ta = PolarExpr::radial_power(spec, a, 2);
                mode = fold_join(mode, gamma, dim, t_acc, ua, ea, 2, ta,
                                 recipe.joins[a - 1]);
                gamma += ea + 2.0 * recipe.joins[a - 1];
                dim += 2;
                t_acc += ta;
            }
            if (q > 0) {
                PolarExpr ts(spec);
                for (int i = 0; i < q; ++i) {
                    std::vector<int> pw(q, 0);
                    pw[i] = 2;
                    ts += PolarExpr::s_monomial(spec, pw);
                }
                mode = fold_join(mode, gamma, dim, t_acc, euclid[h], recipe.p,
                                 q, ts, recipe.joins[folds - 1]);
            }
            out.push_back(mode.simplify());

            int a = 0;
            while (a < n && ++choice[a] == slots[a]) choice[a++] = 0;
            if (a == n) break;
        }
    }
    return out;
}

PolarExpr build_mode(const ConeSpec& spec, const ModeRecipe& recipe) {
    auto basis = build_mode_basis(spec, recipe);
    if (basis.empty()) throw std::invalid_argument("recipe has no harmonics");
    return basis.front();
}

// ---------------------------------------------------------------------------
// Subquadratic space and the first supra-quadratic rate
// ---------------------------------------------------------------------------

std::vector<PolarExpr> subquadratic_space(const ConeSpec& spec) {
    spec.validate();
    const int n = spec.cone_count();
    const int q = spec.euclidean_dim;
    std::vector<PolarExpr> out;
    out.push_back(PolarExpr::constant(spec, 1.0));
    for (int i = 0; i < q; ++i) out.push_back(PolarExpr::coordinate_s(spec, i));
    for (int a = 0; a < n; ++a) {
        if (spec.betas[a] >= 0.5) {
            out.push_back(PolarExpr::angular_mode(spec, a, 1, false));
            out.push_back(PolarExpr::angular_mode(spec, a, 1, true));
        }
    }
    if (q >= 2)
        for (PolarExpr& h : harmonic_polynomials(spec, 2))
            out.push_back(std::move(h));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            out.push_back(PolarExpr::radial_power(spec, a, 2) -
                          PolarExpr::radial_power(spec, b, 2));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < q; ++i) {
            std::vector<int> pw(q, 0);
            pw[i] = 2;
            out.push_back(PolarExpr::radial_power(spec, a, 2) -
                          2.0 * PolarExpr::s_monomial(spec, pw));
        }
    return out;
}

double next_rate_above_quadratic(const ConeSpec& spec) {
    for (double cap = 4.6; cap < 1e4; cap *= 2.0) {
        for (const GrowthRate& g : enumerate_growth_rates(spec, cap))
            if (g.degree > 2.0 + 1e-9) return g.degree;
    }
    throw std::logic_error("no growth rate above 2 found");
}

double next_rate_above_quadratic_closed_form(const ConeSpec& spec) {
    spec.validate();
    const int n = spec.cone_count();
    const int q = spec.euclidean_dim;
    const int folds = std::max(0, n + (q > 0 ? 1 : 0) - 1);
    std::vector<double> cand;
    if (q >= 1 && folds >= 1) cand.push_back(3.0);  // p = 1 with one join
    if (q >= 2 && n == 0) cand.push_back(3.0);      // cubic harmonics alone
    if (q == 0 && folds >= 1) cand.push_back(4.0);  // two joins
    for (int a = 0; a < n; ++a) {
        const double ib = 1.0 / spec.betas[a];
        if (ib > 2.0) cand.push_back(ib);
        if (2.0 * ib > 2.0) cand.push_back(2.0 * ib);
        if (q >= 1) cand.push_back(1.0 + ib);
        if (folds >= 1) cand.push_back(2.0 + ib);
        for (int b = a + 1; b < n; ++b)
            cand.push_back(ib + 1.0 / spec.betas[b]);
    }
    double best = 0.0;
    for (double d : cand)
        if (d > 2.0 && (best == 0.0 || d < best)) best = d;
    if (best == 0.0)
        throw std::invalid_argument("space has no growth rate above 2");
    return best;
}

}  // namespace cones
