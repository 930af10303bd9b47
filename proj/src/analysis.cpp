#include "cones/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cones/spectrum.hpp"

namespace cones {

namespace {

std::uint64_t next_bits(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4ecda0f49ce1dULL;
    return z ^ (z >> 31);
}

}  // namespace

Integrand as_integrand(const PolarExpr& u) {
    return [u](const ConePoint& p) { return u.eval(p); };
}

ScaledNorm scaled_norm(const BallQuadrature& quad, const Integrand& u) {
    Estimate e = quad.scaled_l2(u);
    return {e.value, e.stderr_, quad.center(), quad.radius()};
}

ScaledNorm scaled_norm(const ConeSpec& spec, const Integrand& u,
                       const ConePoint& center, double radius,
                       const QuadConfig& cfg) {
    return scaled_norm(BallQuadrature(spec, center, radius, cfg), u);
}

Projection project_span(const std::vector<PolarExpr>& basis,
                        const BallQuadrature& quad, const Integrand& f) {
    const int nb = static_cast<int>(basis.size());
    if (nb == 0) throw std::invalid_argument("project_span: empty basis");
    const int reps = quad.replicates();

    // Per-replicate Gram matrices and right-hand sides.
    std::vector<Eigen::MatrixXd> gram(reps, Eigen::MatrixXd::Zero(nb, nb));
    std::vector<Eigen::VectorXd> rhs(reps, Eigen::VectorXd::Zero(nb));
    Eigen::VectorXd phi(nb);
    for (int rep = 0; rep < reps; ++rep) {
        const auto& pts = quad.points(rep);
        const auto& wts = quad.weights(rep);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (int b = 0; b < nb; ++b) phi[b] = basis[b].eval(pts[i]);
            gram[rep].selfadjointView<Eigen::Lower>().rankUpdate(phi, wts[i]);
            rhs[rep] += (wts[i] * f(pts[i])) * phi;
        }
        gram[rep] = gram[rep].selfadjointView<Eigen::Lower>();
    }

    Eigen::MatrixXd gram_mean = Eigen::MatrixXd::Zero(nb, nb);
    for (const auto& g : gram) gram_mean += g;
    gram_mean /= static_cast<double>(reps);

    // Diagonal rescaling, then a fixed eigenspace from the mean Gram matrix.
    Eigen::VectorXd scale(nb);
    for (int b = 0; b < nb; ++b)
        scale[b] = gram_mean(b, b) > 0.0 ? 1.0 / std::sqrt(gram_mean(b, b)) : 1.0;
    Eigen::MatrixXd normalized = scale.asDiagonal() * gram_mean * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normalized);
    const double lam_max = eig.eigenvalues().maxCoeff();
    const double threshold = std::max(lam_max, 0.0) * 1e-10;

    std::vector<int> kept;
    for (int b = 0; b < nb; ++b)
        if (eig.eigenvalues()[b] > threshold) kept.push_back(b);
    Projection out;
    out.rank = static_cast<int>(kept.size());
    if (out.rank == 0) throw std::domain_error("project_span: Gram matrix is numerically zero");
    Eigen::MatrixXd subspace(nb, out.rank);
    double lam_min = std::numeric_limits<double>::infinity();
    for (int c = 0; c < out.rank; ++c) {
        subspace.col(c) = eig.eigenvectors().col(kept[c]);
        lam_min = std::min(lam_min, eig.eigenvalues()[kept[c]]);
    }
    out.condition = lam_max / lam_min;

    // Solve every replicate inside the retained subspace.
    Eigen::MatrixXd coeff_reps(nb, reps);
    for (int rep = 0; rep < reps; ++rep) {
        Eigen::MatrixXd g_sub = subspace.transpose() * scale.asDiagonal() *
                                gram[rep] * scale.asDiagonal() * subspace;
        Eigen::VectorXd b_sub = subspace.transpose() * scale.asDiagonal() * rhs[rep];
        Eigen::VectorXd y = g_sub.ldlt().solve(b_sub);
        coeff_reps.col(rep) = scale.asDiagonal() * (subspace * y);
    }
    out.coeffs = coeff_reps.rowwise().mean();
    out.coeff_stderr = Eigen::VectorXd::Zero(nb);
    if (reps > 1) {
        for (int b = 0; b < nb; ++b) {
            double ss = (coeff_reps.row(b).array() - out.coeffs[b]).square().sum();
            out.coeff_stderr[b] =
                std::sqrt(ss / (static_cast<double>(reps) * static_cast<double>(reps - 1)));
        }
    }
    return out;
}

PolarExpr combine(const std::vector<PolarExpr>& basis, const Eigen::VectorXd& coeffs) {
    if (basis.empty() || coeffs.size() != static_cast<Eigen::Index>(basis.size()))
        throw std::invalid_argument("combine: basis and coefficient sizes differ");
    PolarExpr acc(basis.front().spec());
    for (std::size_t i = 0; i < basis.size(); ++i)
        acc += basis[i] * coeffs[static_cast<Eigen::Index>(i)];
    return acc.simplify();
}

DecayFit fit_log_slope(const std::vector<double>& rho,
                       const std::vector<double>& value,
                       const std::vector<double>& stderr_) {
    if (rho.size() != value.size() || rho.size() != stderr_.size())
        throw std::invalid_argument("fit_log_slope: input sizes differ");
    DecayFit fit;
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!(value[i] > 0.0) || !(rho[i] > 0.0)) continue;
        double sigma_log = std::max(stderr_[i] / value[i], 1e-12);
        double w = 1.0 / (sigma_log * sigma_log);
        double x = std::log(rho[i]);
        double y = std::log(value[i]);
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
        ++fit.points_used;
    }
    if (fit.points_used < 2) return fit;
    double det = sw * sxx - sx * sx;
    if (!(det > 0.0)) return fit;
    fit.slope = (sw * sxy - sx * sy) / det;
    fit.intercept = (sxx * sy - sx * sxy) / det;
    fit.slope_stderr = std::sqrt(sw / det);
    return fit;
}

std::vector<double> dyadic_scales(int depth) {
    if (depth < 1) throw std::invalid_argument("dyadic_scales: depth must be >= 1");
    std::vector<double> out(depth);
    double rho = 1.0;
    for (int k = 0; k < depth; ++k) {
        rho *= 0.5;
        out[k] = rho;
    }
    return out;
}

CampanatoReport campanato_estimate(const ConeSpec& spec, const Integrand& f,
                                   const std::vector<ConePoint>& centers,
                                   double alpha,
                                   const std::vector<double>& scales,
                                   const QuadConfig& cfg) {
    if (!(alpha > 0.0)) throw std::invalid_argument("campanato_estimate: alpha must be positive");
    if (centers.empty() || scales.empty())
        throw std::invalid_argument("campanato_estimate: need at least one center and scale");
    CampanatoReport report;
    report.alpha = alpha;
    std::vector<double> fit_rho, fit_norm, fit_err;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (std::size_t s = 0; s < scales.size(); ++s) {
            // Salt by the scale value, not its index, so a scan over a subset
            // of the scales reproduces the same per-ball estimates.
            QuadConfig ball_cfg = cfg;
            ball_cfg.seed = mix_seed(cfg.seed, (static_cast<std::uint64_t>(c) << 52) ^
                                                   std::bit_cast<std::uint64_t>(scales[s]));
            BallQuadrature quad(spec, centers[c], scales[s], ball_cfg);
            CampanatoRow row;
            row.center_index = static_cast<int>(c);
            row.rho = scales[s];
            row.mean = quad.average(f).value;
            Estimate dev = quad.scaled_l2(
                [&f, &row](const ConePoint& p) { return f(p) - row.mean; });
            row.norm = dev.value;
            row.norm_stderr = dev.stderr_;
            row.ratio = dev.value / std::pow(scales[s], alpha);
            report.constant = std::max(report.constant, row.ratio);
            fit_rho.push_back(row.rho);
            fit_norm.push_back(row.norm);
            fit_err.push_back(row.norm_stderr);
            report.rows.push_back(row);
        }
    }
    report.fit = fit_log_slope(fit_rho, fit_norm, fit_err);
    return report;
}

double holder_pair_supremum(const ConeSpec& spec, const Integrand& f,
                            const ConePoint& center, double radius,
                            double alpha, int pairs, std::uint64_t seed) {
    if (!(alpha > 0.0)) throw std::invalid_argument("holder_pair_supremum: alpha must be positive");
    if (pairs < 1) throw std::invalid_argument("holder_pair_supremum: need at least one pair");
    QuadConfig cfg;
    cfg.log2_points = 12;
    cfg.seed = seed;
    BallQuadrature quad(spec, center, radius, cfg);
    // The center joins the pool: quotients against it dominate for fields
    // cusped at the center, which random pairs alone undersample.
    std::vector<ConePoint> pool = {center};
    for (int rep = 0; rep < quad.replicates(); ++rep)
        pool.insert(pool.end(), quad.points(rep).begin(), quad.points(rep).end());
    if (pool.size() < 2) throw std::domain_error("holder_pair_supremum: ball produced no sample pool");

    std::uint64_t state = mix_seed(seed, 0xa1fa);
    double sup = 0.0;
    auto consider = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        double d = distance(spec, pool[i], pool[j]);
        if (!(d > 0.0)) return;
        double quotient = std::abs(f(pool[i]) - f(pool[j])) / std::pow(d, alpha);
        sup = std::max(sup, quotient);
    };
    for (int k = 0; k < pairs; ++k)
        consider(next_bits(state) % pool.size(), next_bits(state) % pool.size());
    // A deterministic sweep of center pairs on top of the random budget.
    const std::size_t stride = std::max<std::size_t>(1, pool.size() / 64);
    for (std::size_t j = 1; j < pool.size(); j += stride) consider(0, j);
    return sup;
}

double holder_at_point(const ConeSpec& spec, const Integrand& f,
                       const ConePoint& center, double radius, double alpha,
                       std::uint64_t seed) {
    if (!(alpha > 0.0)) throw std::invalid_argument("holder_at_point: alpha must be positive");
    QuadConfig cfg;
    cfg.log2_points = 12;
    cfg.seed = seed;
    BallQuadrature quad(spec, center, radius, cfg);
    const double f0 = f(center);
    double sup = 0.0;
    for (int rep = 0; rep < quad.replicates(); ++rep) {
        for (const ConePoint& p : quad.points(rep)) {
            double d = distance(spec, center, p);
            if (!(d > 0.0)) continue;
            sup = std::max(sup, std::abs(f(p) - f0) / std::pow(d, alpha));
        }
    }
    return sup;
}

std::vector<double> default_monotonicity_scales() {
    std::vector<double> out(9);
    for (int k = 1; k <= 9; ++k) out[k - 1] = 0.1 * k;
    return out;
}

MonotonicityReport check_monotonicity(const ConeSpec& spec, const Integrand& u,
                                      double degree,
                                      const std::vector<double>& scales,
                                      const QuadConfig& cfg) {
    if (scales.empty()) throw std::invalid_argument("check_monotonicity: need at least one scale");
    MonotonicityReport report;
    report.degree = degree;
    report.holds = true;
    report.strict = true;
    ConePoint apex = apex_point(spec);
    // Same seed at every radius: concentric balls at a full singular point
    // share one design up to exact homothety, so ratios of the two sides
    // carry almost no quadrature noise.
    BallQuadrature unit(spec, apex, 1.0, cfg);
    Estimate base = unit.scaled_l2(u);
    for (double rho : scales) {
        if (!(rho > 0.0 && rho <= 1.0))
            throw std::invalid_argument("check_monotonicity: scales must lie in (0, 1]");
        BallQuadrature ball(spec, apex, rho, cfg);
        Estimate lhs = ball.scaled_l2(u);
        MonotonicityRow row;
        row.rho = rho;
        row.lhs = lhs.value;
        row.bound = std::pow(rho, degree) * base.value;
        row.stderr_ = std::hypot(lhs.stderr_, std::pow(rho, degree) * base.stderr_);
        row.margin = row.bound - row.lhs;
        if (row.lhs > row.bound + 5.0 * row.stderr_) report.holds = false;
        if (row.margin < 5.0 * row.stderr_) report.strict = false;
        if (row.bound > 0.0)
            report.max_equality_error =
                std::max(report.max_equality_error, std::abs(row.margin) / row.bound);
        report.rows.push_back(row);
    }
    return report;
}

double off_center_factor(const ConeSpec& spec, double eps, double lambda,
                         double alpha, double dstar) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("off_center_factor: lambda must lie in (0, 1)");
    if (!(eps >= 0.0 && eps < 1.0))
        throw std::invalid_argument("off_center_factor: eps must lie in [0, 1)");
    double md = spec.total_dim() + dstar;
    return std::pow(lambda, dstar - 2.0 - alpha) * std::pow(1.0 + eps / lambda, md) *
           std::pow(1.0 - eps, -md);
}

OffCenterReport check_off_center_decay(const ConeSpec& spec, const ConePoint& x,
                                       const Integrand& u, double lambda,
                                       double alpha, const QuadConfig& cfg) {
    double mu = max_holder_exponent(spec);
    if (!(alpha > 0.0 && alpha < mu))
        throw std::invalid_argument("check_off_center_decay: alpha must lie in (0, mu)");
    OffCenterReport report;
    report.eps = distance(spec, apex_point(spec), x);
    double dstar = next_rate_above_quadratic(spec);
    report.sufficient_bound = off_center_factor(spec, report.eps, lambda, alpha, dstar);
    report.applicable = report.sufficient_bound < 1.0;

    BallQuadrature unit(spec, x, 1.0, cfg);
    BallQuadrature small(spec, x, lambda, cfg);
    Estimate big = unit.scaled_l2(u);
    Estimate lhs = small.scaled_l2(u);
    double factor = std::pow(lambda, 2.0 + alpha);
    report.lhs = lhs.value;
    report.rhs = factor * big.value;
    report.stderr_ = std::hypot(lhs.stderr_, factor * big.stderr_);
    // The measured inequality can hold beyond the reach of the sufficient
    // bound, so the two verdicts are reported independently.
    report.passed = report.rhs - report.lhs >= 5.0 * report.stderr_;
    return report;
}

}  // namespace cones
