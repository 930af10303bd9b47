#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cones/analysis.hpp"
#include "cones/geometry.hpp"
#include "cones/modes.hpp"
#include "cones/quadrature.hpp"
#include "cones/spectrum.hpp"

using namespace cones;

namespace {

ConeSpec make_spec(std::vector<double> betas, int q) {
    ConeSpec spec;
    spec.betas = std::move(betas);
    spec.euclidean_dim = q;
    return spec;
}

// First enumerated harmonic of each growth rate strictly above degree `low`,
// flattened across recipes, up to `count` of them.
std::vector<PolarExpr> superquadratic_modes(const ConeSpec& spec, double low,
                                            int count) {
    std::vector<PolarExpr> out;
    for (const auto& rate : enumerate_growth_rates(spec, 4.2)) {
        if (rate.degree <= low + 1e-9) continue;
        for (const auto& recipe : rate.recipes) {
            for (auto& mode : build_mode_basis(spec, recipe)) {
                out.push_back(std::move(mode));
                if (static_cast<int>(out.size()) == count) return out;
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("scaled norm of a constant equals the square root of the unit-ball volume") {
    for (const auto& spec :
         {make_spec({0.75}, 1), make_spec({0.6, 0.45}, 0)}) {
        const double truth = std::sqrt(
            volume_density(spec) * euclidean_unit_ball_volume(spec.total_dim()));
        QuadConfig cfg;
        cfg.log2_points = 14;
        for (double radius : {0.3, 1.0}) {
            auto norm = scaled_norm(
                spec, [](const ConePoint&) { return 1.0; }, apex_point(spec),
                radius, cfg);
            CHECK(norm.radius == radius);
            CHECK(std::abs(norm.value - truth) <
                  std::max(5.0 * norm.stderr_, 5e-3 * truth));
        }
    }
}

TEST_CASE("homogeneous modes scale as rho^d across concentric apex balls") {
    auto spec = make_spec({0.75}, 1);
    auto rates = enumerate_growth_rates(spec, 3.0);
    // First rate above 2 is the decay order 7/3.
    PolarExpr mode;
    double degree = 0.0;
    for (const auto& rate : rates) {
        if (rate.degree > 2.0 + 1e-9) {
            mode = build_mode(spec, rate.recipes.front());
            degree = rate.degree;
            break;
        }
    }
    REQUIRE(degree == doctest::Approx(7.0 / 3.0).epsilon(1e-12));

    QuadConfig cfg;
    cfg.log2_points = 12;
    auto u = as_integrand(mode);
    auto base = scaled_norm(spec, u, apex_point(spec), 1.0, cfg);
    REQUIRE(base.value > 0.0);
    for (double rho : {0.5, 0.25, 0.3}) {
        auto small = scaled_norm(spec, u, apex_point(spec), rho, cfg);
        CHECK(small.value / base.value ==
              doctest::Approx(std::pow(rho, degree)).epsilon(1e-10));
    }
}

TEST_CASE("scaled norm is invariant under simultaneous dilation") {
    auto spec = make_spec({0.75}, 1);
    auto u = PolarExpr::radial_mode(spec, 0, {1, 0}, 1, false) +
             PolarExpr::coordinate_s(spec, 0) * 0.7 +
             PolarExpr::radial_power(spec, 0, 2) * 0.25;
    const double lambda = 0.37;
    ConePoint x = make_point(spec, {0.8}, {0.3}, {0.2});

    QuadConfig cfg;
    cfg.log2_points = 12;
    auto lhs = scaled_norm(
        spec, [&](const ConePoint& p) { return u.eval(dilate(p, lambda)); }, x,
        0.25, cfg);
    auto rhs = scaled_norm(spec, as_integrand(u), dilate(x, lambda),
                           lambda * 0.25, cfg);
    CHECK(lhs.value == doctest::Approx(rhs.value).epsilon(1e-10));
}

TEST_CASE("projection recovers span coefficients and reports rank") {
    auto spec = make_spec({2.0 / 3.0}, 1);
    auto basis = subquadratic_space(spec);
    REQUIRE(basis.size() == 5);

    QuadConfig cfg;
    cfg.log2_points = 12;
    BallQuadrature quad(spec, apex_point(spec), 1.0, cfg);

    PolarExpr f = basis[0] * 2.5 - basis[3] * 1.25 + basis[2] * 0.6;
    auto proj = project_span(basis, quad, as_integrand(f));
    CHECK(proj.rank == 5);
    CHECK(proj.condition >= 1.0);
    const std::vector<double> expected = {2.5, 0.0, 0.6, -1.25, 0.0};
    for (int i = 0; i < 5; ++i)
        CHECK(std::abs(proj.coeffs[i] - expected[i]) <
              std::max(10.0 * proj.coeff_stderr[i], 1e-8));

    // Reconstruction agrees with f at the quadrature nodes.
    PolarExpr rebuilt = combine(basis, proj.coeffs);
    for (int i = 0; i < 20; ++i) {
        const ConePoint& p = quad.points(0)[i * 7];
        CHECK(rebuilt.eval(p) == doctest::Approx(f.eval(p)).epsilon(1e-6));
    }
}

TEST_CASE("projection of a decay-order mode onto the subquadratic space vanishes") {
    auto spec = make_spec({2.0 / 3.0}, 1);
    auto basis = subquadratic_space(spec);
    // Decay order 5/2: the s-weighted first angular mode.
    auto rates = enumerate_growth_rates(spec, 3.0);
    PolarExpr mode;
    for (const auto& rate : rates)
        if (rate.degree > 2.0 + 1e-9) {
            mode = build_mode(spec, rate.recipes.front());
            break;
        }
    REQUIRE(mode.homogeneity() == doctest::Approx(2.5).epsilon(1e-12));

    QuadConfig cfg;
    cfg.log2_points = 13;
    BallQuadrature quad(spec, apex_point(spec), 1.0, cfg);
    auto proj = project_span(basis, quad, as_integrand(mode));
    for (int i = 0; i < proj.coeffs.size(); ++i)
        CHECK(std::abs(proj.coeffs[i]) <= 10.0 * proj.coeff_stderr[i]);
}

TEST_CASE("rank-deficient spans are truncated but still reproduce the target") {
    auto spec = make_spec({0.75}, 1);
    std::vector<PolarExpr> basis = {PolarExpr::constant(spec, 1.0),
                                    PolarExpr::coordinate_s(spec, 0),
                                    PolarExpr::coordinate_s(spec, 0)};
    QuadConfig cfg;
    cfg.log2_points = 10;
    BallQuadrature quad(spec, apex_point(spec), 1.0, cfg);
    PolarExpr f = PolarExpr::coordinate_s(spec, 0);
    auto proj = project_span(basis, quad, as_integrand(f));
    CHECK(proj.rank == 2);
    PolarExpr rebuilt = combine(basis, proj.coeffs);
    for (int i = 0; i < 20; ++i) {
        const ConePoint& p = quad.points(1)[i * 3];
        CHECK(rebuilt.eval(p) == doctest::Approx(f.eval(p)).epsilon(1e-8));
    }
}

TEST_CASE("log-log fits recover exponents and down-weight noisy scales") {
    auto rho = dyadic_scales(6);
    REQUIRE(rho.size() == 6);
    CHECK(rho.front() == 0.5);
    CHECK(rho.back() == doctest::Approx(std::pow(2.0, -6.0)));

    std::vector<double> value(6), err(6);
    for (int i = 0; i < 6; ++i) {
        value[i] = 3.7 * std::pow(rho[i], 1.8);
        err[i] = 1e-12 * value[i];
    }
    auto fit = fit_log_slope(rho, value, err);
    CHECK(fit.points_used == 6);
    CHECK(fit.slope == doctest::Approx(1.8).epsilon(1e-9));
    CHECK(fit.intercept == doctest::Approx(std::log(3.7)).epsilon(1e-9));

    // Corrupt the finest scale but flag it with an honest error bar.
    value[5] *= 3.0;
    err[5] = value[5];
    fit = fit_log_slope(rho, value, err);
    CHECK(fit.slope == doctest::Approx(1.8).epsilon(1e-3));

    // Degenerate input: a single positive value gives no fit.
    fit = fit_log_slope({0.5, 0.25}, {1.0, 0.0}, {0.0, 0.0});
    CHECK(fit.points_used == 1);
    CHECK(fit.slope == 0.0);
}

TEST_CASE("Campanato scan of a constant is zero to rounding") {
    auto spec = make_spec({0.75}, 1);
    std::vector<ConePoint> centers = {apex_point(spec),
                                      make_point(spec, {0.4}, {1.0}, {-0.2})};
    QuadConfig cfg;
    cfg.log2_points = 10;
    auto report = campanato_estimate(
        spec, [](const ConePoint&) { return 3.25; }, centers, 0.3,
        dyadic_scales(4), cfg);
    CHECK(report.constant <= 1e-8);
    CHECK(report.rows.size() == 8);
}

TEST_CASE("Campanato constant of an exact Hoelder field sits near the pair oracle") {
    auto spec = make_spec({0.75}, 1);
    const double alpha = 0.3;
    ConePoint apex = apex_point(spec);
    auto f = [&spec, &apex, alpha](const ConePoint& p) {
        return std::pow(distance(spec, apex, p), alpha);
    };

    // Independent oracle: the two-point quotient has supremum exactly 1,
    // attained against the apex, and every sampled quotient is bounded by it.
    double oracle = holder_pair_supremum(spec, f, apex, 1.0, alpha, 100000);
    CHECK(oracle <= 1.0 + 1e-9);
    CHECK(oracle > 1.0 - 1e-9);

    QuadConfig cfg;
    cfg.log2_points = 11;
    auto report =
        campanato_estimate(spec, f, {apex}, alpha, dyadic_scales(6), cfg);
    // Deviation from the ball average costs at most the oscillation over a
    // diameter, so the scan constant is at most 2^alpha times the seminorm.
    CHECK(report.constant <= std::pow(2.0, alpha) * oracle * 1.05);
    CHECK(report.constant >= 0.1 * oracle);
    // The field scales exactly, so the fitted decay exponent is alpha.
    CHECK(report.fit.slope == doctest::Approx(alpha).epsilon(0.05));
}

TEST_CASE("Campanato scan detects a lower Hoelder exponent by slope and divergence") {
    auto spec = make_spec({0.75}, 1);
    const double probe_alpha = 0.3;
    const double true_alpha = 0.2;
    ConePoint apex = apex_point(spec);
    auto f = [&spec, &apex, true_alpha](const ConePoint& p) {
        return std::pow(distance(spec, apex, p), true_alpha);
    };
    QuadConfig cfg;
    cfg.log2_points = 11;
    auto scales = dyadic_scales(8);
    auto report = campanato_estimate(spec, f, {apex}, probe_alpha, scales, cfg);
    CHECK(report.fit.points_used == 8);
    CHECK(report.fit.slope == doctest::Approx(true_alpha).epsilon(0.1));
    // Probing above the true exponent makes the ratios blow up at fine scales.
    CHECK(report.rows.back().ratio > 1.5 * report.rows.front().ratio);

    // Restricting the scale set can only lower the constant.
    auto coarse = campanato_estimate(spec, f, {apex}, probe_alpha,
                                     dyadic_scales(4), cfg);
    CHECK(coarse.constant <= report.constant + 1e-15);
}

TEST_CASE("monotonicity: equality for a pure mode, margins for mixtures") {
    auto spec = make_spec({0.75}, 1);
    auto rates = enumerate_growth_rates(spec, 3.5);
    PolarExpr low, high;
    double d_low = 0.0, d_high = 0.0;
    for (const auto& rate : rates) {
        if (rate.degree <= 2.0 + 1e-9) continue;
        if (low.zero()) {
            low = build_mode(spec, rate.recipes.front());
            d_low = rate.degree;
        } else if (rate.degree > d_low + 0.25) {
            high = build_mode(spec, rate.recipes.front());
            d_high = rate.degree;
            break;
        }
    }
    REQUIRE(d_low == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
    REQUIRE(d_high > d_low);

    QuadConfig cfg;
    cfg.log2_points = 12;

    SUBCASE("single mode: the ratio is exactly rho^d, including rho = 1") {
        auto report = check_monotonicity(spec, as_integrand(low), d_low,
                                         {0.25, 0.5, 1.0}, cfg);
        CHECK(report.holds);
        CHECK(report.max_equality_error < 1e-6);
        CHECK(report.rows.back().margin == 0.0);
    }

    SUBCASE("distinct-degree modes are L2-orthogonal on apex balls") {
        BallQuadrature quad(spec, apex_point(spec), 1.0, cfg);
        auto cross = quad.integrate(
            [&](const ConePoint& p) { return low.eval(p) * high.eval(p); });
        CHECK(std::abs(cross.value) <= 10.0 * cross.stderr_);
    }

    SUBCASE("mixture: strict margin matching the termwise series") {
        PolarExpr u = low + high * 0.8;
        auto report = check_monotonicity(spec, as_integrand(u), d_low,
                                         default_monotonicity_scales(), cfg);
        CHECK(report.holds);
        CHECK(report.strict);

        // Oracle route: orthogonality reduces the norm of the sum to the
        // termwise series  ||u||^2_{B_rho} = sum_i c_i^2 g_i^2 rho^{2 d_i}
        // with g_i the unit-ball norms of the modes.
        BallQuadrature quad(spec, apex_point(spec), 1.0, cfg);
        double g_low = quad.scaled_l2(as_integrand(low)).value;
        double g_high = quad.scaled_l2(as_integrand(high)).value;
        for (const auto& row : report.rows) {
            double series =
                std::sqrt(g_low * g_low * std::pow(row.rho, 2.0 * d_low) +
                          0.64 * g_high * g_high * std::pow(row.rho, 2.0 * d_high));
            double bound = std::pow(row.rho, d_low) *
                           std::sqrt(g_low * g_low + 0.64 * g_high * g_high);
            CHECK(row.lhs == doctest::Approx(series).epsilon(2e-3));
            CHECK(row.margin == doctest::Approx(bound - series).epsilon(2e-2));
        }
    }
}

TEST_CASE("off-center decay: closed-form factor and measured inequality") {
    auto spec = make_spec({0.75}, 1);
    const double dstar = next_rate_above_quadratic(spec);
    REQUIRE(dstar == doctest::Approx(7.0 / 3.0).epsilon(1e-12));

    SUBCASE("at the apex the factor reduces to the monotonicity gain") {
        const double lambda = 0.25, alpha = 0.2;
        double f0 = off_center_factor(spec, 0.0, lambda, alpha, dstar);
        CHECK(f0 == doctest::Approx(std::pow(lambda, dstar - 2.0 - alpha)).epsilon(1e-15));
        CHECK(f0 < 1.0);
    }

    SUBCASE("single decay-order mode near the apex") {
        auto rates = enumerate_growth_rates(spec, 3.0);
        PolarExpr mode;
        for (const auto& rate : rates)
            if (rate.degree > 2.0 + 1e-9) {
                mode = build_mode(spec, rate.recipes.front());
                break;
            }
        QuadConfig cfg;
        cfg.log2_points = 12;
        ConePoint x = make_point(spec, {0.01}, {0.7}, {0.0});
        auto report = check_off_center_decay(spec, x, as_integrand(mode), 0.25,
                                             0.2, cfg);
        CHECK(report.eps == doctest::Approx(0.01).epsilon(1e-12));
        // At this offset the sufficient bound no longer certifies (F is
        // slightly above 1), yet the measured inequality holds comfortably.
        CHECK_FALSE(report.applicable);
        CHECK(report.sufficient_bound > 1.0);
        CHECK(report.sufficient_bound < 1.2);
        CHECK(report.passed);
        // Near the apex the measured ratio tracks the homogeneity of the mode.
        double big = report.rhs / std::pow(0.25, 2.2);
        CHECK(report.lhs / big ==
              doctest::Approx(std::pow(0.25, dstar)).epsilon(0.05));
    }

    SUBCASE("random superquadratic mixtures at random admissible centers") {
        auto modes = superquadratic_modes(spec, 2.0, 5);
        REQUIRE(modes.size() == 5);
        QuadConfig cfg;
        cfg.log2_points = 12;
        std::uint64_t state = 99;
        auto uniform = [&state]() {
            state = state * 6364136223846793005ULL + 1442695040888963407ULL;
            return static_cast<double>(state >> 11) * 0x1.0p-53;
        };
        for (int trial = 0; trial < 20; ++trial) {
            PolarExpr u(spec);
            for (const auto& mode : modes) u += mode * (0.3 + 0.7 * uniform());
            double eps = 0.005 * uniform();
            ConePoint x = uniform() < 0.5
                              ? make_point(spec, {eps}, {6.0 * uniform()}, {0.0})
                              : make_point(spec, {0.0}, {0.0},
                                           {eps * (uniform() < 0.5 ? 1.0 : -1.0)});
            auto report =
                check_off_center_decay(spec, x, as_integrand(u), 0.25, 0.2, cfg);
            CHECK(report.applicable);
            CHECK(report.passed);
        }
    }

    SUBCASE("alpha outside the admissible range is rejected") {
        ConePoint x = apex_point(spec);
        CHECK_THROWS_AS(check_off_center_decay(
                            spec, x, [](const ConePoint&) { return 0.0; }, 0.25,
                            0.5, QuadConfig{}),
                        std::invalid_argument);
    }
}
