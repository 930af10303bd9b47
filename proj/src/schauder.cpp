#include "cones/schauder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace cones {

namespace {

int index_of(const std::vector<int>& v, int a) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == a) return static_cast<int>(i);
    return -1;
}

}  // namespace

FrameMap make_frame(const ConeSpec& spec, const ConePoint& center,
                    const std::vector<int>& kept_factors) {
    spec.validate();
    check_point(spec, center);
    FrameMap frame;
    frame.source = spec;
    frame.kept = kept_factors;
    std::sort(frame.kept.begin(), frame.kept.end());
    for (int a = 0; a < spec.cone_count(); ++a)
        if (index_of(frame.kept, a) < 0) frame.developed.push_back(a);
    for (int a : frame.kept) {
        if (a < 0 || a >= spec.cone_count())
            throw std::invalid_argument("make_frame: kept factor index out of range");
        frame.model.betas.push_back(spec.betas[static_cast<std::size_t>(a)]);
        frame.center_model.polar.push_back(center.polar[static_cast<std::size_t>(a)]);
    }
    frame.model.euclidean_dim =
        spec.euclidean_dim + 2 * static_cast<int>(frame.developed.size());
    frame.center_model.s = center.s;
    for (int a : frame.developed) {
        double rc = center.r(a);
        if (!(rc > 0.0))
            throw std::domain_error("make_frame: cannot develop a factor whose center sits on its singular set");
        frame.developed_r.push_back(rc);
        // The center lands at the origin of each developed pair.
        frame.center_model.s.push_back(0.0);
        frame.center_model.s.push_back(0.0);
    }
    return frame;
}

namespace {

// Position bookkeeping for the frame: a developed factor's (X, Y) pair sits
// after the original Euclidean block, in ascending factor order.
struct FrameView {
    const FrameMap& frame;

    bool is_kept(int a) const { return index_of(frame.kept, a) >= 0; }
    int model_cone(int a) const { return index_of(frame.kept, a); }
    int pair_base(int a) const {
        return frame.source.euclidean_dim + 2 * index_of(frame.developed, a);
    }
    double beta(int a) const { return frame.source.betas[static_cast<std::size_t>(a)]; }
    double center_r(int a) const {
        return frame.developed_r[static_cast<std::size_t>(index_of(frame.developed, a))];
    }

    PolarExpr first_r(int a, const PolarExpr& u) const {
        return is_kept(a) ? d_r(u, model_cone(a)) : d_s(u, pair_base(a));
    }
    PolarExpr first_t(int a, const PolarExpr& u) const {
        return is_kept(a) ? d_theta_over_r(u, model_cone(a))
                          : d_s(u, pair_base(a) + 1) * beta(a);
    }
};

}  // namespace

double frame_derivative(const FrameMap& frame, const DerivativeOp& op,
                        const PolarExpr& model_expr) {
    FrameView view{frame};
    const PolarExpr& u = model_expr;
    PolarExpr image;
    switch (op.kind) {
        case DerivativeOp::Kind::ss:
            image = d_s(d_s(u, op.i), op.j);
            break;
        case DerivativeOp::Kind::rs:
            image = view.first_r(op.a, d_s(u, op.i));
            break;
        case DerivativeOp::Kind::ts:
            image = view.first_t(op.a, d_s(u, op.i));
            break;
        case DerivativeOp::Kind::rr:
            image = view.first_r(op.a, view.first_r(op.b, u));
            break;
        case DerivativeOp::Kind::tt:
            image = view.first_t(op.a, view.first_t(op.b, u));
            break;
        case DerivativeOp::Kind::rt:
            image = view.first_r(op.a, view.first_t(op.b, u));
            break;
        case DerivativeOp::Kind::factor_laplacian:
            if (view.is_kept(op.a)) {
                image = conical_laplacian(u, view.model_cone(op.a));
            } else {
                int base = view.pair_base(op.a);
                image = d_s(d_s(u, base), base) + d_s(d_s(u, base + 1), base + 1);
            }
            break;
        case DerivativeOp::Kind::rr_pure:
            if (view.is_kept(op.a)) {
                image = apply({DerivativeOp::Kind::rr_pure, view.model_cone(op.a)}, u);
            } else {
                int base = view.pair_base(op.a);
                image = d_s(d_s(u, base), base);
            }
            break;
        case DerivativeOp::Kind::tt_pure:
            if (view.is_kept(op.a)) {
                image = apply({DerivativeOp::Kind::tt_pure, view.model_cone(op.a)}, u);
            } else {
                int base = view.pair_base(op.a);
                double b = view.beta(op.a);
                image = d_s(d_s(u, base + 1), base + 1) * (b * b) -
                        d_s(u, base) * (b * b / view.center_r(op.a));
            }
            break;
        case DerivativeOp::Kind::rt_pure:
            if (view.is_kept(op.a)) {
                image = apply({DerivativeOp::Kind::rt_pure, view.model_cone(op.a)}, u);
            } else {
                int base = view.pair_base(op.a);
                double b = view.beta(op.a);
                image = d_s(d_s(u, base), base + 1) * b +
                        d_s(u, base + 1) * (b / view.center_r(op.a));
            }
            break;
    }
    return image.simplify().eval(frame.center_model);
}

void IterationParams::validate() const {
    scales.validate();
    quad.validate();
    if (k_last < 0)
        throw std::invalid_argument("IterationParams: k_last must be nonnegative");
}

DerivativeTrace schauder_iterate(const ConeSpec& spec, const Integrand& u,
                                 const ConePoint& x, double alpha,
                                 const std::vector<DerivativeOp>& ops,
                                 const IterationParams& params) {
    spec.validate();
    params.validate();
    check_point(spec, x);
    if (!(alpha > 0.0))
        throw std::invalid_argument("schauder_iterate: alpha must be positive");

    ScaleParams sp = params.scales;
    sp.k_min = 0;
    sp.k_max = params.k_last;
    const std::vector<ScaleClassification> classes = classify_scales(spec, x, sp);

    DerivativeTrace trace;
    trace.x = x;
    trace.alpha = alpha;
    trace.lambda = sp.lambda;
    trace.ops = ops;
    trace.tau.assign(ops.size(), 0.0);
    trace.tau_stderr.assign(ops.size(), 0.0);
    std::vector<double> tau_var(ops.size(), 0.0);
    std::vector<double> fit_rho, fit_norm, fit_err;

    Integrand current = u;
    for (int k = 0; k <= params.k_last; ++k) {
        const ScaleClassification& sc = classes[static_cast<std::size_t>(k)];
        ScaleStep step;
        step.k = k;
        step.rho = std::pow(sp.lambda, k);
        step.good = sc.good;
        step.tau.assign(ops.size(), 0.0);
        step.tau_stderr.assign(ops.size(), 0.0);

        QuadConfig ncfg = params.quad;
        ncfg.seed = mix_seed(params.quad.seed, 0x6e00 + static_cast<std::uint64_t>(k));
        BallQuadrature ball(spec, x, step.rho, ncfg);
        Estimate nrm = ball.scaled_l2(current);
        step.norm = nrm.value;
        step.norm_stderr = nrm.stderr_;
        if (step.norm > 0.0) {
            fit_rho.push_back(step.rho);
            fit_norm.push_back(step.norm);
            fit_err.push_back(step.norm_stderr);
            trace.decay_constant = std::max(
                trace.decay_constant, step.norm / std::pow(step.rho, 2.0 + alpha));
        }

        if (sc.good) {
            FrameMap frame = make_frame(spec, x, sc.kept_factors);
            DevelopedChart chart = develop(spec, x, step.rho, frame.developed);
            std::vector<PolarExpr> basis = subquadratic_space(sc.model);

            QuadConfig mcfg = params.quad;
            mcfg.seed = mix_seed(params.quad.seed, 0x9100 + static_cast<std::uint64_t>(k));
            BallQuadrature model_ball(sc.model, frame.center_model, step.rho, mcfg);
            Integrand snapshot = current;
            Integrand pulled = [snapshot, chart](const ConePoint& q) {
                return snapshot(chart.from_model(q));
            };
            Projection proj = project_span(basis, model_ball, pulled);
            step.coeffs = proj.coeffs;
            step.coeff_stderr = proj.coeff_stderr;
            for (std::size_t o = 0; o < ops.size(); ++o) {
                double value = 0.0;
                double var = 0.0;
                for (int i = 0; i < proj.coeffs.size(); ++i) {
                    double v = frame_derivative(frame, ops[o], basis[static_cast<std::size_t>(i)]);
                    value += proj.coeffs[i] * v;
                    var += proj.coeff_stderr[i] * v * proj.coeff_stderr[i] * v;
                }
                step.tau[o] = value;
                step.tau_stderr[o] = std::sqrt(var);
                trace.tau[o] += value;
                tau_var[o] += var;
            }
            PolarExpr patch = combine(basis, proj.coeffs);
            current = [snapshot, chart, patch](const ConePoint& p) {
                return snapshot(p) - patch.eval(chart.to_model(p));
            };
        }
        trace.steps.push_back(std::move(step));
    }
    for (std::size_t o = 0; o < ops.size(); ++o)
        trace.tau_stderr[o] = std::sqrt(tau_var[o]);
    if (fit_rho.size() >= 2)
        trace.norm_fit = fit_log_slope(fit_rho, fit_norm, fit_err);
    return trace;
}

void SchauderParams::validate() const {
    iteration.validate();
    if (!(delta > 0.0))
        throw std::invalid_argument("SchauderParams: delta must be positive");
    if (!(domain_radius > 0.0))
        throw std::invalid_argument("SchauderParams: domain_radius must be positive");
    for (double s : derivative_scales)
        if (!(s > 0.0) || !(s <= 1.0))
            throw std::invalid_argument("SchauderParams: derivative scales must lie in (0, 1]");
}

std::vector<HoelderReport> verify_schauder(const ConeSpec& spec,
                                           const PolarExpr& f,
                                           const std::vector<ConePoint>& points,
                                           double alpha,
                                           const SchauderParams& params) {
    spec.validate_primary();
    params.validate();
    const double mu = max_holder_exponent(spec);
    if (!(alpha > 0.0) || !(alpha < mu))
        throw std::invalid_argument(
            "verify_schauder: alpha " + std::to_string(alpha) +
            " is outside the usable interval (0, " + std::to_string(mu) + ")");

    SpectralSolution sol = solve_dirichlet_apex(spec, f, PolarExpr(spec),
                                                params.domain_radius);
    const std::vector<DerivativeOp> ops = second_order_ops(spec);
    std::vector<PolarExpr> du;      // symbolic derivative of the solution
    std::vector<double> shift_du;   // second derivative of r_1^2 (a constant)
    const PolarExpr r2 = PolarExpr::radial_power(spec, 0, 2);
    const ConePoint apex = apex_point(spec);
    du.reserve(ops.size());
    shift_du.reserve(ops.size());
    for (const DerivativeOp& op : ops) {
        PolarExpr d = apply(op, sol.u);
        d.simplify();
        du.push_back(std::move(d));
        PolarExpr dshift = apply(op, r2);
        dshift.simplify();
        shift_du.push_back(dshift.zero() ? 0.0 : dshift.eval(apex));
    }

    const QuadConfig base = params.iteration.quad;
    QuadConfig dcfg = base;
    dcfg.seed = mix_seed(base.seed, 0xd0ba11);
    BallQuadrature domain_ball(spec, apex, params.domain_radius, dcfg);
    const Integrand u_int = as_integrand(sol.u);
    Estimate usq = domain_ball.integrate(
        [u_int](const ConePoint& p) { double t = u_int(p); return t * t; });
    const double u_l2 = std::sqrt(std::max(0.0, usq.value));

    const std::vector<double> dscales =
        params.derivative_scales.empty() ? dyadic_scales(6) : params.derivative_scales;

    std::vector<HoelderReport> reports;
    reports.reserve(points.size());
    for (std::size_t idx = 0; idx < points.size(); ++idx) {
        const ConePoint& x = points[idx];
        check_point(spec, x);
        HoelderReport rep;
        rep.x = x;
        rep.alpha = alpha;
        rep.ops = ops;
        rep.f_value = f.eval(x);
        rep.u_l2 = u_l2;
        rep.f_holder = holder_at_point(spec, as_integrand(f), x, 1.0, alpha,
                                       mix_seed(base.seed, 0xf01d00 + idx));

        // Normalize: subtract the quadratic lift of f(x), then divide by the
        // combined size so the iterated function is bounded by one.
        PolarExpr shifted = sol.u - r2 * (rep.f_value / 4.0);
        QuadConfig ncfg = base;
        ncfg.seed = mix_seed(base.seed, 0xab0000 + idx);
        ScaledNorm un = scaled_norm(spec, as_integrand(shifted), x, 1.0, ncfg);
        double m = un.value + rep.f_holder / params.delta;
        if (!(m > 0.0)) m = 1.0;
        rep.normalization = m;

        Integrand v = [shifted, m](const ConePoint& p) { return shifted.eval(p) / m; };
        IterationParams ip = params.iteration;
        ip.quad.seed = mix_seed(base.seed, 0x17e0000 + idx);
        rep.trace = schauder_iterate(spec, v, x, alpha, ops, ip);

        rep.tau.assign(ops.size(), 0.0);
        rep.tau_stderr.assign(ops.size(), 0.0);
        for (std::size_t o = 0; o < ops.size(); ++o) {
            rep.tau[o] = m * rep.trace.tau[o] + rep.f_value / 4.0 * shift_du[o];
            rep.tau_stderr[o] = m * rep.trace.tau_stderr[o];
        }

        // Campanato quotients of Du - tau, measured from the symbolic
        // derivative; the worst operator defines K and the reported fit.
        double worst_k = 0.0;
        std::size_t worst_op = 0;
        std::vector<std::vector<double>> rows(ops.size()), row_err(ops.size());
        for (std::size_t o = 0; o < ops.size(); ++o) {
            const PolarExpr& expr = du[o];
            const double t = rep.tau[o];
            for (std::size_t si = 0; si < dscales.size(); ++si) {
                QuadConfig ccfg = base;
                ccfg.seed = mix_seed(base.seed,
                                     0xca0000 + (idx << 12) + (o << 6) + si);
                BallQuadrature ball(spec, x, dscales[si], ccfg);
                Estimate e = ball.scaled_l2(
                    [&expr, t](const ConePoint& p) { return expr.eval(p) - t; });
                rows[o].push_back(e.value);
                row_err[o].push_back(e.stderr_);
                double quotient = e.value / std::pow(dscales[si], alpha);
                if (quotient > worst_k) {
                    worst_k = quotient;
                    worst_op = o;
                }
            }
        }
        rep.campanato = worst_k;
        if (rows[worst_op].size() >= 2)
            rep.derivative_fit = fit_log_slope(dscales, rows[worst_op], row_err[worst_op]);

        double tau_max = 0.0;
        for (double t : rep.tau) tau_max = std::max(tau_max, std::abs(t));
        double denom = std::abs(rep.f_value) + rep.f_holder + rep.u_l2;
        rep.ratio = denom > 0.0 ? (tau_max + rep.campanato) / denom : 0.0;
        reports.push_back(std::move(rep));
    }
    return reports;
}

}  // namespace cones
