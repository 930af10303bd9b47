#include "cones/modes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cones {

namespace {

double ipow(double x, int n) {
    double out = 1.0;
    for (int i = 0; i < n; ++i) out *= x;
    return out;
}

bool default_shape(const ConeSpec& s) {
    return s.betas.empty() && s.euclidean_dim == 0;
}

void check_shape(const ConeSpec& spec, const Term& t) {
    if (t.r_pow.size() != spec.betas.size() ||
        t.angular.size() != spec.betas.size() ||
        t.s_pow.size() != static_cast<size_t>(spec.euclidean_dim))
        throw std::invalid_argument("term shape does not match spec");
}

Term blank_term(const ConeSpec& spec, double c) {
    Term t;
    t.coeff = c;
    t.r_pow.assign(spec.betas.size(), {});
    t.angular.assign(spec.betas.size(), {});
    t.s_pow.assign(spec.euclidean_dim, 0);
    return t;
}

// Canonical order; the key excludes the coefficient.
bool term_key_less(const Term& x, const Term& y) {
    if (x.r_pow != y.r_pow) return x.r_pow < y.r_pow;
    if (x.angular != y.angular) return x.angular < y.angular;
    return x.s_pow < y.s_pow;
}

bool term_key_equal(const Term& x, const Term& y) {
    return x.r_pow == y.r_pow && x.angular == y.angular && x.s_pow == y.s_pow;
}

}  // namespace

double radial_exponent(double beta, const RadialPow& e) {
    return (e.kappa != 0 ? e.kappa / beta : 0.0) + e.iota;
}

double Term::homogeneity(const ConeSpec& spec) const {
    double d = 0.0;
    for (size_t a = 0; a < r_pow.size(); ++a)
        d += radial_exponent(spec.betas[a], r_pow[a]);
    for (int p : s_pow) d += p;
    return d;
}

PolarExpr::PolarExpr(ConeSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
}

PolarExpr PolarExpr::constant(const ConeSpec& spec, double c) {
    PolarExpr e(spec);
    if (c != 0.0) e.terms_.push_back(blank_term(spec, c));
    return e;
}

PolarExpr PolarExpr::coordinate_s(const ConeSpec& spec, int i) {
    if (i < 0 || i >= spec.euclidean_dim)
        throw std::invalid_argument("Euclidean index out of range");
    PolarExpr e(spec);
    Term t = blank_term(spec, 1.0);
    t.s_pow[i] = 1;
    e.terms_.push_back(std::move(t));
    return e;
}

PolarExpr PolarExpr::radial_power(const ConeSpec& spec, int a, int p) {
    return radial_mode(spec, a, {0, p}, 0, false);
}

PolarExpr PolarExpr::angular_mode(const ConeSpec& spec, int a, int k,
                                  bool sine) {
    return radial_mode(spec, a, {k, 0}, k, sine);
}

PolarExpr PolarExpr::radial_mode(const ConeSpec& spec, int a, RadialPow e,
                                 int k, bool sine) {
    if (a < 0 || a >= spec.cone_count())
        throw std::invalid_argument("cone factor index out of range");
    if (k < 0) throw std::invalid_argument("angular frequency must be >= 0");
    PolarExpr out(spec);
    if (k == 0 && sine) return out;  // sin(0) = 0
    Term t = blank_term(spec, 1.0);
    t.r_pow[a] = e;
    t.angular[a] = {k, sine};
    out.terms_.push_back(std::move(t));
    return out;
}

PolarExpr PolarExpr::s_monomial(const ConeSpec& spec,
                                const std::vector<int>& powers) {
    if (powers.size() != static_cast<size_t>(spec.euclidean_dim))
        throw std::invalid_argument("power list does not match spec");
    for (int p : powers)
        if (p < 0) throw std::invalid_argument("negative Euclidean power");
    PolarExpr e(spec);
    Term t = blank_term(spec, 1.0);
    t.s_pow = powers;
    e.terms_.push_back(std::move(t));
    return e;
}

PolarExpr PolarExpr::squared_distance_to_apex(const ConeSpec& spec) {
    PolarExpr e(spec);
    for (int a = 0; a < spec.cone_count(); ++a) {
        Term t = blank_term(spec, 1.0);
        t.r_pow[a] = {0, 2};
        e.terms_.push_back(std::move(t));
    }
    for (int i = 0; i < spec.euclidean_dim; ++i) {
        Term t = blank_term(spec, 1.0);
        t.s_pow[i] = 2;
        e.terms_.push_back(std::move(t));
    }
    return e;
}

double PolarExpr::max_abs_coeff() const {
    double m = 0.0;
    for (const Term& t : terms_) m = std::max(m, std::fabs(t.coeff));
    return m;
}

PolarExpr& PolarExpr::simplify(double rel_tol) {
    std::sort(terms_.begin(), terms_.end(), term_key_less);
    std::vector<Term> merged;
    for (Term& t : terms_) {
        if (!merged.empty() && term_key_equal(merged.back(), t))
            merged.back().coeff += t.coeff;
        else
            merged.push_back(std::move(t));
    }
    double largest = 0.0;
    for (const Term& t : merged) largest = std::max(largest, std::fabs(t.coeff));
    const double cut = rel_tol * largest;
    terms_.clear();
    for (Term& t : merged)
        if (t.coeff != 0.0 && std::fabs(t.coeff) > cut)
            terms_.push_back(std::move(t));
    return *this;
}

double PolarExpr::eval(const ConePoint& p) const {
    check_point(spec_, p);
    double sum = 0.0;
    for (const Term& t : terms_) {
        double val = t.coeff;
        bool vanished = false;
        for (size_t a = 0; a < t.r_pow.size(); ++a) {
            const double r = p.r(static_cast<int>(a));
            const double e = radial_exponent(spec_.betas[a], t.r_pow[a]);
            const AngularFactor& ang = t.angular[a];
            if (r == 0.0) {
                if (e > 0.0) {
                    vanished = true;
                    break;
                }
                if (e < 0.0)
                    throw std::domain_error(
                        "expression is singular on the singular set: " + str());
                if (ang.k != 0)
                    throw std::domain_error(
                        "expression is discontinuous on the singular set: " +
                        str());
            } else {
                if (e != 0.0) val *= std::pow(r, e);
                if (ang.k != 0) {
                    const double phase = ang.k * p.theta(static_cast<int>(a));
                    val *= ang.sine ? std::sin(phase) : std::cos(phase);
                }
            }
        }
        if (vanished) continue;
        for (size_t i = 0; i < t.s_pow.size(); ++i)
            if (t.s_pow[i] != 0) val *= ipow(p.s[i], t.s_pow[i]);
        sum += val;
    }
    return sum;
}

bool PolarExpr::evaluable_at(const ConePoint& p) const {
    check_point(spec_, p);
    for (const Term& t : terms_)
        for (size_t a = 0; a < t.r_pow.size(); ++a) {
            if (p.r(static_cast<int>(a)) != 0.0) continue;
            const double e = radial_exponent(spec_.betas[a], t.r_pow[a]);
            if (e < 0.0 || (e == 0.0 && t.angular[a].k != 0)) return false;
        }
    return true;
}

double PolarExpr::homogeneity(double tol) const {
    if (terms_.empty())
        throw std::logic_error("zero expression has no homogeneity degree");
    double d = terms_.front().homogeneity(spec_);
    for (const Term& t : terms_)
        if (std::fabs(t.homogeneity(spec_) - d) > tol)
            throw std::logic_error("expression is not homogeneous: " + str());
    return d;
}

std::string PolarExpr::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(12);
    for (size_t n = 0; n < terms_.size(); ++n) {
        const Term& t = terms_[n];
        if (n > 0) os << (t.coeff < 0.0 ? " - " : " + ");
        else if (t.coeff < 0.0) os << "-";
        os << std::fabs(t.coeff);
        for (size_t a = 0; a < t.r_pow.size(); ++a) {
            const double e = radial_exponent(spec_.betas[a], t.r_pow[a]);
            if (e != 0.0) {
                os << " r" << a;
                if (e != 1.0) os << "^" << e;
            }
            if (t.angular[a].k != 0)
                os << " " << (t.angular[a].sine ? "sin(" : "cos(")
                   << t.angular[a].k << " t" << a << ")";
        }
        for (size_t i = 0; i < t.s_pow.size(); ++i) {
            if (t.s_pow[i] != 0) {
                os << " s" << i;
                if (t.s_pow[i] != 1) os << "^" << t.s_pow[i];
            }
        }
    }
    return os.str();
}

PolarExpr& PolarExpr::operator+=(const PolarExpr& o) {
    if (default_shape(spec_) && terms_.empty()) {
        *this = o;
        return *this;
    }
    if (!(spec_ == o.spec_))
        throw std::invalid_argument("cannot combine expressions on different spaces");
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return simplify();
}

PolarExpr& PolarExpr::operator-=(const PolarExpr& o) { return *this += -o; }

PolarExpr& PolarExpr::operator*=(double c) {
    if (c == 0.0) {
        terms_.clear();
        return *this;
    }
    for (Term& t : terms_) t.coeff *= c;
    return *this;
}

PolarExpr PolarExpr::operator-() const {
    PolarExpr out = *this;
    for (Term& t : out.terms_) t.coeff = -t.coeff;
    return out;
}

PolarExpr PolarExpr::operator*(const PolarExpr& o) const {
    if (!(spec_ == o.spec_))
        throw std::invalid_argument("cannot combine expressions on different spaces");
    PolarExpr out(spec_);
    const size_t n = spec_.betas.size();
    for (const Term& x : terms_) {
        for (const Term& y : o.terms_) {
            // Expand the angular products factor by factor; each factor can
            // split a term in two (sum and difference frequency).
            std::vector<Term> partial(1, blank_term(spec_, x.coeff * y.coeff));
            for (size_t i = 0; i < partial[0].s_pow.size(); ++i)
                partial[0].s_pow[i] = x.s_pow[i] + y.s_pow[i];
            for (size_t a = 0; a < n; ++a) {
                const RadialPow e = {x.r_pow[a].kappa + y.r_pow[a].kappa,
                                     x.r_pow[a].iota + y.r_pow[a].iota};
                const AngularFactor& A = x.angular[a];
                const AngularFactor& B = y.angular[a];
                // (frequency, sine?, multiplier) alternatives for this factor.
                std::vector<std::pair<AngularFactor, double>> alts;
                const int ks = A.k + B.k;
                const int kd = A.k - B.k;
                if (A.k == 0 && B.k == 0) {
                    alts.push_back({{0, false}, 1.0});
                } else if (!A.sine && !B.sine) {
                    alts.push_back({{std::abs(kd), false}, 0.5});
                    alts.push_back({{ks, false}, 0.5});
                } else if (A.sine && B.sine) {
                    alts.push_back({{std::abs(kd), false}, 0.5});
                    alts.push_back({{ks, false}, -0.5});
                } else {
                    // sin(A) cos(B) = (sin(A+B) + sin(A-B)) / 2, with the
                    // roles swapped when the sine sits in the second slot.
                    const int d = A.sine ? kd : -kd;
                    alts.push_back({{ks, true}, 0.5});
                    if (d > 0)
                        alts.push_back({{d, true}, 0.5});
                    else if (d < 0)
                        alts.push_back({{-d, true}, -0.5});
                }
                std::vector<Term> next;
                next.reserve(partial.size() * alts.size());
                for (const Term& base : partial) {
                    for (const auto& [ang, mult] : alts) {
                        Term t = base;
                        t.coeff *= mult;
                        t.r_pow[a] = e;
                        t.angular[a] = ang;
                        next.push_back(std::move(t));
                    }
                }
                partial = std::move(next);
            }
            for (Term& t : partial) out.terms_.push_back(std::move(t));
        }
    }
    return out.simplify();
}

PolarExpr PolarExpr::pow(int n) const {
    if (n < 0) throw std::invalid_argument("negative power");
    PolarExpr out = constant(spec_, 1.0);
    for (int i = 0; i < n; ++i) out = out * *this;
    return out;
}

void PolarExpr::push_term(Term t) {
    check_shape(spec_, t);
    if (t.coeff != 0.0) terms_.push_back(std::move(t));
}

// ---------------------------------------------------------------------------
// Derivatives
// ---------------------------------------------------------------------------

PolarExpr d_s(const PolarExpr& u, int i) {
    if (i < 0 || i >= u.spec().euclidean_dim)
        throw std::invalid_argument("Euclidean index out of range");
    PolarExpr out(u.spec());
    for (Term t : u.terms()) {
        const int p = t.s_pow[i];
        if (p == 0) continue;
        t.coeff *= p;
        t.s_pow[i] = p - 1;
        out.push_term(std::move(t));
    }
    return out.simplify();
}

PolarExpr d_r(const PolarExpr& u, int a) {
    if (a < 0 || a >= u.spec().cone_count())
        throw std::invalid_argument("cone factor index out of range");
    const double beta = u.spec().betas[a];
    PolarExpr out(u.spec());
    for (Term t : u.terms()) {
        const double e = radial_exponent(beta, t.r_pow[a]);
        if (e == 0.0) continue;
        t.coeff *= e;
        t.r_pow[a].iota -= 1;
        out.push_term(std::move(t));
    }
    return out.simplify();
}

PolarExpr d_theta_over_r(const PolarExpr& u, int a) {
    if (a < 0 || a >= u.spec().cone_count())
        throw std::invalid_argument("cone factor index out of range");
    PolarExpr out(u.spec());
    for (Term t : u.terms()) {
        const int k = t.angular[a].k;
        if (k == 0) continue;
        t.coeff *= t.angular[a].sine ? k : -k;
        t.angular[a].sine = !t.angular[a].sine;
        t.r_pow[a].iota -= 1;
        out.push_term(std::move(t));
    }
    return out.simplify();
}

PolarExpr conical_laplacian(const PolarExpr& u, int a) {
    if (a < 0 || a >= u.spec().cone_count())
        throw std::invalid_argument("cone factor index out of range");
    const double beta = u.spec().betas[a];
    PolarExpr out(u.spec());
    for (Term t : u.terms()) {
        const double e = radial_exponent(beta, t.r_pow[a]);
        const double kb = t.angular[a].k / beta;
        // (d_rr + r^{-1} d_r) r^e = e^2 r^{e-2}; the angular part contributes
        // -(k/beta)^2 r^{e-2}.  Exact zero for the factor's own harmonics.
        const double factor = e * e - kb * kb;
        if (factor == 0.0) continue;
        t.coeff *= factor;
        t.r_pow[a].iota -= 2;
        out.push_term(std::move(t));
    }
    return out.simplify();
}

PolarExpr laplacian(const PolarExpr& u) {
    PolarExpr out(u.spec());
    for (int a = 0; a < u.spec().cone_count(); ++a)
        out += conical_laplacian(u, a);
    for (int i = 0; i < u.spec().euclidean_dim; ++i) out += d_s(d_s(u, i), i);
    return out.simplify();
}

// ---------------------------------------------------------------------------
// Second-order operators
// ---------------------------------------------------------------------------

std::string DerivativeOp::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::ss: os << "d2/ds" << i << " ds" << j; break;
        case Kind::rs: os << "d2/dr" << a << " ds" << i; break;
        case Kind::ts: os << "(1/r" << a << ") d2/dt" << a << " ds" << i; break;
        case Kind::rr: os << "d2/dr" << a << " dr" << b; break;
        case Kind::tt:
            os << "(1/(r" << a << " r" << b << ")) d2/dt" << a << " dt" << b;
            break;
        case Kind::rt: os << "(1/r" << b << ") d2/dr" << a << " dt" << b; break;
        case Kind::factor_laplacian: os << "lap[r" << a << "]"; break;
        case Kind::rr_pure: os << "d2/dr" << a << "^2"; break;
        case Kind::tt_pure: os << "(1/r" << a << "^2) d2/dt" << a << "^2"; break;
        case Kind::rt_pure: os << "(1/r" << a << ") d2/dr" << a << " dt" << a; break;
    }
    return os.str();
}

std::vector<DerivativeOp> second_order_ops(const ConeSpec& spec) {
    std::vector<DerivativeOp> ops;
    const int n = spec.cone_count();
    const int q = spec.euclidean_dim;
    using K = DerivativeOp::Kind;
    for (int i = 0; i < q; ++i)
        for (int j = i; j < q; ++j)
            ops.push_back({K::ss, -1, -1, i, j});
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < q; ++i) {
            ops.push_back({K::rs, a, -1, i, -1});
            ops.push_back({K::ts, a, -1, i, -1});
        }
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            ops.push_back({K::rr, a, b, -1, -1});
            ops.push_back({K::tt, a, b, -1, -1});
        }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b) ops.push_back({K::rt, a, b, -1, -1});
    for (int a = 0; a < n; ++a) ops.push_back({K::factor_laplacian, a, -1, -1, -1});
    for (int a = 0; a < n; ++a) {
        if (spec.betas[a] < 0.5) {
            ops.push_back({K::rr_pure, a, -1, -1, -1});
            ops.push_back({K::tt_pure, a, -1, -1, -1});
            ops.push_back({K::rt_pure, a, -1, -1, -1});
        }
    }
    return ops;
}

PolarExpr apply(const DerivativeOp& op, const PolarExpr& u) {
    using K = DerivativeOp::Kind;
    switch (op.kind) {
        case K::ss: return d_s(d_s(u, op.i), op.j);
        case K::rs: return d_r(d_s(u, op.i), op.a);
        case K::ts: return d_theta_over_r(d_s(u, op.i), op.a);
        case K::rr: return d_r(d_r(u, op.b), op.a);
        case K::tt: return d_theta_over_r(d_theta_over_r(u, op.b), op.a);
        case K::rt: return d_r(d_theta_over_r(u, op.b), op.a);
        case K::factor_laplacian: return conical_laplacian(u, op.a);
        case K::rr_pure: {
            const double beta = u.spec().betas[op.a];
            PolarExpr out(u.spec());
            for (Term t : u.terms()) {
                const double e = radial_exponent(beta, t.r_pow[op.a]);
                const double c = e * (e - 1.0);
                if (c == 0.0) continue;
                t.coeff *= c;
                t.r_pow[op.a].iota -= 2;
                out.push_term(std::move(t));
            }
            return out.simplify();
        }
        case K::tt_pure: {
            PolarExpr out(u.spec());
            for (Term t : u.terms()) {
                const int k = t.angular[op.a].k;
                if (k == 0) continue;
                t.coeff *= -double(k) * double(k);
                t.r_pow[op.a].iota -= 2;
                out.push_term(std::move(t));
            }
            return out.simplify();
        }
        case K::rt_pure: {
            const double beta = u.spec().betas[op.a];
            PolarExpr out(u.spec());
            for (Term t : u.terms()) {
                const double e = radial_exponent(beta, t.r_pow[op.a]);
                const int k = t.angular[op.a].k;
                if (e == 0.0 || k == 0) continue;
                t.coeff *= t.angular[op.a].sine ? e * k : -e * k;
                t.angular[op.a].sine = !t.angular[op.a].sine;
                t.r_pow[op.a].iota -= 2;
                out.push_term(std::move(t));
            }
            return out.simplify();
        }
    }
    throw std::logic_error("unknown derivative kind");
}

}  // namespace cones
