// conetool: reproducible numerical experiments on products of two-dimensional
// cones with a Euclidean block.
//
// Subcommands:
//   roots                 enumerate homogeneity degrees of harmonics
//   basis                 emit the subquadratic harmonic space
//   scales                classify dyadic scales around a point
//   solve                 Dirichlet solve on an apex ball (spectral or fd)
//   campanato             dyadic Campanato scan of a field
//   verify-monotonicity   ||u||_{B_rho} <= rho^d ||u||_{B_1} for random spans
//   verify-schauder       pointwise second derivatives by scale iteration
//
// Every run writes its artifacts into one directory together with
// schema.json (artifact formats and CSV columns) and manifest.json (tool and
// dependency versions, wall-clock timings, and the full merged configuration
// with its hash).  A run is replayable from the manifest alone: passing it
// as --config reproduces every non-manifest artifact byte for byte, because
// all randomness is derived from the configured seed.
//
// Configuration precedence: built-in defaults, then the --config file (or
// the "config" block of a manifest), then explicit flags.  File-valued flags
// (--spec, --f, --g, --point, --points) are inlined into the configuration,
// so the manifest has no external references.
//
// Exit codes: 0 success; 2 usage or configuration error; 3 scope error (the
// requested alpha is not below the usable Hoelder exponent mu); 4 numerical
// failure.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "cones/analysis.hpp"
#include "cones/geometry.hpp"
#include "cones/io.hpp"
#include "cones/modes.hpp"
#include "cones/quadrature.hpp"
#include "cones/schauder.hpp"
#include "cones/solver_fd.hpp"
#include "cones/solver_spectral.hpp"
#include "cones/spectrum.hpp"

namespace {

using namespace cones;

// Requests outside the range of the estimate (alpha >= mu) exit with a
// dedicated code so callers can tell scope from usage.
struct ScopeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double lap() {
        auto t1 = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(t1 - t0).count();
        t0 = t1;
        return s;
    }
};

// Overlay wins; objects merge key by key, everything else is replaced.
void merge_into(Json& base, const Json& overlay) {
    if (base.is_object() && overlay.is_object()) {
        for (auto it = overlay.begin(); it != overlay.end(); ++it) {
            if (base.contains(it.key()))
                merge_into(base[it.key()], it.value());
            else
                base[it.key()] = it.value();
        }
    } else {
        base = overlay;
    }
}

// ---------------------------------------------------------------------------
// Config access with field-path errors
// ---------------------------------------------------------------------------

const Json& need(const Json& cfg, const char* key, const char* flag) {
    if (!cfg.contains(key))
        throw std::invalid_argument(std::string("config.") + key +
                                    ": missing (supply " + flag +
                                    " or a config entry)");
    return cfg[key];
}

double num(const Json& cfg, const char* key) {
    if (!cfg.contains(key) || !cfg[key].is_number())
        throw std::invalid_argument(std::string("config.") + key +
                                    ": expected a number");
    return cfg[key].get<double>();
}

int integer(const Json& cfg, const char* key) {
    if (!cfg.contains(key) || !cfg[key].is_number_integer())
        throw std::invalid_argument(std::string("config.") + key +
                                    ": expected an integer");
    return cfg[key].get<int>();
}

std::uint64_t seed_of(const Json& cfg) {
    if (!cfg.contains("seed") || !cfg["seed"].is_number_integer())
        throw std::invalid_argument("config.seed: expected an integer");
    return cfg["seed"].get<std::uint64_t>();
}

bool flag_of(const Json& cfg, const char* key) {
    return cfg.contains(key) && cfg[key].is_boolean() && cfg[key].get<bool>();
}

std::string text_of(const Json& cfg, const char* key) {
    if (!cfg.contains(key) || !cfg[key].is_string())
        throw std::invalid_argument(std::string("config.") + key +
                                    ": expected a string");
    return cfg[key].get<std::string>();
}

// ---------------------------------------------------------------------------
// Artifact bookkeeping
// ---------------------------------------------------------------------------

struct ColumnDoc {
    const char* name;
    const char* doc;
};

const std::vector<ColumnDoc> kRootsColumns = {
    {"degree", "homogeneity degree of the harmonic family"},
    {"multiplicity", "independent harmonics at this degree"},
    {"recipe", "k=[angular frequencies] p=Euclidean degree j=[join exponents];"
               " merged families joined by ' | '"},
};

const std::vector<ColumnDoc> kScalesColumns = {
    {"k", "dyadic scale index; the ball has radius lambda^k"},
    {"status", "good or bad"},
    {"model_betas", "cone angles of the good-scale model, ';'-separated"
                    " (empty for bad scales and purely Euclidean models)"},
    {"center_distance", "distance of the rescaled center to the model's"
                        " singular locus (empty for bad scales)"},
};

const std::vector<ColumnDoc> kBoundColumns = {
    {"scale", "ball radius rho"},
    {"norm", "measured scaled L2 norm at this scale"},
    {"bound", "the bound the norm is compared against"},
    {"pass", "1 when norm stays within the bound, 0 otherwise"},
};

const std::vector<ColumnDoc> kTraceColumns = {
    {"point", "0-based index into the input point list"},
    {"k", "scale index; the ball has radius lambda^k"},
    {"rho", "ball radius lambda^k"},
    {"status", "good or bad"},
    {"norm", "scaled L2 norm of the remainder before this scale's correction"},
    {"norm_stderr", "quadrature standard error of norm"},
};

const std::vector<ColumnDoc> kTauColumns = {
    {"point", "0-based index into the input point list"},
    {"k", "scale index (good scales only)"},
    {"op", "second-order operator"},
    {"tau", "this scale's contribution to the derivative"},
    {"tau_stderr", "propagated projection standard error"},
};

std::string columns_footer(const std::string& file,
                           const std::vector<ColumnDoc>& cols) {
    std::string out = file + " columns:\n";
    for (const auto& c : cols)
        out += "  " + std::string(c.name) + ": " + c.doc + "\n";
    return out;
}

struct Run {
    std::string command;
    std::string out_dir;
    Json config;
    std::vector<std::pair<std::string, double>> timings;
    Json artifacts = Json::object();

    std::string path(const std::string& name) const {
        return out_dir + "/" + name;
    }

    void write_csv(const std::string& name, const CsvWriter& csv,
                   const std::vector<ColumnDoc>& cols, const char* doc) {
        write_text_file(path(name), csv.text());
        Json meta;
        meta["format"] = "csv";
        meta["doc"] = doc;
        meta["columns"] = Json::array();
        for (const auto& c : cols) {
            Json cj;
            cj["name"] = c.name;
            cj["doc"] = c.doc;
            meta["columns"].push_back(std::move(cj));
        }
        artifacts[name] = std::move(meta);
    }

    void write_report(const std::string& name, const Json& j, const char* doc) {
        write_json_file(path(name), j);
        Json meta;
        meta["format"] = "json";
        meta["doc"] = doc;
        artifacts[name] = std::move(meta);
    }

    void write_svg(const std::string& name, const std::string& svg,
                   const char* doc) {
        write_text_file(path(name), svg);
        Json meta;
        meta["format"] = "svg";
        meta["doc"] = doc;
        artifacts[name] = std::move(meta);
    }

    void finish() {
        Json schema;
        schema["command"] = command;
        schema["artifacts"] = artifacts;
        write_json_file(path("schema.json"), schema);
        Json manifest = make_manifest(command, config, timings);
        Json names = Json::array();
        for (const auto& item : artifacts.items()) names.push_back(item.key());
        names.push_back("schema.json");
        names.push_back("manifest.json");
        manifest["artifacts"] = std::move(names);
        write_json_file(path("manifest.json"), manifest);
    }
};

Json fit_json(const DecayFit& fit) {
    Json j;
    j["slope"] = fit.slope;
    j["slope_stderr"] = fit.slope_stderr;
    j["intercept"] = fit.intercept;
    j["points_used"] = fit.points_used;
    return j;
}

// ---------------------------------------------------------------------------
// Static SVG decay plot (log-log), dependency free
// ---------------------------------------------------------------------------

std::string svg_decay_plot(const std::string& title,
                           const std::vector<double>& rho,
                           const std::vector<double>& value,
                           const DecayFit& fit) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < rho.size() && i < value.size(); ++i)
        if (rho[i] > 0.0 && value[i] > 0.0) {
            xs.push_back(std::log10(rho[i]));
            ys.push_back(std::log10(value[i]));
        }
    if (xs.size() < 2) return {};

    auto span = [](const std::vector<double>& v) {
        double lo = v[0], hi = v[0];
        for (double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        double pad = 0.06 * (hi - lo);
        return std::pair<double, double>{lo - pad, hi + pad};
    };
    auto [x0, x1] = span(xs);
    auto [y0, y1] = span(ys);

    const double W = 520, H = 360, L = 64, R = 16, T = 30, B = 46;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return std::string(buf);
    };
    auto coord = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" "
         "height=\"360\" viewBox=\"0 0 520 360\">\n";
    s += "<rect width=\"520\" height=\"360\" fill=\"white\"/>\n";
    s += "<text x=\"" + coord(L) + "\" y=\"20\" font-family=\"monospace\" "
         "font-size=\"13\">" + title + "</text>\n";
    s += "<rect x=\"" + coord(L) + "\" y=\"" + coord(T) + "\" width=\"" +
         coord(W - L - R) + "\" height=\"" + coord(H - T - B) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        double fx = x0 + (x1 - x0) * t / 4.0;
        double fy = y0 + (y1 - y0) * t / 4.0;
        s += "<line x1=\"" + coord(px(fx)) + "\" y1=\"" + coord(H - B) +
             "\" x2=\"" + coord(px(fx)) + "\" y2=\"" + coord(H - B + 5) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + coord(px(fx)) + "\" y=\"" + coord(H - B + 18) +
             "\" font-family=\"monospace\" font-size=\"10\" "
             "text-anchor=\"middle\">" + fmt(fx) + "</text>\n";
        s += "<line x1=\"" + coord(L - 5) + "\" y1=\"" + coord(py(fy)) +
             "\" x2=\"" + coord(L) + "\" y2=\"" + coord(py(fy)) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + coord(L - 8) + "\" y=\"" + coord(py(fy) + 3) +
             "\" font-family=\"monospace\" font-size=\"10\" "
             "text-anchor=\"end\">" + fmt(fy) + "</text>\n";
    }
    s += "<text x=\"" + coord((L + W - R) / 2) + "\" y=\"" + coord(H - 8) +
         "\" font-family=\"monospace\" font-size=\"11\" "
         "text-anchor=\"middle\">log10 scale</text>\n";
    s += "<text x=\"14\" y=\"" + coord((T + H - B) / 2) +
         "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 14 " + coord((T + H - B) / 2) + ")\">"
         "log10 norm</text>\n";

    if (fit.points_used >= 2) {
        const double ln10 = std::log(10.0);
        auto fy = [&](double lx) {
            return (fit.intercept + fit.slope * lx * ln10) / ln10;
        };
        s += "<line x1=\"" + coord(px(x0)) + "\" y1=\"" + coord(py(fy(x0))) +
             "\" x2=\"" + coord(px(x1)) + "\" y2=\"" + coord(py(fy(x1))) +
             "\" stroke=\"#888\" stroke-dasharray=\"5,4\"/>\n";
        s += "<text x=\"" + coord(W - R - 4) + "\" y=\"" + coord(T + 14) +
             "\" font-family=\"monospace\" font-size=\"11\" "
             "text-anchor=\"end\">slope " + fmt(fit.slope) + "</text>\n";
    }

    std::string line = "<polyline fill=\"none\" stroke=\"#1155cc\" points=\"";
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) line += ' ';
        line += coord(px(xs[i])) + "," + coord(py(ys[i]));
    }
    s += line + "\"/>\n";
    for (size_t i = 0; i < xs.size(); ++i)
        s += "<circle cx=\"" + coord(px(xs[i])) + "\" cy=\"" +
             coord(py(ys[i])) + "\" r=\"3\" fill=\"#1155cc\"/>\n";
    s += "</svg>\n";
    return s;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

ConeSpec spec_of(const Json& cfg) {
    return spec_from_json(need(cfg, "spec", "--spec"), "spec");
}

void run_roots(Run& run) {
    Stopwatch sw;
    const ConeSpec spec = spec_of(run.config);
    const double dmax = num(run.config, "dmax");
    const double merge_tol = num(run.config, "merge_tol");
    auto rates = enumerate_growth_rates(spec, dmax, merge_tol);
    run.timings.emplace_back("enumerate", sw.lap());

    CsvWriter csv({"degree", "multiplicity", "recipe"});
    for (const auto& rate : rates) {
        std::string recipe;
        for (size_t i = 0; i < rate.recipes.size(); ++i) {
            if (i) recipe += " | ";
            recipe += rate.recipes[i].str();
        }
        csv.row({csv_number(rate.degree), std::to_string(rate.multiplicity),
                 recipe});
    }
    run.write_csv("roots.csv", csv, kRootsColumns,
                  "one row per homogeneity degree of harmonics up to dmax");
    run.timings.emplace_back("write", sw.lap());
}

void run_basis(Run& run) {
    Stopwatch sw;
    const ConeSpec spec = spec_of(run.config);
    auto elements = subquadratic_space(spec);
    run.timings.emplace_back("build", sw.lap());

    Json out;
    out["spec"] = spec_to_json(spec);
    out["count"] = static_cast<int>(elements.size());
    out["elements"] = Json::array();
    for (size_t i = 0; i < elements.size(); ++i) {
        Json e;
        e["index"] = static_cast<int>(i);
        e["description"] = elements[i].str();
        e["degree"] = elements[i].homogeneity();
        e["terms"] = expr_to_json(elements[i])["terms"];
        out["elements"].push_back(std::move(e));
    }
    run.write_report("basis.json", out,
                     "generating list of the harmonics of degree <= 2");
    run.timings.emplace_back("write", sw.lap());
}

void run_scales(Run& run) {
    Stopwatch sw;
    const ConeSpec spec = spec_of(run.config);
    const ConePoint x =
        point_from_json(need(run.config, "point", "--point"), "point");
    check_point(spec, x);
    ScaleParams params;
    params.lambda = num(run.config, "lambda");
    params.eps0 = num(run.config, "eps0");
    params.k_min = integer(run.config, "k_min");
    params.k_max = integer(run.config, "k_max");
    auto rows = classify_scales(spec, x, params);
    run.timings.emplace_back("classify", sw.lap());

    CsvWriter csv({"k", "status", "model_betas", "center_distance"});
    int bad = 0;
    for (const auto& row : rows) {
        std::string betas;
        for (size_t a = 0; a < row.model.betas.size(); ++a) {
            if (a) betas += ';';
            betas += csv_number(row.model.betas[a]);
        }
        if (!row.good) ++bad;
        csv.row({std::to_string(row.k), row.good ? "good" : "bad",
                 row.good ? betas : std::string(),
                 row.good ? csv_number(row.center_distance) : std::string()});
    }
    run.write_csv("scales.csv", csv, kScalesColumns,
                  "dyadic scale classification around the point");

    Json summary;
    summary["bad_count"] = bad;
    summary["bad_scale_bound"] = bad_scale_bound(spec, params);
    summary["bad_scale_length"] = bad_scale_length(spec, params);
    run.write_report("summary.json", summary,
                     "bad-scale count against its a priori bound");
    run.timings.emplace_back("write", sw.lap());
}

void run_solve(Run& run) {
    Stopwatch sw;
    const ConeSpec spec = spec_of(run.config);
    const PolarExpr f =
        expr_from_json(spec, need(run.config, "f", "--f"), "f");
    const std::string method = text_of(run.config, "method");
    const double radius = num(run.config, "radius");

    Json out;
    out["method"] = method;
    out["spec"] = spec_to_json(spec);
    out["f"] = expr_to_json(f);
    if (method == "spectral") {
        PolarExpr g(spec);
        if (run.config.contains("g"))
            g = expr_from_json(spec, run.config["g"], "g");
        auto sol = solve_dirichlet_apex(spec, f, g, radius);
        run.timings.emplace_back("solve", sw.lap());
        out["radius"] = radius;
        out["g"] = expr_to_json(g);
        out["u"] = expr_to_json(sol.u);
        out["residual"] = sol.residual;
        out["boundary_residual"] = sol.boundary_residual;
    } else if (method == "fd") {
        if (spec.cone_count() != 1 || spec.euclidean_dim != 1)
            throw std::invalid_argument(
                "config.method: \"fd\" needs exactly one cone factor and one "
                "Euclidean coordinate");
        FdGridConfig grid;
        grid.nr = integer(run.config, "nr");
        grid.ns = integer(run.config, "ns");
        grid.r_max = num(run.config, "r_max");
        grid.s_half = num(run.config, "s_half");
        PolarExpr reference(spec);
        if (run.config.contains("reference")) {
            reference = expr_from_json(spec, run.config["reference"],
                                       "reference");
        } else {
            // Any function with the right Laplacian works as Dirichlet data;
            // the closed-form solve provides one on the whole grid rectangle.
            reference = solve_dirichlet_apex(spec, f, PolarExpr(spec), radius).u;
        }
        auto sol = solve_fd_oracle(spec, f, reference, grid);
        run.timings.emplace_back("solve", sw.lap());
        Json gj;
        gj["nr"] = grid.nr;
        gj["ns"] = grid.ns;
        gj["r_max"] = grid.r_max;
        gj["s_half"] = grid.s_half;
        out["grid"] = std::move(gj);
        out["reference"] = expr_to_json(reference);
        out["residual"] = sol.residual;
        out["modes"] = Json::array();
        for (const auto& mode : sol.modes) {
            Json mj;
            mj["k"] = mode.k;
            mj["sine"] = mode.sine;
            Json gridj = Json::array();
            for (int i = 0; i < mode.grid.rows(); ++i) {
                Json rowj = Json::array();
                for (int j = 0; j < mode.grid.cols(); ++j)
                    rowj.push_back(mode.grid(i, j));
                gridj.push_back(std::move(rowj));
            }
            mj["grid"] = std::move(gridj);
            out["modes"].push_back(std::move(mj));
        }
    } else {
        throw std::invalid_argument(
            "config.method: expected \"spectral\" or \"fd\"");
    }
    run.write_report("solution.json", out, "Dirichlet solution on the apex ball");
    run.timings.emplace_back("write", sw.lap());
}

void run_campanato(Run& run) {
    Stopwatch sw;
    const ConeSpec spec = spec_of(run.config);
    const PolarExpr f =
        expr_from_json(spec, need(run.config, "f", "--f"), "f");
    const double alpha = num(run.config, "alpha");
    if (!(alpha > 0.0))
        throw std::invalid_argument("config.alpha: must be > 0");
    std::vector<ConePoint> centers;
    if (run.config.contains("points"))
        centers = points_from_json(run.config["points"], "points");
    else
        centers.push_back(apex_point(spec));
    for (const auto& c : centers) check_point(spec, c);
    const int depth = integer(run.config, "depth");

    QuadConfig quad;
    quad.log2_points = integer(run.config, "log2_points");
    quad.replicates = integer(run.config, "replicates");
    quad.seed = mix_seed(seed_of(run.config), 0xca3);
    auto report = campanato_estimate(spec, as_integrand(f), centers, alpha,
                                     dyadic_scales(depth), quad);
    run.timings.emplace_back("scan", sw.lap());

    // With the default constant (the measured maximum) every row passes by
    // construction; supply a fixed "constant" to test a candidate bound.
    const bool fixed = run.config.contains("constant") &&
                       run.config["constant"].is_number();
    const double constant =
        fixed ? run.config["constant"].get<double>() : report.constant;

    CsvWriter csv({"scale", "norm", "bound", "pass"});
    std::vector<double> rho, norm;
    for (const auto& row : report.rows) {
        const double bound = constant * std::pow(row.rho, alpha);
        csv.row({csv_number(row.rho), csv_number(row.norm), csv_number(bound),
                 row.norm <= bound * (1.0 + 1e-9) ? "1" : "0"});
        rho.push_back(row.rho);
        norm.push_back(row.norm);
    }
    run.write_csv("campanato.csv", csv, kBoundColumns,
                  "per-center, per-scale oscillation against constant*rho^alpha");

    Json summary;
    summary["alpha"] = alpha;
    summary["constant"] = constant;
    summary["measured_constant"] = report.constant;
    summary["centers"] = static_cast<int>(centers.size());
    summary["rows"] = static_cast<int>(report.rows.size());
    summary["fit"] = fit_json(report.fit);
    run.write_report("summary.json", summary,
                     "Campanato constant and pooled decay fit");

    if (flag_of(run.config, "plot")) {
        auto svg = svg_decay_plot("campanato decay, alpha " + csv_number(alpha),
                                  rho, norm, report.fit);
        if (!svg.empty())
            run.write_svg("campanato_decay.svg", svg,
                          "log-log oscillation decay with fitted slope");
    }
    run.timings.emplace_back("write", sw.lap());
}

void run_verify_monotonicity(Run& run) {
    Stopwatch sw;
    const ConeSpec spec = spec_of(run.config);
    spec.validate_primary();
    const double dmax = num(run.config, "dmax");

    // Random span of harmonics of degree > 2: the class the decay step of the
    // iteration applies to.
    std::mt19937_64 rng(mix_seed(seed_of(run.config), 0x3007));
    auto unit = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    PolarExpr u(spec);
    int mode_count = 0;
    for (const auto& rate : enumerate_growth_rates(spec, dmax)) {
        if (rate.degree <= 2.0 + 1e-9) continue;
        for (const auto& recipe : rate.recipes)
            for (const auto& mode : build_mode_basis(spec, recipe)) {
                const double sign = unit() < 0.5 ? -1.0 : 1.0;
                u += mode * (sign * (0.5 + unit()));
                ++mode_count;
            }
    }
    if (mode_count == 0)
        throw std::invalid_argument(
            "config.dmax: no harmonic degrees in (2, dmax]; increase it");
    u.simplify();
    const double degree = next_rate_above_quadratic(spec);

    QuadConfig quad;
    quad.log2_points = integer(run.config, "log2_points");
    quad.replicates = integer(run.config, "replicates");
    quad.seed = mix_seed(seed_of(run.config), 0x3008);
    auto report = check_monotonicity(spec, as_integrand(u), degree,
                                     default_monotonicity_scales(), quad);
    run.timings.emplace_back("check", sw.lap());

    CsvWriter csv({"scale", "norm", "bound", "pass"});
    for (const auto& row : report.rows)
        csv.row({csv_number(row.rho), csv_number(row.lhs),
                 csv_number(row.bound),
                 row.margin >= -5.0 * row.stderr_ ? "1" : "0"});
    run.write_csv("monotonicity.csv", csv, kBoundColumns,
                  "||u||_{B_rho} against rho^degree ||u||_{B_1}");

    Json summary;
    summary["dmax"] = dmax;
    summary["degree"] = degree;
    summary["mode_count"] = mode_count;
    summary["holds"] = report.holds;
    summary["strict"] = report.strict;
    summary["max_equality_error"] = report.max_equality_error;
    summary["u"] = expr_to_json(u);
    run.write_report("summary.json", summary,
                     "monotonicity verdict for the random harmonic span");
    run.timings.emplace_back("write", sw.lap());
}

void run_verify_schauder(Run& run) {
    Stopwatch sw;
    const ConeSpec spec = spec_of(run.config);
    spec.validate_primary();
    const PolarExpr f =
        expr_from_json(spec, need(run.config, "f", "--f"), "f");
    const double alpha = num(run.config, "alpha");
    const double mu = max_holder_exponent(spec);
    if (!(alpha > 0.0))
        throw std::invalid_argument("config.alpha: must be > 0");
    if (!(alpha < mu))
        throw ScopeError("alpha " + csv_number(alpha) +
                         " is at or above the usable Hoelder exponent; mu = " +
                         csv_number(mu) + " for this spec, require alpha < mu");
    const std::vector<ConePoint> points =
        points_from_json(need(run.config, "points", "--points"), "points");
    for (const auto& p : points) check_point(spec, p);

    SchauderParams params;
    params.iteration.scales.lambda = num(run.config, "lambda");
    params.iteration.scales.eps0 = num(run.config, "eps0");
    params.iteration.k_last = integer(run.config, "k_last");
    params.iteration.quad.log2_points = integer(run.config, "log2_points");
    params.iteration.quad.replicates = integer(run.config, "replicates");
    params.delta = num(run.config, "delta");
    params.domain_radius = num(run.config, "domain_radius");
    params.derivative_scales = dyadic_scales(integer(run.config, "depth"));

    const std::uint64_t seed = seed_of(run.config);
    auto run_one = [&](size_t idx) {
        SchauderParams p = params;
        // Seeds depend on the point index only, so reports are identical
        // whatever the thread count.
        p.iteration.quad.seed = mix_seed(seed, 0xc11d00 + idx);
        return verify_schauder(spec, f, {points[idx]}, alpha, p).at(0);
    };

    std::vector<HoelderReport> reports(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    const int threads =
        std::min<int>(std::max(1, integer(run.config, "threads")),
                      static_cast<int>(points.size()));
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < points.size();
             i = next.fetch_add(1)) {
            try {
                reports[i] = run_one(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads - 1; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    run.timings.emplace_back("iterate", sw.lap());

    Json out = Json::array();
    CsvWriter trace(
        {"point", "k", "rho", "status", "norm", "norm_stderr"});
    CsvWriter tau({"point", "k", "op", "tau", "tau_stderr"});
    double ratio_min = 0.0, ratio_max = 0.0, tau_abs_max = 0.0;
    for (size_t i = 0; i < reports.size(); ++i) {
        const HoelderReport& rep = reports[i];
        Json j;
        j["point"] = point_to_json(rep.x);
        j["alpha"] = rep.alpha;
        j["f_value"] = rep.f_value;
        j["f_holder"] = rep.f_holder;
        j["u_l2"] = rep.u_l2;
        j["normalization"] = rep.normalization;
        j["ops"] = Json::array();
        for (const auto& op : rep.ops) j["ops"].push_back(op.str());
        j["tau"] = rep.tau;
        j["tau_stderr"] = rep.tau_stderr;
        j["campanato"] = rep.campanato;
        j["derivative_fit"] = fit_json(rep.derivative_fit);
        j["ratio"] = rep.ratio;
        j["norm_fit"] = fit_json(rep.trace.norm_fit);
        j["decay_constant"] = rep.trace.decay_constant;
        out.push_back(std::move(j));

        const std::string pi = std::to_string(i);
        std::vector<double> rho, norm;
        for (const auto& step : rep.trace.steps) {
            trace.row({pi, std::to_string(step.k), csv_number(step.rho),
                       step.good ? "good" : "bad", csv_number(step.norm),
                       csv_number(step.norm_stderr)});
            rho.push_back(step.rho);
            norm.push_back(step.norm);
            if (!step.good) continue;
            for (size_t o = 0; o < rep.ops.size(); ++o)
                tau.row({pi, std::to_string(step.k), rep.ops[o].str(),
                         csv_number(step.tau[o]),
                         csv_number(step.tau_stderr[o])});
        }
        if (flag_of(run.config, "plot")) {
            auto svg = svg_decay_plot("iteration decay, point " + pi,
                                      rho, norm, rep.trace.norm_fit);
            if (!svg.empty())
                run.write_svg("decay_point" + pi + ".svg", svg,
                              "log-log remainder decay for this point");
        }
        ratio_min = i == 0 ? rep.ratio : std::min(ratio_min, rep.ratio);
        ratio_max = i == 0 ? rep.ratio : std::max(ratio_max, rep.ratio);
        for (double t : rep.tau) tau_abs_max = std::max(tau_abs_max, std::abs(t));
    }
    run.write_report("reports.json", out,
                     "per-point derivative reports of the scale iteration");
    run.write_csv("trace.csv", trace, kTraceColumns,
                  "per-scale remainder norms of every point's iteration");
    run.write_csv("tau.csv", tau, kTauColumns,
                  "per-scale derivative contributions at good scales");

    Json summary;
    summary["alpha"] = alpha;
    summary["mu"] = mu;
    summary["points"] = static_cast<int>(points.size());
    summary["ratio_min"] = ratio_min;
    summary["ratio_max"] = ratio_max;
    summary["tau_abs_max"] = tau_abs_max;
    run.write_report("summary.json", summary,
                     "spread of the normalized derivative ratios");
    run.timings.emplace_back("write", sw.lap());
}

}  // namespace

// ---------------------------------------------------------------------------
// Flag wiring
// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{
        "conetool: numerical experiments on products of two-dimensional "
        "cones.\nEvery run writes artifacts plus schema.json and "
        "manifest.json into --out;\nrerunning with --config manifest.json "
        "reproduces the artifacts byte for byte."};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    struct Common {
        std::string spec_path, config_path, out_dir;
        std::uint64_t seed = 0;
        int threads = 1;
    };
    // One storage block per subcommand (flags must outlive parsing).
    struct Flags {
        Common common;
        std::string f_path, g_path, point_path, points_path, method = "spectral";
        double dmax = 4.0, merge_tol = 1e-9, lambda = 0.5, eps0 = 0.05;
        double alpha = 0.0, radius = 1.0, r_max = 1.0, s_half = 1.0;
        double delta = 0.1, domain_radius = 2.0, constant = 0.0;
        int k_min = -40, k_max = 60, k_last = 10, depth = 6;
        int log2_points = 12, replicates = 8, nr = 96, ns = 192;
        bool plot = false;
    };
    std::vector<Flags> storage(7);

    auto add_common = [](CLI::App* sub, Common& c) {
        sub->add_option("--spec", c.spec_path,
                        "cone specification JSON: {\"betas\": [...], "
                        "\"euclidean_dim\": q}")
            ->check(CLI::ExistingFile);
        sub->add_option("--config", c.config_path,
                        "configuration JSON (or a previous manifest.json); "
                        "explicit flags override its entries")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", c.out_dir,
                        "output directory (default: $CONETOOL_OUT, else .)");
        sub->add_option("--seed", c.seed,
                        "base seed of every randomized quadrature");
        sub->add_option("--threads", c.threads,
                        "worker threads for per-point fan-out");
    };

    // ---- roots ----
    Flags& ro = storage[0];
    CLI::App* roots = app.add_subcommand(
        "roots", "enumerate homogeneity degrees of harmonics up to dmax");
    add_common(roots, ro.common);
    roots->add_option("--dmax", ro.dmax, "largest degree reported")
        ->capture_default_str();
    roots->add_option("--merge-tol", ro.merge_tol,
                      "degrees closer than this merge into one row")
        ->capture_default_str();
    roots->footer(columns_footer("roots.csv", kRootsColumns));

    // ---- basis ----
    Flags& ba = storage[1];
    CLI::App* basis = app.add_subcommand(
        "basis", "emit the generating list of harmonics of degree <= 2");
    add_common(basis, ba.common);
    basis->footer("basis.json: spec, count, and per-element description, "
                  "degree and coefficient terms.");

    // ---- scales ----
    Flags& sc = storage[2];
    CLI::App* scales = app.add_subcommand(
        "scales", "classify dyadic scales around a point as good or bad");
    add_common(scales, sc.common);
    scales->add_option("--point", sc.point_path, "center point JSON file")
        ->check(CLI::ExistingFile);
    scales->add_option("--lambda", sc.lambda, "scale ratio in (0,1)")
        ->capture_default_str();
    scales->add_option("--eps0", sc.eps0, "near-apex threshold")
        ->capture_default_str();
    scales->add_option("--k-min", sc.k_min, "first scale index")
        ->capture_default_str();
    scales->add_option("--k-max", sc.k_max, "last scale index")
        ->capture_default_str();
    scales->footer(columns_footer("scales.csv", kScalesColumns));

    // ---- solve ----
    Flags& so = storage[3];
    CLI::App* solve = app.add_subcommand(
        "solve", "solve the Dirichlet problem on an apex-centered ball");
    add_common(solve, so.common);
    solve->add_option("--f", so.f_path, "right-hand side JSON file (terms)")
        ->check(CLI::ExistingFile);
    solve->add_option("--g", so.g_path,
                      "boundary data JSON file (spectral; default zero)")
        ->check(CLI::ExistingFile);
    solve->add_option("--method", so.method, "spectral | fd")
        ->capture_default_str();
    solve->add_option("--radius", so.radius, "ball radius")
        ->capture_default_str();
    solve->add_option("--nr", so.nr, "fd radial cells")->capture_default_str();
    solve->add_option("--ns", so.ns, "fd Euclidean cells")
        ->capture_default_str();
    solve->add_option("--r-max", so.r_max, "fd radial extent")
        ->capture_default_str();
    solve->add_option("--s-half", so.s_half, "fd half-width in s")
        ->capture_default_str();
    solve->footer("solution.json: method, inputs, and the solution (spectral: "
                  "terms; fd: per-mode nodal grids).");

    // ---- campanato ----
    Flags& ca = storage[4];
    CLI::App* campanato = app.add_subcommand(
        "campanato", "dyadic oscillation scan of a field against rho^alpha");
    add_common(campanato, ca.common);
    campanato->add_option("--f", ca.f_path, "field JSON file (terms)")
        ->check(CLI::ExistingFile);
    campanato->add_option("--points", ca.points_path,
                          "centers JSON file (default: the apex)")
        ->check(CLI::ExistingFile);
    campanato->add_option("--alpha", ca.alpha, "Hoelder exponent, > 0");
    campanato->add_option("--depth", ca.depth, "dyadic scales 2^-1 .. 2^-depth")
        ->capture_default_str()
        ->default_val(8);
    campanato->add_option("--log2-points", ca.log2_points,
                          "quadrature points per replicate, log2")
        ->capture_default_str();
    campanato->add_option("--replicates", ca.replicates,
                          "quadrature replicates")
        ->capture_default_str();
    campanato->add_option("--constant", ca.constant,
                          "fixed candidate constant for the bound column "
                          "(default: the measured maximum)");
    campanato->add_flag("--plot", ca.plot, "also write an SVG decay plot");
    campanato->footer(columns_footer("campanato.csv", kBoundColumns));

    // ---- verify-monotonicity ----
    Flags& vm = storage[5];
    CLI::App* monotonic = app.add_subcommand(
        "verify-monotonicity",
        "check ||u||_{B_rho} <= rho^d ||u||_{B_1} for a random harmonic span");
    add_common(monotonic, vm.common);
    monotonic->add_option("--dmax", vm.dmax,
                          "span harmonics of degree in (2, dmax]")
        ->capture_default_str();
    monotonic->add_option("--log2-points", vm.log2_points,
                          "quadrature points per replicate, log2")
        ->capture_default_str();
    monotonic->add_option("--replicates", vm.replicates,
                          "quadrature replicates")
        ->capture_default_str();
    monotonic->footer(columns_footer("monotonicity.csv", kBoundColumns));

    // ---- verify-schauder ----
    Flags& vs = storage[6];
    CLI::App* schauder = app.add_subcommand(
        "verify-schauder",
        "solve for f, then extract pointwise second derivatives by scale "
        "iteration");
    add_common(schauder, vs.common);
    schauder->add_option("--f", vs.f_path, "right-hand side JSON file (terms)")
        ->check(CLI::ExistingFile);
    schauder->add_option("--points", vs.points_path,
                         "evaluation points JSON file")
        ->check(CLI::ExistingFile);
    schauder->add_option("--alpha", vs.alpha,
                         "Hoelder exponent, must satisfy 0 < alpha < mu");
    schauder->add_option("--k-last", vs.k_last, "final scale index")
        ->capture_default_str();
    schauder->add_option("--lambda", vs.lambda, "scale ratio in (0,1)")
        ->capture_default_str();
    schauder->add_option("--eps0", vs.eps0, "near-apex threshold")
        ->capture_default_str();
    schauder->add_option("--log2-points", vs.log2_points,
                         "quadrature points per replicate, log2")
        ->capture_default_str();
    schauder->add_option("--replicates", vs.replicates, "quadrature replicates")
        ->capture_default_str();
    schauder->add_option("--delta", vs.delta,
                         "Hoelder weight in the normalization")
        ->capture_default_str();
    schauder->add_option("--domain-radius", vs.domain_radius,
                         "radius of the Dirichlet solve")
        ->capture_default_str();
    schauder->add_option("--depth", vs.depth,
                         "dyadic scales for the derivative Campanato check")
        ->capture_default_str();
    schauder->add_flag("--plot", vs.plot,
                       "also write SVG decay plots per point");
    schauder->footer(columns_footer("trace.csv", kTraceColumns) + "\n" +
                     columns_footer("tau.csv", kTauColumns));

    // Defaults mirrored into the config; flags override when present.
    auto configure = [&](CLI::App* sub, Flags& fl, const char* cmd) {
        Json cfg;
        cfg["seed"] = 12345;
        cfg["threads"] = 1;
        const std::string c = cmd;
        if (c == "roots" || c == "verify-monotonicity") {
            cfg["dmax"] = fl.dmax;
            if (c == "roots") cfg["merge_tol"] = fl.merge_tol;
        }
        if (c == "scales") {
            cfg["lambda"] = fl.lambda;
            cfg["eps0"] = fl.eps0;
            cfg["k_min"] = fl.k_min;
            cfg["k_max"] = fl.k_max;
        }
        if (c == "solve") {
            cfg["method"] = fl.method;
            cfg["radius"] = fl.radius;
            cfg["nr"] = fl.nr;
            cfg["ns"] = fl.ns;
            cfg["r_max"] = fl.r_max;
            cfg["s_half"] = fl.s_half;
        }
        if (c == "campanato") {
            cfg["depth"] = 8;
            cfg["log2_points"] = fl.log2_points;
            cfg["replicates"] = fl.replicates;
        }
        if (c == "verify-monotonicity") {
            cfg["log2_points"] = fl.log2_points;
            cfg["replicates"] = fl.replicates;
        }
        if (c == "verify-schauder") {
            cfg["lambda"] = fl.lambda;
            cfg["eps0"] = fl.eps0;
            cfg["k_last"] = fl.k_last;
            cfg["log2_points"] = fl.log2_points;
            cfg["replicates"] = fl.replicates;
            cfg["delta"] = fl.delta;
            cfg["domain_radius"] = fl.domain_radius;
            cfg["depth"] = fl.depth;
        }

        if (!fl.common.config_path.empty()) {
            Json file = load_json_file(fl.common.config_path);
            if (file.is_object() && file.contains("command") &&
                file.contains("config"))
                file = file["config"];  // replay straight from a manifest
            if (!file.is_object())
                throw std::invalid_argument(fl.common.config_path +
                                            ": expected a JSON object");
            merge_into(cfg, file);
        }

        auto seen = [&](const char* flag) { return sub->count(flag) > 0; };
        if (seen("--spec")) cfg["spec"] = load_json_file(fl.common.spec_path);
        if (seen("--seed")) cfg["seed"] = fl.common.seed;
        if (seen("--threads")) cfg["threads"] = fl.common.threads;
        if (sub->get_option_no_throw("--f") && seen("--f"))
            cfg["f"] = load_json_file(fl.f_path);
        if (sub->get_option_no_throw("--g") && seen("--g"))
            cfg["g"] = load_json_file(fl.g_path);
        if (sub->get_option_no_throw("--point") && seen("--point"))
            cfg["point"] = load_json_file(fl.point_path);
        if (sub->get_option_no_throw("--points") && seen("--points"))
            cfg["points"] = load_json_file(fl.points_path);
        if (sub->get_option_no_throw("--dmax") && seen("--dmax"))
            cfg["dmax"] = fl.dmax;
        if (sub->get_option_no_throw("--merge-tol") && seen("--merge-tol"))
            cfg["merge_tol"] = fl.merge_tol;
        if (sub->get_option_no_throw("--lambda") && seen("--lambda"))
            cfg["lambda"] = fl.lambda;
        if (sub->get_option_no_throw("--eps0") && seen("--eps0"))
            cfg["eps0"] = fl.eps0;
        if (sub->get_option_no_throw("--k-min") && seen("--k-min"))
            cfg["k_min"] = fl.k_min;
        if (sub->get_option_no_throw("--k-max") && seen("--k-max"))
            cfg["k_max"] = fl.k_max;
        if (sub->get_option_no_throw("--method") && seen("--method"))
            cfg["method"] = fl.method;
        if (sub->get_option_no_throw("--radius") && seen("--radius"))
            cfg["radius"] = fl.radius;
        if (sub->get_option_no_throw("--nr") && seen("--nr")) cfg["nr"] = fl.nr;
        if (sub->get_option_no_throw("--ns") && seen("--ns")) cfg["ns"] = fl.ns;
        if (sub->get_option_no_throw("--r-max") && seen("--r-max"))
            cfg["r_max"] = fl.r_max;
        if (sub->get_option_no_throw("--s-half") && seen("--s-half"))
            cfg["s_half"] = fl.s_half;
        if (sub->get_option_no_throw("--alpha") && seen("--alpha"))
            cfg["alpha"] = fl.alpha;
        if (sub->get_option_no_throw("--depth") && seen("--depth"))
            cfg["depth"] = fl.depth;
        if (sub->get_option_no_throw("--log2-points") && seen("--log2-points"))
            cfg["log2_points"] = fl.log2_points;
        if (sub->get_option_no_throw("--replicates") && seen("--replicates"))
            cfg["replicates"] = fl.replicates;
        if (sub->get_option_no_throw("--constant") && seen("--constant"))
            cfg["constant"] = fl.constant;
        if (sub->get_option_no_throw("--k-last") && seen("--k-last"))
            cfg["k_last"] = fl.k_last;
        if (sub->get_option_no_throw("--delta") && seen("--delta"))
            cfg["delta"] = fl.delta;
        if (sub->get_option_no_throw("--domain-radius") &&
            seen("--domain-radius"))
            cfg["domain_radius"] = fl.domain_radius;
        if (sub->get_option_no_throw("--plot") && seen("--plot"))
            cfg["plot"] = true;

        std::string out;
        if (seen("--out"))
            out = fl.common.out_dir;
        else if (cfg.contains("out") && cfg["out"].is_string())
            out = cfg["out"].get<std::string>();
        else if (const char* env = std::getenv("CONETOOL_OUT"); env && *env)
            out = env;
        else
            out = ".";
        cfg["out"] = out;

        Run run;
        run.command = cmd;
        run.out_dir = out;
        run.config = std::move(cfg);
        std::filesystem::create_directories(run.out_dir);
        return run;
    };

    roots->callback([&] {
        Run run = configure(roots, ro, "roots");
        run_roots(run);
        run.finish();
    });
    basis->callback([&] {
        Run run = configure(basis, ba, "basis");
        run_basis(run);
        run.finish();
    });
    scales->callback([&] {
        Run run = configure(scales, sc, "scales");
        run_scales(run);
        run.finish();
    });
    solve->callback([&] {
        Run run = configure(solve, so, "solve");
        run_solve(run);
        run.finish();
    });
    campanato->callback([&] {
        Run run = configure(campanato, ca, "campanato");
        run_campanato(run);
        run.finish();
    });
    monotonic->callback([&] {
        Run run = configure(monotonic, vm, "verify-monotonicity");
        run_verify_monotonicity(run);
        run.finish();
    });
    schauder->callback([&] {
        Run run = configure(schauder, vs, "verify-schauder");
        run_verify_schauder(run);
        run.finish();
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse message
        return code == 0 ? 0 : 2;
    } catch (const ScopeError& e) {
        std::cerr << "scope error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
