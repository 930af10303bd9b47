#include "cones/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>

namespace cones {

const char* const kToolVersion = "1.0.0";

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::invalid_argument(where + ": " + what);
}

const Json& need_key(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(where + "." + key, "missing field");
    return *it;
}

double need_number(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

int need_int(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

const Json& need_array(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    return j;
}

std::string at(const std::string& where, size_t i) {
    return where + "[" + std::to_string(i) + "]";
}

}  // namespace

// ---------------------------------------------------------------------------
// Type round-trips
// ---------------------------------------------------------------------------

Json spec_to_json(const ConeSpec& spec) {
    Json j;
    j["betas"] = spec.betas;
    j["euclidean_dim"] = spec.euclidean_dim;
    return j;
}

ConeSpec spec_from_json(const Json& j, const std::string& where) {
    ConeSpec spec;
    const Json& betas = need_array(need_key(j, "betas", where), where + ".betas");
    for (size_t a = 0; a < betas.size(); ++a)
        spec.betas.push_back(need_number(betas[a], at(where + ".betas", a)));
    spec.euclidean_dim =
        need_int(need_key(j, "euclidean_dim", where), where + ".euclidean_dim");
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return spec;
}

Json point_to_json(const ConePoint& p) {
    Json j;
    j["polar"] = Json::array();
    for (const auto& rt : p.polar) j["polar"].push_back({rt[0], rt[1]});
    j["s"] = p.s;
    return j;
}

ConePoint point_from_json(const Json& j, const std::string& where) {
    ConePoint p;
    const Json& polar = need_array(need_key(j, "polar", where), where + ".polar");
    for (size_t a = 0; a < polar.size(); ++a) {
        const std::string wa = at(where + ".polar", a);
        const Json& pair = need_array(polar[a], wa);
        if (pair.size() != 2) fail(wa, "expected an [r, theta] pair");
        p.polar.push_back(
            {need_number(pair[0], wa + "[0]"), need_number(pair[1], wa + "[1]")});
    }
    const Json& s = need_array(need_key(j, "s", where), where + ".s");
    for (size_t i = 0; i < s.size(); ++i)
        p.s.push_back(need_number(s[i], at(where + ".s", i)));
    p.canonicalize();
    return p;
}

std::vector<ConePoint> points_from_json(const Json& j, const std::string& where) {
    std::vector<ConePoint> points;
    if (j.is_object()) {
        points.push_back(point_from_json(j, where));
        return points;
    }
    const Json& arr = need_array(j, where);
    if (arr.empty()) fail(where, "expected at least one point");
    for (size_t i = 0; i < arr.size(); ++i)
        points.push_back(point_from_json(arr[i], at(where, i)));
    return points;
}

Json expr_to_json(const PolarExpr& u) {
    Json j;
    j["terms"] = Json::array();
    for (const Term& t : u.terms()) {
        Json term;
        term["coeff"] = t.coeff;
        term["r_pow"] = Json::array();
        for (const RadialPow& e : t.r_pow)
            term["r_pow"].push_back({e.kappa, e.iota});
        term["angular"] = Json::array();
        for (const AngularFactor& f : t.angular)
            term["angular"].push_back({f.k, f.sine ? "sin" : "cos"});
        term["s_pow"] = t.s_pow;
        j["terms"].push_back(std::move(term));
    }
    return j;
}

PolarExpr expr_from_json(const ConeSpec& spec, const Json& j,
                         const std::string& where) {
    const int n = spec.cone_count();
    const int q = spec.euclidean_dim;
    PolarExpr u(spec);
    const Json& terms = need_array(need_key(j, "terms", where), where + ".terms");
    for (size_t ti = 0; ti < terms.size(); ++ti) {
        const std::string wt = at(where + ".terms", ti);
        Term t;
        t.coeff = need_number(need_key(terms[ti], "coeff", wt), wt + ".coeff");
        t.r_pow.assign(n, {});
        t.angular.assign(n, {});
        t.s_pow.assign(q, 0);
        // The exponent arrays may be omitted (all zero) but, when present,
        // must cover every factor.
        if (terms[ti].contains("r_pow")) {
            const Json& rp = need_array(terms[ti]["r_pow"], wt + ".r_pow");
            if (static_cast<int>(rp.size()) != n)
                fail(wt + ".r_pow", "expected one [kappa, iota] pair per cone "
                                    "factor (" + std::to_string(n) + ")");
            for (int a = 0; a < n; ++a) {
                const std::string wa = at(wt + ".r_pow", a);
                const Json& pair = need_array(rp[a], wa);
                if (pair.size() != 2) fail(wa, "expected a [kappa, iota] pair");
                t.r_pow[a] = {need_int(pair[0], wa + "[0]"),
                              need_int(pair[1], wa + "[1]")};
            }
        }
        if (terms[ti].contains("angular")) {
            const Json& an = need_array(terms[ti]["angular"], wt + ".angular");
            if (static_cast<int>(an.size()) != n)
                fail(wt + ".angular", "expected one [k, \"cos\"|\"sin\"] entry "
                                      "per cone factor (" + std::to_string(n) +
                                      ")");
            for (int a = 0; a < n; ++a) {
                const std::string wa = at(wt + ".angular", a);
                const Json& pair = need_array(an[a], wa);
                if (pair.size() != 2)
                    fail(wa, "expected a [k, \"cos\"|\"sin\"] pair");
                const int k = need_int(pair[0], wa + "[0]");
                if (!pair[1].is_string() ||
                    (pair[1] != "cos" && pair[1] != "sin"))
                    fail(wa + "[1]", "expected \"cos\" or \"sin\"");
                t.angular[a] = {k, pair[1] == "sin"};
            }
        }
        if (terms[ti].contains("s_pow")) {
            const Json& sp = need_array(terms[ti]["s_pow"], wt + ".s_pow");
            if (static_cast<int>(sp.size()) != q)
                fail(wt + ".s_pow", "expected one exponent per Euclidean "
                                    "coordinate (" + std::to_string(q) + ")");
            for (int i = 0; i < q; ++i) {
                t.s_pow[i] = need_int(sp[i], at(wt + ".s_pow", i));
                if (t.s_pow[i] < 0) fail(at(wt + ".s_pow", i), "must be >= 0");
            }
        }
        u.push_term(std::move(t));
    }
    return u.simplify();
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

Json load_json_file(const std::string& path) {
    try {
        return Json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string csv_number(double v) {
    // Shortest decimal that parses back to the same double, matching the JSON
    // writer so a value prints identically in both formats.
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace {

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> columns)
    : columns_(std::move(columns)) {
    if (columns_.empty())
        throw std::invalid_argument("CsvWriter: no columns");
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
        throw std::invalid_argument(
            "CsvWriter: row has " + std::to_string(cells.size()) +
            " cells, header has " + std::to_string(columns_.size()));
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) body_ += ',';
        body_ += csv_escape(cells[i]);
    }
    body_ += '\n';
    ++rows_;
}

std::string CsvWriter::text() const {
    std::string out;
    for (size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(columns_[i]);
    }
    out += '\n';
    out += body_;
    return out;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

Json make_manifest(const std::string& command, const Json& config,
                   const std::vector<std::pair<std::string, double>>& timings_s) {
    Json m;
    m["command"] = command;
    m["versions"]["tool"] = kToolVersion;
    m["versions"]["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                             std::to_string(EIGEN_MAJOR_VERSION) + "." +
                             std::to_string(EIGEN_MINOR_VERSION);
    m["versions"]["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) +
                                     "." +
                                     std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                     "." +
                                     std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    m["versions"]["compiler"] = __VERSION__;
    m["config_hash"] = fnv1a_hex(config.dump());
    m["config"] = config;
    m["timings_seconds"] = Json::object();
    for (const auto& [name, seconds] : timings_s)
        m["timings_seconds"][name] = seconds;
    return m;
}

}  // namespace cones
