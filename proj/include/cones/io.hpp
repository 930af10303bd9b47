#pragma once

// JSON and CSV serialization, plus the manifest that makes command-line runs
// replayable.
//
// Wire layouts (also written to the per-run schema file):
//
//   ConeSpec   {"betas": [0.75], "euclidean_dim": 1}
//   ConePoint  {"polar": [[r, theta], ...], "s": [s_1, ...]}
//   PolarExpr  {"terms": [{"coeff": c,
//                          "r_pow":   [[kappa, iota], ...],
//                          "angular": [[k, "cos"|"sin"], ...],
//                          "s_pow":   [p_1, ...]}]}
//
// Each term carries one r_pow pair and one angular entry per cone factor and
// one s_pow exponent per Euclidean coordinate; the radial exponent of factor
// a is kappa / beta_a + iota.  Loaders check shapes and name the offending
// field path in the exception; writers format numbers with round-trip
// precision so a fixed input always produces identical bytes.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cones/geometry.hpp"
#include "cones/modes.hpp"

namespace cones {

// Ordered so that object keys serialize in insertion order, keeping output
// bytes independent of any hashing.
using Json = nlohmann::ordered_json;

extern const char* const kToolVersion;

// ---------------------------------------------------------------------------
// Type round-trips.  The *_from_json loaders throw std::invalid_argument
// with `where` as the path prefix of the offending field.
// ---------------------------------------------------------------------------

Json spec_to_json(const ConeSpec& spec);
ConeSpec spec_from_json(const Json& j, const std::string& where = "spec");

Json point_to_json(const ConePoint& p);
ConePoint point_from_json(const Json& j, const std::string& where = "point");
// A JSON array of points; a bare object is accepted as a one-point list.
std::vector<ConePoint> points_from_json(const Json& j,
                                        const std::string& where = "points");

Json expr_to_json(const PolarExpr& u);
PolarExpr expr_from_json(const ConeSpec& spec, const Json& j,
                         const std::string& where = "expr");

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Parse errors are rethrown as std::invalid_argument naming the file.
Json load_json_file(const std::string& path);
// dump(2) plus a trailing newline.
void write_json_file(const std::string& path, const Json& j);

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

// Shortest round-trip decimal form of v ("%.17g" trimmed), deterministic for
// equal doubles.
std::string csv_number(double v);

// Header-checked CSV assembly with RFC 4180 quoting (cells containing commas,
// quotes or newlines are wrapped and internal quotes doubled).
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const { return columns_; }
    int rows() const { return rows_; }

    // Throws std::invalid_argument when the arity differs from the header.
    void row(const std::vector<std::string>& cells);

    // Header line plus all rows, each "\n"-terminated.
    std::string text() const;

  private:
    std::vector<std::string> columns_;
    std::string body_;
    int rows_ = 0;
};

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

// 64-bit FNV-1a of the bytes, as a fixed-width lowercase hex string.
std::string fnv1a_hex(const std::string& bytes);

// The manifest stores the command, tool and dependency versions, the full
// merged configuration (so the run is reproducible from this file alone),
// its hash, and wall-clock timings.  Timings are the only entry that varies
// between replays; every other artifact of a run is byte-identical.
Json make_manifest(const std::string& command, const Json& config,
                   const std::vector<std::pair<std::string, double>>& timings_s);

}  // namespace cones
