// JSON persistence for series and reports.
//
// A series document is a lattice header plus a canonically ordered term
// array; every term is [[k1,k2],[l1,l2],[[j,p]...],[[j,p]...],re,im].
// Floating-point values are written as shortest round-trip decimals, so
// save -> load -> save is byte-identical for finite doubles.
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dnls/series.hpp"

namespace dnls {

using json = nlohmann::json;

json series_to_json(const FTSeries& s);
FTSeries series_from_json(const json& doc);

// Canonical text form (2-space indent, alphabetical keys, trailing newline).
std::string dump_canonical(const json& doc);
void write_json_file(const json& doc, const std::string& path);
json read_json_file(const std::string& path);

void save_series(const FTSeries& s, const std::string& path);
FTSeries load_series(const std::string& path);

// -------------------------------------------------------------- golden diff
// Field-by-field comparison of two JSON documents.  Numeric leaves compare
// with an absolute tolerance looked up per field path in a manifest:
//   { "default": 1e-12, "fields": { "/kam/steps/*/eps_measured": 1e-9, ... } }
// where a path segment "*" matches any array index or key.  Everything else
// (strings, bools, structure, array lengths, key sets) must match exactly.
struct GoldenDiff {
  bool ok = true;
  std::vector<std::string> lines;  // human-readable mismatch descriptions

  void fail(const std::string& line) {
    ok = false;
    lines.push_back(line);
  }
};

double tolerance_for(const json& manifest, const std::string& path);
GoldenDiff golden_compare(const json& actual, const json& expected,
                          const json& manifest);

}  // namespace dnls
