#include "dnls/serialize.hpp"

#include <fstream>
#include <sstream>

namespace dnls {

namespace {

std::string structure_name(Structure st) {
  return st == Structure::lattice_qqbar ? "lattice_qqbar" : "mixed_angle_action";
}

Structure structure_from_name(const std::string& s) {
  if (s == "lattice_qqbar") return Structure::lattice_qqbar;
  if (s == "mixed_angle_action") return Structure::mixed_angle_action;
  DNLS_CHECK(false, "unknown series structure '" + s + "'");
  return Structure::lattice_qqbar;  // unreachable
}

json exponents_to_json(const std::int8_t* modes, const std::uint8_t* pows,
                       int n) {
  json arr = json::array();
  for (int i = 0; i < n; ++i) arr.push_back({int(modes[i]), int(pows[i])});
  return arr;
}

}  // namespace

json series_to_json(const FTSeries& s) {
  json doc;
  doc["structure"] = structure_name(s.structure());
  doc["lattice"] = {{"n1", s.lattice().n1},
                    {"n2", s.lattice().n2},
                    {"j_max", s.lattice().j_max}};
  doc["caps"] = {{"degree_cap", s.caps().degree_cap},
                 {"fourier_cap", s.caps().fourier_cap},
                 {"prune", s.caps().prune}};
  json terms = json::array();
  for (const auto& [t, c] : s.sorted_terms()) {
    terms.push_back({json::array({int(t.k[0]), int(t.k[1])}),
                     json::array({int(t.l[0]), int(t.l[1])}),
                     exponents_to_json(t.a_mode, t.a_pow, t.n_alpha),
                     exponents_to_json(t.b_mode, t.b_pow, t.n_beta),
                     c.real(), c.imag()});
  }
  doc["terms"] = std::move(terms);
  return doc;
}

FTSeries series_from_json(const json& doc) {
  ModeLattice lat;
  lat.n1 = doc.at("lattice").at("n1").get<int>();
  lat.n2 = doc.at("lattice").at("n2").get<int>();
  lat.j_max = doc.at("lattice").at("j_max").get<int>();
  lat.validate();
  SeriesCaps caps;
  caps.degree_cap = doc.at("caps").at("degree_cap").get<int>();
  caps.fourier_cap = doc.at("caps").at("fourier_cap").get<int>();
  caps.prune = doc.at("caps").at("prune").get<double>();
  FTSeries s(structure_from_name(doc.at("structure").get<std::string>()), lat,
             caps);
  for (const auto& row : doc.at("terms")) {
    DNLS_CHECK(row.is_array() && row.size() == 6, "series term: want 6 fields");
    std::vector<std::pair<int, int>> alpha, beta;
    for (const auto& e : row[2]) alpha.emplace_back(e[0].get<int>(), e[1].get<int>());
    for (const auto& e : row[3]) beta.emplace_back(e[0].get<int>(), e[1].get<int>());
    TermKey t = make_mixed_key(row[0][0].get<int>(), row[0][1].get<int>(),
                               row[1][0].get<int>(), row[1][1].get<int>(),
                               alpha, beta);
    s.add_term(t, cplx(row[4].get<double>(), row[5].get<double>()));
  }
  return s;
}

std::string dump_canonical(const json& doc) { return doc.dump(2) + "\n"; }

void write_json_file(const json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  DNLS_CHECK(out.good(), "cannot open for write: " + path);
  out << dump_canonical(doc);
  DNLS_CHECK(out.good(), "write failed: " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  DNLS_CHECK(in.good(), "cannot open for read: " + path);
  return json::parse(in);
}

void save_series(const FTSeries& s, const std::string& path) {
  write_json_file(series_to_json(s), path);
}

FTSeries load_series(const std::string& path) {
  return series_from_json(read_json_file(path));
}

// --------------------------------------------------------------- golden diff
namespace {

bool segments_match(const std::string& pattern, const std::string& path) {
  // Split both on '/', compare segment-wise with "*" wildcards.
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
      if (ch == '/') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    out.push_back(cur);
    return out;
  };
  const auto ps = split(pattern), qs = split(path);
  if (ps.size() != qs.size()) return false;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (ps[i] != "*" && ps[i] != qs[i]) return false;
  return true;
}

void compare_rec(const json& a, const json& e, const json& manifest,
                 const std::string& path, GoldenDiff& diff) {
  if (a.is_number() && e.is_number()) {
    const double av = a.get<double>(), ev = e.get<double>();
    const double tol = tolerance_for(manifest, path);
    if (!(std::abs(av - ev) <= tol)) {
      std::ostringstream os;
      os << path << ": |" << format_double(av) << " - " << format_double(ev)
         << "| > " << format_double(tol);
      diff.fail(os.str());
    }
    return;
  }
  if (a.type() != e.type()) {
    diff.fail(path + ": type mismatch (" + std::string(a.type_name()) +
              " vs " + std::string(e.type_name()) + ")");
    return;
  }
  if (a.is_array()) {
    if (a.size() != e.size()) {
      diff.fail(path + ": array length " + std::to_string(a.size()) + " vs " +
                std::to_string(e.size()));
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i)
      compare_rec(a[i], e[i], manifest, path + "/" + std::to_string(i), diff);
    return;
  }
  if (a.is_object()) {
    for (auto it = e.begin(); it != e.end(); ++it) {
      if (!a.contains(it.key())) {
        diff.fail(path + "/" + it.key() + ": missing in actual");
        continue;
      }
      compare_rec(a.at(it.key()), it.value(), manifest, path + "/" + it.key(),
                  diff);
    }
    for (auto it = a.begin(); it != a.end(); ++it)
      if (!e.contains(it.key()))
        diff.fail(path + "/" + it.key() + ": unexpected extra field");
    return;
  }
  if (a != e) diff.fail(path + ": " + a.dump() + " != " + e.dump());
}

}  // namespace

double tolerance_for(const json& manifest, const std::string& path) {
  double tol = 0.0;
  if (manifest.contains("default")) tol = manifest["default"].get<double>();
  if (manifest.contains("fields")) {
    for (auto it = manifest["fields"].begin(); it != manifest["fields"].end();
         ++it) {
      if (segments_match(it.key(), path)) tol = it.value().get<double>();
    }
  }
  return tol;
}

GoldenDiff golden_compare(const json& actual, const json& expected,
                          const json& manifest) {
  GoldenDiff diff;
  compare_rec(actual, expected, manifest, "", diff);
  return diff;
}

}  // namespace dnls
