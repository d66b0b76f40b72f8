#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "magkit/asymptotics.hpp"
#include "magkit/spd.hpp"

namespace magkit {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Input
// ---------------------------------------------------------------------------

namespace detail {

inline double parse_number(const std::string& field, std::size_t row, std::size_t col) {
  std::string s = field;
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  const auto where = [&] {
    return " at row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1);
  };
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty field" + where());
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "not a number: '" + s + "'" + where());
  }
  if (used != s.size()) {
    throw Error(ErrorCode::ParseError, "trailing characters in '" + s + "'" + where());
  }
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFinite, "non-finite value '" + s + "'" + where());
  }
  return v;
}

inline double json_number(const Json& v, const std::string& what) {
  if (!v.is_number()) throw Error(ErrorCode::ParseError, what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorCode::NonFinite, what + " is not finite");
  return d;
}

}  // namespace detail

/// Full symmetric distance matrix, one row per line, comma separated. Blank
/// lines and lines starting with '#' are skipped.
inline Matrix parse_distance_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[line.find_first_not_of(" \t\r")] == '#') continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      row.push_back(detail::parse_number(field, rows.size(), row.size()));
    }
    if (!line.empty() && line.back() == ',') {
      throw Error(ErrorCode::ParseError,
                  "trailing comma at row " + std::to_string(rows.size() + 1));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "no rows in distance CSV");
  const std::size_t n = rows.size();
  Matrix m(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw Error(ErrorCode::NotSquare, "row " + std::to_string(i + 1) + " has " +
                                            std::to_string(rows[i].size()) +
                                            " entries, expected " + std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

/// {"points": [[x, ...], ...]} or {"dist": [[...], ...], "labels": [...]}.
inline MetricSpace parse_space_json(const std::string& text, const Tolerances& tol = {}) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    // parse errors and out-of-range numbers such as 1e999
    throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "top level must be an object");
  std::vector<std::string> labels;
  if (doc.contains("labels")) {
    if (!doc["labels"].is_array()) throw Error(ErrorCode::ParseError, "labels must be an array");
    for (const auto& l : doc["labels"]) {
      if (!l.is_string()) throw Error(ErrorCode::ParseError, "labels must be strings");
      labels.push_back(l.get<std::string>());
    }
  }
  auto read_rows = [](const Json& arr, const std::string& what) {
    if (!arr.is_array()) throw Error(ErrorCode::ParseError, what + " must be an array");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_array()) {
        throw Error(ErrorCode::ParseError, what + " row " + std::to_string(i) + " is not an array");
      }
      std::vector<double> row;
      for (std::size_t j = 0; j < arr[i].size(); ++j) {
        row.push_back(detail::json_number(
            arr[i][j], what + "[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  if (doc.contains("points")) {
    const auto pts = read_rows(doc["points"], "points");
    if (pts.empty()) throw Error(ErrorCode::EmptyInput, "no points");
    MetricSpace space = from_points_euclidean(pts, tol);
    if (!labels.empty()) {
      return from_distance_matrix(space.distances(), tol, std::move(labels));
    }
    return space;
  }
  if (doc.contains("dist")) {
    const auto rows = read_rows(doc["dist"], "dist");
    if (rows.empty()) throw Error(ErrorCode::EmptyInput, "empty distance matrix");
    const std::size_t n = rows.size();
    Matrix m(static_cast<Index>(n), static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) {
        throw Error(ErrorCode::NotSquare, "dist row " + std::to_string(i) + " has wrong length");
      }
      for (std::size_t j = 0; j < n; ++j) {
        m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
      }
    }
    return from_distance_matrix(m, tol, std::move(labels));
  }
  throw Error(ErrorCode::ParseError, "expected a \"points\" or \"dist\" member");
}

/// Detects JSON by a leading '{', otherwise reads a distance CSV.
inline MetricSpace parse_space(const std::string& text, const Tolerances& tol = {}) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_space_json(text, tol);
  return from_distance_matrix(parse_distance_csv(text), tol);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline MetricSpace load_space(const std::string& path, const Tolerances& tol = {}) {
  return parse_space(read_file(path), tol);
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

template <class T>
Json to_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

/// `base` is added to every index (1 for one-based output).
inline Json to_json(const SubsetSelector& s, std::size_t base = 0) {
  Json a = Json::array();
  for (auto i : s.members()) a.push_back(i + base);
  return a;
}

inline Json mask_to_json(std::uint64_t mask, std::size_t base = 0) {
  return to_json(SubsetSelector::from_mask(mask), base);
}

/// Points are the columns of sqrt K, written one point per row.
inline Json to_json(const EmbeddingData& e) {
  return Json{{"points", to_json(Matrix(e.sqrt_k.transpose()))},
              {"circumradius", e.radius()},
              {"circumcenter_barycentric", to_json(e.barycentric())}};
}

inline Json to_json(const ResidualReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    entries.push_back(
        {{"name", e.name}, {"residual", e.residual}, {"tolerance", e.tolerance}, {"pass", e.pass}});
  }
  return Json{{"all_pass", r.all_pass()}, {"max_residual", r.max_residual()},
              {"entries", std::move(entries)}};
}

inline Json to_json(const SpdCertificate& c) {
  const auto& ch = c.characterizations;
  return Json{{"verdict", c.verdict},
              {"is_pd", c.is_pd},
              {"w_positive", c.w_positive},
              {"c_positive", c.c_positive},
              {"w_boundary", c.w_boundary},
              {"c_boundary", c.c_boundary},
              {"min_w", c.min_w},
              {"min_c", c.min_c},
              {"characterizations",
               {{"sign_pattern", ch.sign_pattern},
                {"m_matrix", ch.m_matrix},
                {"laplacian", ch.laplacian},
                {"circumcenter_interior", ch.circumcenter_interior}}},
              {"characterizations_agree", c.characterizations_agree()}};
}

inline Json to_json(const SubspaceResult& r, std::size_t base = 0) {
  Json j{{"subset", to_json(r.subset, base)},
         {"magnitude", r.magnitude},
         {"weighting", to_json(r.weighting)},
         {"normalized_weighting", to_json(r.normalized_weighting())},
         {"derivation", std::string(to_string(r.derivation))}};
  if (r.warning) {
    j["warning"] = {{"kind", "ConditioningWarning"},
                    {"incremental", r.warning->incremental},
                    {"recomputed", r.warning->recomputed},
                    {"relative_gap", r.warning->relative_gap}};
  }
  return j;
}

inline Json to_json(const SetFunctionReport& r, std::size_t base = 0) {
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    violations.push_back(
        {{"Y", mask_to_json(v.subset, base)}, {"x", v.x + base}, {"y", v.y + base}, {"margin", v.margin}});
  }
  Json mono = Json::array();
  for (const auto& v : r.monotonicity_violations) {
    mono.push_back(
        {{"smaller", mask_to_json(v.smaller, base)}, {"larger", mask_to_json(v.larger, base)},
         {"margin", v.margin}});
  }
  Json undefined = Json::array();
  for (auto m : r.undefined_subsets) undefined.push_back(mask_to_json(m, base));

  const bool inverse = r.kind == SetFunctionKind::InverseMagnitude;
  Json summary{{"n", r.n},
               {"t", r.t},
               {"exhaustive", r.exhaustive},
               {"quadruples_checked", r.quadruples_checked},
               {"covering_pairs_checked", r.pairs_checked},
               {"violation_count", r.violation_count},
               {"monotonicity_violation_count", r.monotonicity_violation_count},
               {"strictly_submodular", r.submodular()},
               {"increasing", r.increasing()},
               {"hypothesis_holds", r.hypothesis_holds},
               {"warnings", r.warnings},
               {"undefined_subsets", std::move(undefined)}};
  Json out{{"alpha", r.alpha},
           {"kind", std::string(to_string(r.kind))},
           {"violations", std::move(violations)},
           {"monotonicity_violations", std::move(mono)},
           {"summary", std::move(summary)}};
  if (!inverse) {
    auto family = [base](const std::vector<FamilyValue>& vals, bool cover) {
      Json a = Json::array();
      for (const auto& v : vals) {
        if (cover) {
          a.push_back({{"smaller", mask_to_json(v.subset, base)},
                       {"larger", mask_to_json(v.larger, base)},
                       {"value", v.value}});
        } else {
          a.push_back(
              {{"Y", mask_to_json(v.subset, base)}, {"x", v.x + base}, {"y", v.y + base},
               {"value", v.value}});
        }
      }
      return a;
    };
    auto finite_or_null = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
    Json targets = Json::object();
    for (std::size_t m = 3; m < r.f_targets.size(); ++m) {
      targets[std::to_string(m)] = r.f_targets[m];
    }
    out["summary"]["max_F"] = finite_or_null(r.max_f);
    out["summary"]["max_G"] = finite_or_null(r.max_g);
    out["summary"]["max_H"] = finite_or_null(r.max_h);
    out["summary"]["discrete_limit"] = {{"F_by_size", std::move(targets)},
                                        {"G", r.g_target}};
    out["F_values"] = family(r.f_values, false);
    out["G_values"] = family(r.g_values, false);
    out["H_values"] = family(r.h_values, true);
  }
  return out;
}

inline Json to_json(const ScaleThreshold& s) {
  Json trace = Json::array();
  for (const auto& [t, ok] : s.trace) trace.push_back({{"t", t}, {"spd", ok}});
  return Json{{"t_star", s.t_star}, {"trace", std::move(trace)}};
}

}  // namespace magkit
