#pragma once

// JSON problem/report documents and human-readable rendering.
//
// Problem document:
//   { "a": [[...], ...],
//     "y": [ { "lower": [c0, c1], "upper": [c0, c1] }, ... ] }
// Matrix document (for the inverse command):
//   { "matrix": [[...], ...] }
// Report document: see report_to_json().

#include "fcep/core.hpp"
#include "fcep/fls.hpp"
#include "fcep/fuzzy.hpp"
#include "fcep/ginv.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace fcep::io {

using nlohmann::json;

// ---- Reading ----

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline const json& require_field(const json& doc, const char* key) {
  if (!doc.is_object()) throw ParseError("expected a JSON object");
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

inline double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

/// Rectangular array of arrays. Ragged rows are a parse error; the shape
/// itself is checked by the consumer.
inline RealMatrix matrix_from_json(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ParseError(where + ": expected a non-empty array of rows");
  const std::size_t cols = v.front().is_array() ? v.front().size() : 0;
  if (cols == 0) throw ParseError(where + ": rows must be non-empty arrays");
  RealMatrix m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& row = v[i];
    if (!row.is_array() || row.size() != cols)
      throw ParseError(where + ": row " + std::to_string(i) + " has a different length");
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          as_number(row[j], where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  return m;
}

inline AffineFn affine_from_json(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2)
    throw ParseError(where + ": expected [c0, c1] (affine coefficients)");
  return {as_number(v[0], where), as_number(v[1], where)};
}

inline FuzzyNumber fuzzy_from_json(const json& v, const std::string& where) {
  if (!v.is_object()) throw ParseError(where + ": expected an object with lower/upper");
  if (v.contains("samples") || v.contains("encoding"))
    throw ParseError(where +
                     ": grid-sampled fuzzy numbers are not supported; give affine "
                     "\"lower\": [c0, c1] and \"upper\": [c0, c1]");
  return {affine_from_json(require_field(v, "lower"), where + ".lower"),
          affine_from_json(require_field(v, "upper"), where + ".upper")};
}

inline FuzzyVector fuzzy_vector_from_json(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ParseError(where + ": expected a non-empty array");
  FuzzyVector out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(fuzzy_from_json(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

/// Parses and shape-checks a problem (DimensionMismatch on non-square A or
/// a right-hand side of the wrong length).
inline FlsProblem problem_from_json(const json& doc) {
  FlsProblem p;
  p.a = matrix_from_json(require_field(doc, "a"), "a");
  p.y = fuzzy_vector_from_json(require_field(doc, "y"), "y");
  p.validate();
  return p;
}

inline RealMatrix square_matrix_from_json(const json& doc) {
  RealMatrix m = matrix_from_json(require_field(doc, "matrix"), "matrix");
  require_square(m, "matrix");
  return m;
}

// ---- Writing ----

inline json to_json(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const FuzzyNumber& f) {
  return {{"lower", {f.lower.c0, f.lower.c1}}, {"upper", {f.upper.c0, f.upper.c1}}};
}

inline json to_json(const Verdict& v) {
  json clauses = json::array();
  for (Clause c : v.violated) clauses.push_back(static_cast<int>(c));
  return {{"valid", v.valid()},
          {"violated", clauses},
          {"ordered_fails_at_0", v.ordered_fails_at_0},
          {"ordered_fails_at_1", v.ordered_fails_at_1}};
}

/// A solve report together with the settings that produced it.
struct ReportFile {
  SolveReport report;
  TolerancePolicy tol;
  std::size_t grid = kDefaultGrid;
};

inline json report_to_json(const ReportFile& rf) {
  const SolveReport& r = rf.report;
  json fuzzy = json::array();
  for (const auto& f : r.fuzzy_x) fuzzy.push_back(to_json(f));
  json verdicts = json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
  return {
      {"classification",
       {{"kind", std::string(to_string(r.classification.kind))},
        {"rank_s", r.classification.rank_s},
        {"rank_aug", r.classification.rank_aug},
        {"index_s", r.classification.index_s}}},
      {"method", std::string(to_string(r.method))},
      {"crisp_solution", {{"x0", to_json(r.crisp_x0)}, {"x1", to_json(r.crisp_x1)}}},
      {"fuzzy_solution", fuzzy},
      {"verdicts", verdicts},
      {"overall", r.strong() ? "strong" : "weak"},
      {"is_generalized", r.is_generalized},
      {"residual", r.residual},
      {"grid", rf.grid},
      {"tolerances",
       {{"rank_rel_tol", rf.tol.rank_rel_tol ? json(*rf.tol.rank_rel_tol) : json(nullptr)},
        {"residual_tol", rf.tol.residual_tol},
        {"equality_tol", rf.tol.equality_tol}}},
  };
}

// ---- Report parsing ----

inline RealVector vector_from_json(const json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array");
  RealVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = as_number(v[i], where);
  return out;
}

inline Verdict verdict_from_json(const json& v) {
  Verdict out;
  for (const json& c : require_field(v, "violated")) {
    const int id = c.get<int>();
    if (id < 1 || id > 3) throw ParseError("verdict: unknown clause " + std::to_string(id));
    out.violated.push_back(static_cast<Clause>(id));
  }
  out.ordered_fails_at_0 = require_field(v, "ordered_fails_at_0").get<bool>();
  out.ordered_fails_at_1 = require_field(v, "ordered_fails_at_1").get<bool>();
  return out;
}

inline ReportFile report_from_json(const json& doc) {
  try {
    ReportFile rf;
    SolveReport& r = rf.report;
    const json& cls = require_field(doc, "classification");
    const auto kind = kind_from_string(require_field(cls, "kind").get<std::string>());
    if (!kind) throw ParseError("classification.kind: unknown value");
    r.classification.kind = *kind;
    r.classification.rank_s = require_field(cls, "rank_s").get<std::size_t>();
    r.classification.rank_aug = require_field(cls, "rank_aug").get<std::size_t>();
    r.classification.index_s = require_field(cls, "index_s").get<std::size_t>();
    const auto method = method_from_string(require_field(doc, "method").get<std::string>());
    if (!method) throw ParseError("method: unknown value");
    r.method = *method;
    const json& crisp = require_field(doc, "crisp_solution");
    r.crisp_x0 = vector_from_json(require_field(crisp, "x0"), "crisp_solution.x0");
    r.crisp_x1 = vector_from_json(require_field(crisp, "x1"), "crisp_solution.x1");
    r.fuzzy_x = fuzzy_vector_from_json(require_field(doc, "fuzzy_solution"), "fuzzy_solution");
    for (const json& v : require_field(doc, "verdicts")) r.verdicts.push_back(verdict_from_json(v));
    r.residual = as_number(require_field(doc, "residual"), "residual");
    r.is_generalized = require_field(doc, "is_generalized").get<bool>();
    rf.grid = require_field(doc, "grid").get<std::size_t>();
    const json& t = require_field(doc, "tolerances");
    const json& rank_tol = require_field(t, "rank_rel_tol");
    if (!rank_tol.is_null()) rf.tol.rank_rel_tol = as_number(rank_tol, "rank_rel_tol");
    rf.tol.residual_tol = as_number(require_field(t, "residual_tol"), "residual_tol");
    rf.tol.equality_tol = as_number(require_field(t, "equality_tol"), "equality_tol");
    return rf;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
}

// ---- Text rendering ----

inline double snap(double v, double scale = 1.0) {
  return std::abs(v) <= 1e-12 * std::max(1.0, scale) ? 0.0 : v;
}

inline std::string format_number(double v, int digits) {
  std::ostringstream os;
  os << std::setprecision(digits) << snap(v);
  return os.str();
}

/// "c0 + c1r" with zero terms dropped, e.g. "2r", "-4", "0.25 - 0.75r".
inline std::string format_affine(const AffineFn& f, int digits = 10) {
  const double c0 = snap(f.c0);
  const double c1 = snap(f.c1);
  if (c1 == 0.0) return format_number(c0, digits);
  const std::string slope = format_number(std::abs(c1), digits) + "r";
  if (c0 == 0.0) return (c1 < 0.0 ? "-" : "") + slope;
  return format_number(c0, digits) + (c1 < 0.0 ? " - " : " + ") + slope;
}

inline std::string format_fuzzy(const FuzzyNumber& f, int digits = 10) {
  return "(" + format_affine(f.lower, digits) + ", " + format_affine(f.upper, digits) + ")";
}

inline std::string format_verdict(const Verdict& v) {
  if (v.valid()) return "valid";
  std::string out = "invalid {";
  for (std::size_t i = 0; i < v.violated.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(static_cast<int>(v.violated[i]));
    if (v.violated[i] == Clause::Ordered) {
      if (v.ordered_fails_at_0 && v.ordered_fails_at_1)
        out += " at r=0,1";
      else
        out += v.ordered_fails_at_0 ? " at r=0" : " at r=1";
    }
  }
  return out + "}";
}

inline std::string report_to_text(const ReportFile& rf) {
  const SolveReport& r = rf.report;
  std::ostringstream os;
  os << "classification: " << to_string(r.classification.kind)
     << " (rank S = " << r.classification.rank_s
     << ", rank [S|Y] = " << r.classification.rank_aug
     << ", index S = " << r.classification.index_s << ")\n";
  os << "method:         " << to_string(r.method) << "\n";
  os << "generalized:    " << (r.is_generalized ? "yes" : "no") << "\n";
  os << "residual:       " << std::setprecision(3) << r.residual << "\n";
  os << "overall:        " << (r.strong() ? "strong" : "weak") << "\n";
  os << "crisp solution X(r) = x0 + r x1:\n";
  for (Eigen::Index i = 0; i < r.crisp_x0.size(); ++i)
    os << "  X[" << i + 1 << "] = " << format_affine({r.crisp_x0(i), r.crisp_x1(i)}) << "\n";
  os << "fuzzy solution:\n";
  for (std::size_t i = 0; i < r.fuzzy_x.size(); ++i) {
    os << "  x" << i + 1 << " = " << format_fuzzy(r.fuzzy_x[i]);
    if (i < r.verdicts.size()) os << "  " << format_verdict(r.verdicts[i]);
    os << "\n";
  }
  os << "tolerances:     rank_rel_tol=";
  if (rf.tol.rank_rel_tol)
    os << *rf.tol.rank_rel_tol;
  else
    os << "auto";
  os << " residual_tol=" << rf.tol.residual_tol << " equality_tol=" << rf.tol.equality_tol
     << " grid=" << rf.grid << "\n";
  return os.str();
}

/// Right-aligned columns, `precision` significant digits; entries within
/// 1e-12 of zero (relative to the largest entry) print as 0.
inline std::string format_matrix(const RealMatrix& m, int precision = 6) {
  if (m.size() == 0) return "  (empty)\n";
  const double scale = m.cwiseAbs().maxCoeff();
  std::vector<std::string> cells;
  std::size_t width = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::ostringstream os;
      os << std::setprecision(precision) << snap(m(i, j), scale);
      cells.push_back(os.str());
      width = std::max(width, cells.back().size());
    }
  std::ostringstream os;
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << " ";
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << " " << std::setw(static_cast<int>(width)) << cells[idx++];
    os << "\n";
  }
  return os.str();
}

}  // namespace fcep::io
