#pragma once

// Fuzzy linear systems A x~ = y~ with crisp square A. The system is embedded
// in the crisp 2n x 2n system S X(r) = Y(r), S = [[D, E], [E, D]] with
// D = max(A, 0) and E = max(-A, 0), and solved with the core-EP inverse of S
// assembled blockwise from |A|^⊕ and A^⊕.

#include "fcep/core.hpp"
#include "fcep/fuzzy.hpp"
#include "fcep/ginv.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fcep {

struct FlsProblem {
  RealMatrix a;
  FuzzyVector y;

  void validate() const {
    require_square(a, "fuzzy linear system");
    if (static_cast<Eigen::Index>(y.size()) != a.rows())
      throw DimensionMismatch("right-hand side has " + std::to_string(y.size()) +
                              " entries, coefficient matrix has " +
                              std::to_string(a.rows()) + " rows");
    for (const auto& f : y) {
      if (!std::isfinite(f.lower.c0) || !std::isfinite(f.lower.c1) ||
          !std::isfinite(f.upper.c0) || !std::isfinite(f.upper.c1))
        throw NumericalFailure("right-hand side has non-finite coefficients");
    }
  }
};

/// Crisp embedding. Y(r) = y0 + r * y1; rows n..2n-1 carry the negated
/// upper endpoints.
struct AssociatedSystem {
  RealMatrix s;
  RealMatrix d;
  RealMatrix e;
  RealVector y0;
  RealVector y1;

  Eigen::Index n() const { return d.rows(); }
  RealVector rhs(double r) const { return y0 + r * y1; }
};

enum class Kind { ConsistentUnique, ConsistentInfinite, Inconsistent };

struct Classification {
  Kind kind = Kind::ConsistentUnique;
  std::size_t rank_s = 0;
  std::size_t rank_aug = 0;
  std::size_t index_s = 0;

  bool consistent() const { return kind != Kind::Inconsistent; }
  friend bool operator==(const Classification&, const Classification&) = default;
};

enum class Method { Inverse, CoreEp, Method2i, Method2ii };

inline std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::ConsistentUnique: return "ConsistentUnique";
    case Kind::ConsistentInfinite: return "ConsistentInfinite";
    case Kind::Inconsistent: return "Inconsistent";
  }
  return "?";
}

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Inverse: return "inverse";
    case Method::CoreEp: return "core-ep";
    case Method::Method2i: return "method2-i";
    case Method::Method2ii: return "method2-ii";
  }
  return "?";
}

inline std::optional<Kind> kind_from_string(std::string_view s) {
  for (Kind k : {Kind::ConsistentUnique, Kind::ConsistentInfinite, Kind::Inconsistent})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline std::optional<Method> method_from_string(std::string_view s) {
  for (Method m : {Method::Inverse, Method::CoreEp, Method::Method2i, Method::Method2ii})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

struct SolveReport {
  Classification classification;
  Method method = Method::Inverse;
  RealVector crisp_x0;
  RealVector crisp_x1;
  FuzzyVector fuzzy_x;
  std::vector<Verdict> verdicts;
  double residual = 0.0;
  bool is_generalized = false;

  /// Every fuzzy component satisfies the fuzzy-number conditions.
  bool strong() const {
    return std::all_of(verdicts.begin(), verdicts.end(),
                       [](const Verdict& v) { return v.valid(); });
  }
};

inline constexpr std::size_t kDefaultGrid = 11;

// ---- Embedding ----

inline AssociatedSystem build_associated(const FlsProblem& p) {
  p.validate();
  const Eigen::Index n = p.a.rows();
  auto positive = [](double v) { return v > 0.0 ? v : 0.0; };

  AssociatedSystem sys;
  sys.d = p.a.unaryExpr(positive);
  sys.e = (-p.a).unaryExpr(positive);
  sys.s.resize(2 * n, 2 * n);
  sys.s << sys.d, sys.e, sys.e, sys.d;
  sys.y0.resize(2 * n);
  sys.y1.resize(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const FuzzyNumber& f = p.y[static_cast<std::size_t>(i)];
    sys.y0(i) = f.lower.c0;
    sys.y1(i) = f.lower.c1;
    sys.y0(n + i) = -f.upper.c0;
    sys.y1(n + i) = -f.upper.c1;
  }
  return sys;
}

/// Crisp X(r) = x0 + r x1 back to fuzzy components; undoes the sign flip
/// on the upper half.
inline FuzzyVector back_map(const RealVector& x0, const RealVector& x1) {
  const Eigen::Index n = x0.size() / 2;
  FuzzyVector out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = {{x0(i), x1(i)}, {-x0(n + i), -x1(n + i)}};
  }
  return out;
}

/// Inverse of back_map: the crisp (x0, x1) stacking of a fuzzy vector.
inline std::pair<RealVector, RealVector> embed(const FuzzyVector& x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  RealVector x0(2 * n), x1(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const FuzzyNumber& f = x[static_cast<std::size_t>(i)];
    x0(i) = f.lower.c0;
    x1(i) = f.lower.c1;
    x0(n + i) = -f.upper.c0;
    x1(n + i) = -f.upper.c1;
  }
  return {x0, x1};
}

// ---- Classification ----

namespace detail {

inline Classification classify_with(const AssociatedSystem& sys, std::size_t index_s,
                                    const TolerancePolicy& tol) {
  // Y(r) is affine, so it lies in R(S) for every r exactly when both y0 and
  // y1 do: the augmented matrix carries both columns.
  RealMatrix aug(sys.s.rows(), sys.s.cols() + 2);
  aug << sys.s, sys.y0, sys.y1;

  Classification c;
  c.rank_s = rank(sys.s, tol);
  c.rank_aug = std::max(rank(aug, tol), c.rank_s);
  c.index_s = index_s;
  if (c.rank_s < c.rank_aug)
    c.kind = Kind::Inconsistent;
  else if (c.rank_s == static_cast<std::size_t>(sys.s.rows()))
    c.kind = Kind::ConsistentUnique;
  else
    c.kind = Kind::ConsistentInfinite;
  return c;
}

}  // namespace detail

inline Classification classify(const AssociatedSystem& sys, const TolerancePolicy& tol) {
  return detail::classify_with(sys, matrix_index(sys.s, tol), tol);
}

// ---- Block core-EP inverse ----

/// S^⊕ = [[H, Z], [Z, H]] with H = (P + Q)/2, Z = (P - Q)/2,
/// P = (D + E)^⊕ and Q = (D - E)^⊕. Two n x n inverses instead of one 2n x 2n.
inline RealMatrix block_core_ep(const AssociatedSystem& sys, const TolerancePolicy& tol) {
  const RealMatrix p = core_ep_via_formula(sys.d + sys.e, tol);
  const RealMatrix q = core_ep_via_formula(sys.d - sys.e, tol);
  const RealMatrix h = 0.5 * (p + q);
  const RealMatrix z = 0.5 * (p - q);
  RealMatrix out(2 * sys.n(), 2 * sys.n());
  out << h, z, z, h;
  return out;
}

// ---- Residuals ----

/// max over the r-grid of ||S X(r) - Y(r)||_inf.
inline double raw_residual(const AssociatedSystem& sys, const RealVector& x0,
                           const RealVector& x1, std::size_t grid = kDefaultGrid) {
  double worst = 0.0;
  for (double r : r_grid(grid))
    worst = std::max(worst, (sys.s * (x0 + r * x1) - sys.rhs(r)).lpNorm<Eigen::Infinity>());
  return worst;
}

namespace detail {

/// ||S X(r) - S^k (S^k)^{(1,3)} Y(r)||_inf over the grid.
inline double projected_residual(const AssociatedSystem& sys, const IndexInfo& info,
                                 const RealVector& x0, const RealVector& x1,
                                 std::size_t grid) {
  const RealMatrix& sk = info.power_k;
  const RealMatrix proj = sk * pinv_with_rank(sk, info.rank_k());
  double worst = 0.0;
  for (double r : r_grid(grid))
    worst = std::max(worst,
                     (sys.s * (x0 + r * x1) - proj * sys.rhs(r)).lpNorm<Eigen::Infinity>());
  return worst;
}

/// ||(S^k)^T S X(r) - (S^k)^T Y(r)||_inf over the grid.
inline double normal_residual(const AssociatedSystem& sys, const IndexInfo& info,
                              const RealVector& x0, const RealVector& x1,
                              std::size_t grid) {
  const RealMatrix skt = info.power_k.transpose();
  double worst = 0.0;
  for (double r : r_grid(grid))
    worst = std::max(worst,
                     (skt * (sys.s * (x0 + r * x1) - sys.rhs(r))).lpNorm<Eigen::Infinity>());
  return worst;
}

inline double rhs_scale(const AssociatedSystem& sys) {
  return std::max(sys.y0.lpNorm<Eigen::Infinity>(),
                  (sys.y0 + sys.y1).lpNorm<Eigen::Infinity>());
}

}  // namespace detail

// ---- Solve ----

/// Picks and runs a solution method.
///
/// Without an override: a nonsingular S is inverted; a consistent system
/// with Y(r) in R(S^k) is solved exactly by S^⊕ Y; anything else gets the
/// generalized solution S^⊕ Y, verified against the projected system
/// S X = S^k (S^k)^{(1,3)} Y. Forcing `Method2ii` verifies against
/// (S^k)^T S X = (S^k)^T Y instead; the solution itself is the same.
inline SolveReport solve(const FlsProblem& p, const TolerancePolicy& tol,
                         std::optional<Method> method = std::nullopt,
                         std::size_t grid = kDefaultGrid) {
  tol.validate();
  if (grid < 2) throw Error("residual grid needs at least 2 points");
  const AssociatedSystem sys = build_associated(p);
  const detail::IndexInfo info = detail::index_info(sys.s, tol);

  SolveReport rep;
  rep.classification = detail::classify_with(sys, info.k, tol);
  const bool member = detail::in_column_space_with_rank(info.power_k, sys.y0, info.rank_k(), tol) &&
                      detail::in_column_space_with_rank(info.power_k, sys.y1, info.rank_k(), tol);
  const bool exact_core_ep = rep.classification.consistent() && member;

  if (method) {
    rep.method = *method;
  } else if (info.k == 0) {
    rep.method = Method::Inverse;
  } else {
    rep.method = exact_core_ep ? Method::CoreEp : Method::Method2i;
  }

  if (rep.method == Method::Inverse) {
    if (info.k != 0)
      throw IndexNonzero("associated matrix is singular (index " + std::to_string(info.k) +
                         "); the plain inverse does not exist");
    const auto lu = sys.s.partialPivLu();
    rep.crisp_x0 = lu.solve(sys.y0);
    rep.crisp_x1 = lu.solve(sys.y1);
  } else {
    const RealMatrix sp = block_core_ep(sys, tol);
    rep.crisp_x0 = sp * sys.y0;
    rep.crisp_x1 = sp * sys.y1;
  }

  bool must_vanish = true;
  switch (rep.method) {
    case Method::Inverse:
      rep.is_generalized = false;
      rep.residual = raw_residual(sys, rep.crisp_x0, rep.crisp_x1, grid);
      break;
    case Method::CoreEp:
      rep.is_generalized = !exact_core_ep;
      must_vanish = exact_core_ep;
      rep.residual = raw_residual(sys, rep.crisp_x0, rep.crisp_x1, grid);
      break;
    case Method::Method2i:
      rep.is_generalized = true;
      rep.residual = detail::projected_residual(sys, info, rep.crisp_x0, rep.crisp_x1, grid);
      break;
    case Method::Method2ii:
      rep.is_generalized = true;
      rep.residual = detail::normal_residual(sys, info, rep.crisp_x0, rep.crisp_x1, grid);
      break;
  }
  const double bound = tol.residual_tol * std::max(1.0, spectral_norm(sys.s)) *
                       std::max(1.0, detail::rhs_scale(sys));
  if (must_vanish && rep.residual > bound)
    throw NumericalFailure("solution residual " + std::to_string(rep.residual) +
                           " exceeds tolerance for method " +
                           std::string(to_string(rep.method)));

  rep.fuzzy_x = back_map(rep.crisp_x0, rep.crisp_x1);
  for (const FuzzyNumber& f : rep.fuzzy_x) {
    const double mag = std::max({1.0, std::abs(f.lower.c0), std::abs(f.lower.c1),
                                 std::abs(f.upper.c0), std::abs(f.upper.c1)});
    rep.verdicts.push_back(validity(f, tol.equality_tol * mag));
  }
  return rep;
}

/// Direct substitution of the report's X(r) on a uniform grid. Exact
/// solutions are checked against S X = Y, generalized ones against
/// S X = S^k (S^k)^{(1,3)} Y.
inline double verify_solution(const AssociatedSystem& sys, const SolveReport& report,
                              std::size_t grid = kDefaultGrid,
                              const TolerancePolicy& tol = TolerancePolicy::defaults()) {
  if (grid < 2) throw Error("verify_solution: grid needs at least 2 points");
  if (!report.is_generalized) return raw_residual(sys, report.crisp_x0, report.crisp_x1, grid);
  const detail::IndexInfo info = detail::index_info(sys.s, tol);
  return detail::projected_residual(sys, info, report.crisp_x0, report.crisp_x1, grid);
}

}  // namespace fcep
