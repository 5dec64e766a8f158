#pragma once

// Parametric fuzzy numbers whose endpoint functions are affine in r on [0,1].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace fcep {

/// c0 + c1 * r for r in [0, 1].
struct AffineFn {
  double c0 = 0.0;
  double c1 = 0.0;

  constexpr double operator()(double r) const { return c0 + c1 * r; }

  friend constexpr AffineFn operator+(AffineFn a, AffineFn b) { return {a.c0 + b.c0, a.c1 + b.c1}; }
  friend constexpr AffineFn operator*(double s, AffineFn a) { return {s * a.c0, s * a.c1}; }
  friend constexpr bool operator==(AffineFn, AffineFn) = default;
};

/// (lower, upper) endpoint pair. Invalid pairs are representable; see validity().
struct FuzzyNumber {
  AffineFn lower;
  AffineFn upper;

  friend constexpr bool operator==(const FuzzyNumber&, const FuzzyNumber&) = default;
};

using FuzzyVector = std::vector<FuzzyNumber>;

inline constexpr FuzzyNumber add(const FuzzyNumber& a, const FuzzyNumber& b) {
  return {a.lower + b.lower, a.upper + b.upper};
}

/// Negative scalars swap the endpoints.
inline constexpr FuzzyNumber scalar_mul(double lambda, const FuzzyNumber& a) {
  if (lambda >= 0.0) return {lambda * a.lower, lambda * a.upper};
  return {lambda * a.upper, lambda * a.lower};
}

inline bool fuzzy_eq(const FuzzyNumber& a, const FuzzyNumber& b, double tol) {
  return std::abs(a.lower.c0 - b.lower.c0) <= tol && std::abs(a.lower.c1 - b.lower.c1) <= tol &&
         std::abs(a.upper.c0 - b.upper.c0) <= tol && std::abs(a.upper.c1 - b.upper.c1) <= tol;
}

// ---- Validity ----

enum class Clause : int {
  LowerNondecreasing = 1,
  UpperNonincreasing = 2,
  Ordered = 3,
};

struct Verdict {
  std::vector<Clause> violated;
  // Which endpoints break the ordering clause, when it is violated.
  bool ordered_fails_at_0 = false;
  bool ordered_fails_at_1 = false;

  bool valid() const { return violated.empty(); }
  bool violates(Clause c) const {
    return std::find(violated.begin(), violated.end(), c) != violated.end();
  }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Checks monotonicity of both endpoints and lower <= upper at r = 0 and
/// r = 1. `slack` absorbs rounding in computed coefficients.
inline Verdict validity(const FuzzyNumber& a, double slack = 0.0) {
  Verdict v;
  if (a.lower.c1 < -slack) v.violated.push_back(Clause::LowerNondecreasing);
  if (a.upper.c1 > slack) v.violated.push_back(Clause::UpperNonincreasing);
  v.ordered_fails_at_0 = a.lower(0.0) > a.upper(0.0) + slack;
  v.ordered_fails_at_1 = a.lower(1.0) > a.upper(1.0) + slack;
  if (v.ordered_fails_at_0 || v.ordered_fails_at_1) v.violated.push_back(Clause::Ordered);
  return v;
}

/// Uniform grid of `points` values of r in [0, 1] (points >= 2).
inline std::vector<double> r_grid(std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

struct FuzzySample {
  double r;
  double lower;
  double upper;
};

/// Endpoint values on an r-grid, for display.
inline std::vector<FuzzySample> sample(const FuzzyNumber& a, std::size_t points) {
  std::vector<FuzzySample> out;
  for (double r : r_grid(points)) out.push_back({r, a.lower(r), a.upper(r)});
  return out;
}

}  // namespace fcep
