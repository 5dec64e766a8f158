#pragma once

// Shared vocabulary for the fcep library: matrix aliases, the tolerance
// policy and the exception hierarchy used by every module.

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace fcep {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// ---- Errors ----

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SVD/Schur breakdown or a tolerance inconsistency the algorithms cannot
/// resolve (e.g. eigenvalues that cannot be split into zero and nonzero).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised by the core inverse on matrices of index greater than one.
class IndexTooLarge : public Error {
 public:
  using Error::Error;
};

/// Raised when the plain inverse is requested for a singular matrix.
class IndexNonzero : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// ---- Tolerances ----

/// Numerical cutoffs. `rank_rel_tol` left unset means "automatic":
/// max(rows, cols) * machine epsilon for the matrix being ranked.
struct TolerancePolicy {
  std::optional<double> rank_rel_tol;
  double residual_tol = 1e-9;
  double equality_tol = 1e-9;

  static TolerancePolicy defaults() { return {}; }

  double rank_tol_for(Eigen::Index rows, Eigen::Index cols) const {
    if (rank_rel_tol) return *rank_rel_tol;
    return static_cast<double>(std::max(rows, cols)) *
           std::numeric_limits<double>::epsilon();
  }

  void validate() const {
    auto ok = [](double v) { return v > 0.0 && v < 1.0; };
    if (rank_rel_tol && !ok(*rank_rel_tol))
      throw Error("rank_rel_tol must lie in (0, 1)");
    if (!ok(residual_tol)) throw Error("residual_tol must lie in (0, 1)");
    if (!ok(equality_tol)) throw Error("equality_tol must lie in (0, 1)");
  }
};

// ---- Validation helpers ----

inline void require_valid(const RealMatrix& m, const char* what) {
  if (m.rows() < 1 || m.cols() < 1)
    throw DimensionMismatch(std::string(what) + ": matrix must be non-empty");
  if (!m.allFinite())
    throw NumericalFailure(std::string(what) + ": matrix has non-finite entries");
}

inline void require_square(const RealMatrix& m, const char* what) {
  require_valid(m, what);
  if (m.rows() != m.cols())
    throw DimensionMismatch(std::string(what) + ": matrix must be square, got " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
}

/// Largest singular value.
inline double spectral_norm(const RealMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<RealMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace fcep
