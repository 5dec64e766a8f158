#pragma once

// Generalized inverses of dense real matrices: numerical rank, Moore-Penrose
// inverse, matrix index, the core-EP decomposition and the core-EP inverse
// (through the decomposition and through the closed-form power formula),
// the core inverse, a {1,3}-inverse and column-space membership.

#include "fcep/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

namespace fcep {

/// A = U [[T, S], [0, N]] U^T with U orthogonal, T nonsingular and N^k = 0.
/// T is upper triangular when every nonzero eigenvalue is real, otherwise
/// upper quasi-triangular (2x2 bumps for conjugate pairs). N is strictly
/// upper triangular.
struct CoreEpDecomposition {
  RealMatrix u;
  RealMatrix t;
  RealMatrix s_block;
  RealMatrix n_block;
  std::size_t k = 0;

  Eigen::Index core_rank() const { return t.rows(); }

  RealMatrix reconstruct() const {
    const Eigen::Index n = u.rows();
    const Eigen::Index rho = t.rows();
    RealMatrix mid = RealMatrix::Zero(n, n);
    mid.topLeftCorner(rho, rho) = t;
    mid.topRightCorner(rho, n - rho) = s_block;
    mid.bottomRightCorner(n - rho, n - rho) = n_block;
    return u * mid * u.transpose();
  }
};

namespace detail {

inline RealVector singular_values(const RealMatrix& m) {
  Eigen::JacobiSVD<RealMatrix> svd(m);
  return svd.singularValues();
}

inline std::size_t count_above(const RealVector& sv, double cutoff) {
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  return r;
}

/// Pseudoinverse keeping exactly the `r` leading singular triplets.
inline RealMatrix pinv_with_rank(const RealMatrix& m, std::size_t r) {
  RealMatrix x = RealMatrix::Zero(m.cols(), m.rows());
  if (r == 0) return x;
  Eigen::JacobiSVD<RealMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalFailure("SVD did not converge");
  const auto& sv = svd.singularValues();
  const auto keep = static_cast<Eigen::Index>(r);
  if (keep > sv.size() || !(sv(keep - 1) > 0.0))
    throw NumericalFailure("pseudoinverse: requested rank exceeds numerical rank");
  for (Eigen::Index i = 0; i < keep; ++i)
    x.noalias() += (svd.matrixV().col(i) / sv(i)) * svd.matrixU().col(i).transpose();
  return x;
}

/// Rank and power data gathered while computing the index. Ranks of powers
/// are measured against ||A||^j so that products which vanish in exact
/// arithmetic are not promoted to full rank by rounding noise.
struct IndexInfo {
  std::size_t k = 0;
  std::vector<std::size_t> ranks;  // ranks[j] = rank(A^j), j = 0..k+1
  RealMatrix power_k;              // A^k
  std::size_t rank_k() const { return ranks[k]; }
};

inline IndexInfo index_info(const RealMatrix& a, const TolerancePolicy& tol) {
  require_square(a, "matrix_index");
  const Eigen::Index n = a.rows();
  const double rel = tol.rank_tol_for(n, n);
  const double norm = spectral_norm(a);

  IndexInfo info;
  info.ranks.push_back(static_cast<std::size_t>(n));
  RealMatrix power = RealMatrix::Identity(n, n);
  double scale = 1.0;
  for (std::size_t k = 0;; ++k) {
    if (k > static_cast<std::size_t>(n))
      throw NumericalFailure("matrix_index: rank sequence did not stabilise within n steps");
    RealMatrix next = power * a;
    scale *= norm;
    info.ranks.push_back(count_above(singular_values(next), rel * scale));
    if (info.ranks[k + 1] == info.ranks[k]) {
      info.k = k;
      info.power_k = std::move(power);
      return info;
    }
    power = std::move(next);
  }
}

inline RealMatrix core_ep_from_info(const RealMatrix& a, const IndexInfo& info) {
  const Eigen::Index n = a.rows();
  if (info.rank_k() == 0) return RealMatrix::Zero(n, n);
  const RealMatrix& ak = info.power_k;
  const RealMatrix inner = ak.transpose() * (ak * a);
  return ak * pinv_with_rank(inner, info.rank_k()) * ak.transpose();
}

using ComplexMatrix = Eigen::MatrixXcd;

/// Flips column signs so each column's largest-magnitude entry is positive.
inline void normalize_signs(RealMatrix& basis) {
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    Eigen::Index at = 0;
    basis.col(j).cwiseAbs().maxCoeff(&at);
    if (basis(at, j) < 0.0) basis.col(j) *= -1.0;
  }
}

/// Exchanges diagonal entries p and p+1 of the upper-triangular `t` by a
/// unitary rotation, accumulating it into `q`.
inline void swap_schur_pair(ComplexMatrix& t, ComplexMatrix& q, Eigen::Index p) {
  using C = std::complex<double>;
  const C x1 = t(p, p + 1);
  const C x2 = t(p + 1, p + 1) - t(p, p);
  const double nrm = std::hypot(std::abs(x1), std::abs(x2));
  if (nrm == 0.0) return;
  const C c = x1 / nrm;
  const C s = x2 / nrm;
  const Eigen::Index n = t.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    const C a = t(p, j), b = t(p + 1, j);
    t(p, j) = std::conj(c) * a + std::conj(s) * b;
    t(p + 1, j) = -s * a + c * b;
  }
  auto rotate_cols = [&](ComplexMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const C a = m(i, p), b = m(i, p + 1);
      m(i, p) = a * c + b * s;
      m(i, p + 1) = -a * std::conj(s) + b * std::conj(c);
    }
  };
  rotate_cols(t);
  rotate_cols(q);
  t(p + 1, p) = 0.0;
}

/// Orthonormal real basis of the conjugation-closed span of the columns of z.
inline RealMatrix realify_basis(const ComplexMatrix& z) {
  const Eigen::Index n = z.rows();
  const Eigen::Index rho = z.cols();
  RealMatrix stacked(n, 2 * rho);
  stacked << z.real(), z.imag();
  Eigen::JacobiSVD<RealMatrix> svd(stacked, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  if (rho < sv.size() && sv(rho) > 1e-6 * sv(0))
    throw NumericalFailure(
        "core_ep_decompose: selected eigenvalues are not closed under conjugation");
  RealMatrix basis = svd.matrixU().leftCols(rho);
  normalize_signs(basis);
  return basis;
}

/// Orthonormal basis of R^m ordered along ker N ⊂ ker N^2 ⊂ ... so that the
/// similarity transform of the nilpotent `n` is strictly upper triangular.
/// `kernel_dims[j-1]` is dim ker N^j.
inline RealMatrix kernel_flag_basis(const RealMatrix& n,
                                    const std::vector<std::size_t>& kernel_dims) {
  const Eigen::Index m = n.rows();
  RealMatrix basis(m, 0);
  RealMatrix power = RealMatrix::Identity(m, m);
  for (std::size_t dim : kernel_dims) {
    power = power * n;
    const auto want = static_cast<Eigen::Index>(dim);
    const Eigen::Index have = basis.cols();
    if (want <= have) continue;
    Eigen::JacobiSVD<RealMatrix> svd(power, Eigen::ComputeFullV);
    RealMatrix kernel = svd.matrixV().rightCols(want);
    kernel -= basis * (basis.transpose() * kernel);
    Eigen::JacobiSVD<RealMatrix> fresh(kernel, Eigen::ComputeThinU);
    RealMatrix grown(m, want);
    grown << basis, fresh.matrixU().leftCols(want - have);
    basis = std::move(grown);
  }
  if (basis.cols() != m)
    throw NumericalFailure("core_ep_decompose: nilpotent part has inconsistent kernel chain");
  normalize_signs(basis);
  return basis;
}

}  // namespace detail

/// Number of singular values above rank_rel_tol * sigma_max.
inline std::size_t rank(const RealMatrix& m, const TolerancePolicy& tol) {
  require_valid(m, "rank");
  const RealVector sv = detail::singular_values(m);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  return detail::count_above(sv, tol.rank_tol_for(m.rows(), m.cols()) * sv(0));
}

inline RealMatrix moore_penrose(const RealMatrix& m, const TolerancePolicy& tol) {
  return detail::pinv_with_rank(m, rank(m, tol));
}

/// m^k by repeated squaring; m^0 = I.
inline RealMatrix matrix_power(const RealMatrix& m, std::size_t k) {
  require_square(m, "matrix_power");
  RealMatrix result = RealMatrix::Identity(m.rows(), m.cols());
  RealMatrix base = m;
  while (k > 0) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k > 0) base = base * base;
  }
  return result;
}

/// Smallest k >= 0 with rank(m^{k+1}) = rank(m^k).
inline std::size_t matrix_index(const RealMatrix& m, const TolerancePolicy& tol) {
  return detail::index_info(m, tol).k;
}

/// Core-EP decomposition via a complex Schur form whose rank(A^k) largest
/// eigenvalues are rotated to the leading block, then brought back to real
/// arithmetic on the resulting invariant subspace.
inline CoreEpDecomposition core_ep_decompose(const RealMatrix& a, const TolerancePolicy& tol) {
  const detail::IndexInfo info = detail::index_info(a, tol);
  const Eigen::Index n = a.rows();
  const auto rho = static_cast<Eigen::Index>(info.rank_k());
  const double cutoff = tol.rank_tol_for(n, n) * spectral_norm(a);

  RealMatrix u1(n, 0);
  if (rho > 0) {
    Eigen::ComplexSchur<RealMatrix> schur(a);
    if (schur.info() != Eigen::Success)
      throw NumericalFailure("core_ep_decompose: Schur iteration did not converge");
    detail::ComplexMatrix t = schur.matrixT();
    detail::ComplexMatrix q = schur.matrixU();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
      return std::abs(t(i, i)) > std::abs(t(j, j));
    });
    std::vector<bool> keep(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < rho; ++i) keep[static_cast<std::size_t>(order[i])] = true;

    const double smallest_kept = std::abs(t(order[rho - 1], order[rho - 1]));
    const double largest_dropped = rho < n ? std::abs(t(order[rho], order[rho])) : 0.0;
    if (!(smallest_kept > cutoff) || !(smallest_kept > largest_dropped))
      throw NumericalFailure(
          "core_ep_decompose: cannot separate nonzero from zero eigenvalues");

    // Bubble kept eigenvalues to the front, preserving their relative order.
    Eigen::Index front = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!keep[static_cast<std::size_t>(i)]) continue;
      for (Eigen::Index p = i; p > front; --p) detail::swap_schur_pair(t, q, p - 1);
      ++front;
    }
    u1 = detail::realify_basis(q.leftCols(rho));
  }

  RealMatrix u2;
  if (rho == 0) {
    u2 = RealMatrix::Identity(n, n);
  } else {
    Eigen::HouseholderQR<RealMatrix> qr(u1);
    const RealMatrix full = qr.householderQ() * RealMatrix::Identity(n, n);
    u2 = full.rightCols(n - rho);
  }

  CoreEpDecomposition dec;
  dec.k = info.k;

  if (rho > 0) {
    const RealMatrix t0 = u1.transpose() * a * u1;
    Eigen::RealSchur<RealMatrix> rs(t0);
    if (rs.info() != Eigen::Success)
      throw NumericalFailure("core_ep_decompose: real Schur of the core block failed");
    u1 = u1 * rs.matrixU();
    dec.t = rs.matrixT();
    const RealVector sv = detail::singular_values(dec.t);
    if (!(sv(sv.size() - 1) > cutoff))
      throw NumericalFailure("core_ep_decompose: core block is numerically singular");
  } else {
    dec.t = RealMatrix(0, 0);
  }

  if (rho < n) {
    const RealMatrix n0 = u2.transpose() * a * u2;
    std::vector<std::size_t> kernel_dims;
    for (std::size_t j = 1; j <= info.k; ++j)
      kernel_dims.push_back(static_cast<std::size_t>(n) - info.ranks[j]);
    const RealMatrix w = detail::kernel_flag_basis(n0, kernel_dims);
    u2 = u2 * w;
    dec.n_block = u2.transpose() * a * u2;
  } else {
    dec.n_block = RealMatrix(0, 0);
  }

  dec.u.resize(n, n);
  dec.u << u1, u2;
  dec.s_block = u1.transpose() * a * u2;
  return dec;
}

/// U [[T^-1, 0], [0, 0]] U^T.
inline RealMatrix core_ep_via_decomposition(const RealMatrix& a, const TolerancePolicy& tol) {
  const CoreEpDecomposition dec = core_ep_decompose(a, tol);
  const Eigen::Index rho = dec.core_rank();
  if (rho == 0) return RealMatrix::Zero(a.rows(), a.cols());
  const auto u1 = dec.u.leftCols(rho);
  return u1 * dec.t.partialPivLu().solve(RealMatrix(u1.transpose()));
}

/// A^k [(A^T)^k A^{k+1}]^+ (A^T)^k, the default all-real route.
inline RealMatrix core_ep_via_formula(const RealMatrix& a, const TolerancePolicy& tol) {
  return detail::core_ep_from_info(a, detail::index_info(a, tol));
}

/// Core inverse; defined only for index <= 1, where it equals the core-EP inverse.
inline RealMatrix core_inverse(const RealMatrix& a, const TolerancePolicy& tol) {
  const detail::IndexInfo info = detail::index_info(a, tol);
  if (info.k > 1)
    throw IndexTooLarge("core inverse requires index <= 1, matrix has index " +
                        std::to_string(info.k));
  RealMatrix x = detail::core_ep_from_info(a, info);
  const double bound = tol.equality_tol * (1.0 + spectral_norm(a));
  if ((a * x * a - a).norm() > bound)
    throw NumericalFailure("core inverse failed the A X A = A check");
  return x;
}

/// A {1,3}-inverse (satisfies A X A = A and (A X)^T = A X); the
/// Moore-Penrose inverse is used.
inline RealMatrix one_three_inverse(const RealMatrix& m, const TolerancePolicy& tol) {
  return moore_penrose(m, tol);
}

namespace detail {

inline double column_space_residual(const RealMatrix& m, const RealVector& y,
                                    std::size_t r) {
  const RealVector z = pinv_with_rank(m, r) * y;
  return (m * z - y).norm();
}

inline bool in_column_space_with_rank(const RealMatrix& m, const RealVector& y,
                                      std::size_t r, const TolerancePolicy& tol) {
  return column_space_residual(m, y, r) <= tol.residual_tol * std::max(1.0, y.norm());
}

}  // namespace detail

inline bool in_column_space(const RealMatrix& m, const RealVector& y,
                            const TolerancePolicy& tol) {
  require_valid(m, "in_column_space");
  if (y.size() != m.rows())
    throw DimensionMismatch("in_column_space: vector length " + std::to_string(y.size()) +
                            " does not match " + std::to_string(m.rows()) + " rows");
  return detail::in_column_space_with_rank(m, y, rank(m, tol), tol);
}

}  // namespace fcep
