#pragma once

#include "amm/linalg.hpp"
#include "amm/sparse.hpp"

#include <cstddef>
#include <cstdint>

namespace amm {

struct SpmConfig {
  std::size_t target_rank = 1;
  std::size_t power_iterations = 5;
  std::uint64_t seed = 0;
  /// Orthonormalize after every application of M or M^T.
  bool reorthonormalize = true;

  void validate() const;
};

/// Orthonormal basis Z (dx x m', m' <= m) for the range of (M M^T)^q M G, where
/// M = x_buf^T y_buf is applied only through sparse products and G is a seeded dy x m Gaussian.
DenseMatrix subspace_power_method(const SparseMatrix& x_buf, const SparseMatrix& y_buf,
                                  const SpmConfig& config);

/// Low-rank factors with x_tilde^T y_tilde = Z Z^T x_buf^T y_buf and equal singular values on
/// both sides.
struct BalancedPair {
  DenseMatrix x_tilde;  ///< m' x dx
  DenseMatrix y_tilde;  ///< m' x dy
};

/// SVD of W = Z^T x_buf^T y_buf = U S V^T, then x_tilde = S^{1/2} U^T Z^T, y_tilde = S^{1/2} V^T.
BalancedPair balance_split(const DenseMatrix& z, const SparseMatrix& x_buf, const SparseMatrix& y_buf);

/// dy x m standard normal matrix drawn from a counter-based stream.
DenseMatrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed);

}  // namespace amm
