#pragma once

#include "amm/linalg.hpp"
#include "amm/sparse.hpp"

#include <cstddef>
#include <span>

namespace amm {

struct FdOptions {
  /// Subtract sigma_m^2 from the squared spectrum at each compaction. Turning this off keeps the
  /// top m-1 directions unshrunk and exists only so the test suite can show the bound breaking.
  bool shrink = true;
};

/// Frequent Directions covariance sketch: A (2m x d) with A^T A ~ X^T X.
///
/// Rows are written into free slots; once the 2m-th slot fills the sketch is compacted
/// (SVD, subtract sigma_m^2, A <- Sigma_hat V^T), after which rows m-1..2m-1 are zero and free.
class FrequentDirections {
 public:
  FrequentDirections(std::size_t m, std::size_t d, FdOptions options = {});

  void update(std::span<const double> row);
  void update(const SparseRowView& row);

  /// Current 2m x d sketch; no compaction is forced.
  const DenseMatrix& sketch() const { return a_; }
  DenseMatrix finalize() const { return a_; }

  std::size_t m() const { return m_; }
  std::size_t dim() const { return d_; }
  std::size_t rows_seen() const { return rows_seen_; }
  std::size_t compactions() const { return compactions_; }
  /// Number of occupied slots; slots [filled(), 2m) are zero.
  std::size_t filled() const { return fill_; }

 private:
  void after_insert();
  void compact();

  std::size_t m_;
  std::size_t d_;
  FdOptions options_;
  DenseMatrix a_;
  std::size_t fill_ = 0;
  std::size_t rows_seen_ = 0;
  std::size_t compactions_ = 0;
};

}  // namespace amm
