#pragma once

#include "amm/linalg.hpp"
#include "amm/sparse.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace amm {

/// Result of one co-occurring shrink step on stacked factors.
struct CoCompaction {
  DenseMatrix a;   ///< r x dx, rows sorted by shrunk value (zero rows trail)
  DenseMatrix b;   ///< r x dy
  Vector shrunk;   ///< max(sigma - delta, 0), length r
  double delta = 0.0;
};

/// QR of a^T and b^T, SVD of R_x R_y^T, subtract delta = sigma_{delta_rank} and split the
/// result evenly: a <- Sigma_hat^{1/2} U^T Q_x^T, b <- Sigma_hat^{1/2} V^T Q_y^T.
/// Afterwards a^T b equals the shrunk a^T b of the inputs.
CoCompaction co_compact(const DenseMatrix& a, const DenseMatrix& b, std::size_t delta_rank);

struct CodOptions {
  /// 1-based index of the singular value used as the shrink threshold; 0 means m.
  /// Any other value breaks the free-slot invariant and is only used by mutation tests.
  std::size_t delta_rank = 0;
  bool keep_delta_log = false;
};

struct CodResult {
  DenseMatrix a;
  DenseMatrix b;
  double delta_sum = 0.0;
};

/// Co-occurring Directions: paired sketch (A: 2m x dx, B: 2m x dy) with A^T B ~ X^T Y.
///
/// Row pairs share one slot counter. When all 2m slots are filled the pair is compacted with
/// co_compact; at most m-1 rows survive, so slots [m-1, 2m) become free.
class CoOccurringDirections {
 public:
  CoOccurringDirections(std::size_t m, std::size_t dx, std::size_t dy, CodOptions options = {});

  void update(std::span<const double> x, std::span<const double> y);
  void update(const SparseRowView& x, const SparseRowView& y);

  /// Compacts immediately regardless of how many slots are filled.
  void compact();

  const DenseMatrix& a() const { return a_; }
  const DenseMatrix& b() const { return b_; }
  double delta_sum() const { return delta_sum_; }
  const std::vector<double>& delta_log() const { return delta_log_; }
  CodResult finalize() const { return {a_, b_, delta_sum_}; }

  std::size_t m() const { return m_; }
  std::size_t dx() const { return dx_; }
  std::size_t dy() const { return dy_; }
  std::size_t rows_seen() const { return rows_seen_; }
  std::size_t compactions() const { return compactions_; }
  std::size_t filled() const { return fill_; }

 private:
  void after_insert();

  std::size_t m_;
  std::size_t dx_;
  std::size_t dy_;
  CodOptions options_;
  DenseMatrix a_;
  DenseMatrix b_;
  std::size_t fill_ = 0;
  std::size_t rows_seen_ = 0;
  std::size_t compactions_ = 0;
  double delta_sum_ = 0.0;
  std::vector<double> delta_log_;
};

}  // namespace amm
