#pragma once

#include "amm/linalg.hpp"
#include "amm/sparse.hpp"
#include "amm/spm.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace amm {

/// Number of power iterations used at the i-th flush (1-based).
class QSchedule {
 public:
  /// Constant q; the experiments use 5.
  static QSchedule fixed(std::size_t q = 5);

  /// q_i = max(1, ceil(c_q * log2(m * dx * 2 i^2 / delta_fail) / epsilon)).
  static QSchedule theoretical(double epsilon, double delta_fail, double c_q = 1.0);

  std::size_t q_for(std::size_t flush_index, std::size_t m, std::size_t dx) const;

  bool is_fixed() const { return fixed_; }
  std::size_t fixed_q() const { return q_; }
  double epsilon() const { return epsilon_; }
  double delta_fail() const { return delta_fail_; }
  double c_q() const { return c_q_; }

 private:
  QSchedule() = default;
  bool fixed_ = true;
  std::size_t q_ = 5;
  double epsilon_ = 0.0;
  double delta_fail_ = 0.0;
  double c_q_ = 1.0;
};

enum class FlushDiagnostics {
  none,
  summary,  ///< per-flush scalars
  retain,   ///< also copies of the buffers and compressed factors (desk scale only)
};

struct FlushRecord {
  std::size_t index = 0;  ///< 1-based
  std::size_t rows = 0;
  std::size_t nnz = 0;
  std::size_t q = 0;
  std::size_t basis_rank = 0;  ///< columns of Z
  double shrink_delta = 0.0;
  double buffer_frob_product = 0.0;      ///< ||X'||_F ||Y'||_F
  double compressed_frob_product = 0.0;  ///< ||X~||_F ||Y~||_F
  Vector shrunk;                         ///< all shrunk values before truncation to m rows

  // retain only
  std::optional<SparseMatrix> x_buf;
  std::optional<SparseMatrix> y_buf;
  DenseMatrix z;
  DenseMatrix x_tilde;
  DenseMatrix y_tilde;
};

struct ScodResult {
  DenseMatrix a;  ///< m x dx
  DenseMatrix b;  ///< m x dy
  double delta_sum = 0.0;
  std::size_t flush_count = 0;
};

/// Sparse Co-occurring Directions.
///
/// Row pairs accumulate in sparse buffers X', Y'. When nnz(X') + nnz(Y') > m (dx + dy) or the
/// buffers reach dx + dy rows, the buffered product X'^T Y' is compressed to rank <= m with the
/// subspace power method and a balanced split, stacked under the m-row core (A, B) and merged
/// with one co-occurring shrink step.
///
/// In symmetric mode the sketch consumes a single stream Z and behaves exactly like
/// ScodSketch(Z, Z) while storing one buffer.
class ScodSketch {
 public:
  ScodSketch(std::size_t m, std::size_t dx, std::size_t dy, QSchedule schedule = QSchedule::fixed(),
             std::uint64_t seed = 0, FlushDiagnostics diagnostics = FlushDiagnostics::none);

  static ScodSketch symmetric(std::size_t m, std::size_t d, QSchedule schedule = QSchedule::fixed(),
                              std::uint64_t seed = 0,
                              FlushDiagnostics diagnostics = FlushDiagnostics::none);

  void update(const SparseRowView& x, const SparseRowView& y);
  /// Symmetric mode only.
  void update(const SparseRowView& z);

  /// Compresses and merges the buffers; no-op when they are empty.
  void flush();

  /// Flushes any pending rows and returns the compact factors.
  ScodResult finalize();

  const DenseMatrix& a() const { return a_; }
  const DenseMatrix& b() const { return b_; }
  double delta_sum() const { return delta_sum_; }
  std::size_t flush_count() const { return flushes_; }
  std::size_t buffered_rows() const { return x_buf_.rows(); }
  std::size_t buffered_nnz() const;
  const std::vector<FlushRecord>& flush_log() const { return log_; }

  std::size_t m() const { return m_; }
  std::size_t dx() const { return dx_; }
  std::size_t dy() const { return dy_; }
  bool is_symmetric() const { return symmetric_; }
  const QSchedule& schedule() const { return schedule_; }
  std::uint64_t seed() const { return seed_; }

 private:
  void maybe_flush();
  const SparseMatrix& y_side() const { return symmetric_ ? x_buf_.matrix() : y_buf_.matrix(); }

  std::size_t m_;
  std::size_t dx_;
  std::size_t dy_;
  QSchedule schedule_;
  std::uint64_t seed_;
  FlushDiagnostics diagnostics_;
  bool symmetric_ = false;
  DenseMatrix a_;
  DenseMatrix b_;
  SparseRowBuffer x_buf_;
  SparseRowBuffer y_buf_;
  std::size_t flushes_ = 0;
  double delta_sum_ = 0.0;
  std::vector<FlushRecord> log_;
};

}  // namespace amm
