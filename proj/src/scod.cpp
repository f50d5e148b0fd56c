#include "amm/scod.hpp"

#include "amm/cod.hpp"
#include "amm/errors.hpp"
#include "amm/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace amm {

QSchedule QSchedule::fixed(std::size_t q) {
  if (q == 0) throw ParameterError("q schedule: fixed q must be >= 1");
  QSchedule s;
  s.fixed_ = true;
  s.q_ = q;
  return s;
}

QSchedule QSchedule::theoretical(double epsilon, double delta_fail, double c_q) {
  if (!(epsilon > 0.0)) throw ParameterError("q schedule: epsilon must be > 0");
  if (!(delta_fail > 0.0 && delta_fail < 1.0)) throw ParameterError("q schedule: delta_fail must be in (0, 1)");
  if (!(c_q > 0.0)) throw ParameterError("q schedule: c_q must be > 0");
  QSchedule s;
  s.fixed_ = false;
  s.q_ = 0;
  s.epsilon_ = epsilon;
  s.delta_fail_ = delta_fail;
  s.c_q_ = c_q;
  return s;
}

std::size_t QSchedule::q_for(std::size_t flush_index, std::size_t m, std::size_t dx) const {
  if (fixed_) return q_;
  const double i = static_cast<double>(flush_index);
  const double arg = static_cast<double>(m) * static_cast<double>(dx) * 2.0 * i * i / delta_fail_;
  const double q = std::ceil(c_q_ * std::log2(arg) / epsilon_);
  return q < 1.0 ? 1 : static_cast<std::size_t>(q);
}

ScodSketch::ScodSketch(std::size_t m, std::size_t dx, std::size_t dy, QSchedule schedule,
                       std::uint64_t seed, FlushDiagnostics diagnostics)
    : m_(m), dx_(dx), dy_(dy), schedule_(schedule), seed_(seed), diagnostics_(diagnostics),
      x_buf_(dx), y_buf_(dy) {
  if (m == 0 || dx == 0 || dy == 0) throw ParameterError("scod: m, dx and dy must be >= 1");
  a_ = DenseMatrix::Zero(static_cast<Index>(m), static_cast<Index>(dx));
  b_ = DenseMatrix::Zero(static_cast<Index>(m), static_cast<Index>(dy));
}

ScodSketch ScodSketch::symmetric(std::size_t m, std::size_t d, QSchedule schedule, std::uint64_t seed,
                                 FlushDiagnostics diagnostics) {
  ScodSketch s(m, d, d, schedule, seed, diagnostics);
  s.symmetric_ = true;
  return s;
}

std::size_t ScodSketch::buffered_nnz() const {
  return symmetric_ ? 2 * x_buf_.nnz() : x_buf_.nnz() + y_buf_.nnz();
}

void ScodSketch::update(const SparseRowView& x, const SparseRowView& y) {
  if (symmetric_) throw ParameterError("scod: symmetric sketch takes a single row");
  if (x.dim != dx_ || y.dim != dy_) {
    throw DimensionError("scod: row lengths (" + std::to_string(x.dim) + ", " + std::to_string(y.dim) +
                         ") != (" + std::to_string(dx_) + ", " + std::to_string(dy_) + ")");
  }
  x_buf_.append_row(x);
  y_buf_.append_row(y);
  maybe_flush();
}

void ScodSketch::update(const SparseRowView& z) {
  if (!symmetric_) throw ParameterError("scod: paired sketch needs two rows");
  if (z.dim != dx_) {
    throw DimensionError("scod: row length " + std::to_string(z.dim) + " != " + std::to_string(dx_));
  }
  x_buf_.append_row(z);
  maybe_flush();
}

void ScodSketch::maybe_flush() {
  if (buffered_nnz() > m_ * (dx_ + dy_) || x_buf_.rows() == dx_ + dy_) flush();
}

void ScodSketch::flush() {
  if (x_buf_.rows() == 0) return;
  const std::size_t index = flushes_ + 1;
  const SparseMatrix& xb = x_buf_.matrix();
  const SparseMatrix& yb = y_side();

  try {
    SpmConfig spm;
    spm.target_rank = m_;
    spm.power_iterations = schedule_.q_for(index, m_, dx_);
    spm.seed = derive_seed(seed_, index);
    const DenseMatrix z = subspace_power_method(xb, yb, spm);
    BalancedPair pair = balance_split(z, xb, yb);

    DenseMatrix stacked_a(a_.rows() + pair.x_tilde.rows(), a_.cols());
    stacked_a << a_, pair.x_tilde;
    DenseMatrix stacked_b(b_.rows() + pair.y_tilde.rows(), b_.cols());
    stacked_b << b_, pair.y_tilde;
    const CoCompaction c = co_compact(stacked_a, stacked_b, m_);

    // delta = sigma_m, so every shrunk value from index m on is zero and dropping those rows is exact.
    const Index keep = std::min<Index>(static_cast<Index>(m_), c.a.rows());
    a_.setZero();
    b_.setZero();
    a_.topRows(keep) = c.a.topRows(keep);
    b_.topRows(keep) = c.b.topRows(keep);
    delta_sum_ += c.delta;

    if (diagnostics_ != FlushDiagnostics::none) {
      FlushRecord rec;
      rec.index = index;
      rec.rows = xb.rows();
      rec.nnz = buffered_nnz();
      rec.q = spm.power_iterations;
      rec.basis_rank = static_cast<std::size_t>(z.cols());
      rec.shrink_delta = c.delta;
      rec.buffer_frob_product = xb.frobenius_norm() * yb.frobenius_norm();
      rec.compressed_frob_product = pair.x_tilde.norm() * pair.y_tilde.norm();
      rec.shrunk = c.shrunk;
      if (diagnostics_ == FlushDiagnostics::retain) {
        rec.x_buf = xb;
        rec.y_buf = yb;
        rec.z = z;
        rec.x_tilde = std::move(pair.x_tilde);
        rec.y_tilde = std::move(pair.y_tilde);
      }
      log_.push_back(std::move(rec));
    }
  } catch (const KernelError& e) {
    throw KernelError("scod flush " + std::to_string(index) + ": " + e.what());
  }

  flushes_ = index;
  x_buf_.clear();
  y_buf_.clear();
}

ScodResult ScodSketch::finalize() {
  flush();
  return {a_, b_, delta_sum_, flushes_};
}

}  // namespace amm
