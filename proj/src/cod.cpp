#include "amm/cod.hpp"

#include "amm/errors.hpp"

#include <algorithm>
#include <string>

namespace amm {

namespace {

// Orthonormal-times-coefficient factorization of m^T. When m^T is wide the identity basis
// already spans everything.
QrResult factor_transpose(const DenseMatrix& m) {
  if (m.cols() >= m.rows()) return thin_qr(m.transpose());
  return {DenseMatrix::Identity(m.cols(), m.cols()), m.transpose()};
}

template <typename Row>
void write_sparse(Row&& dst, const SparseRowView& row) {
  dst.setZero();
  for (std::size_t k = 0; k < row.nnz(); ++k) dst(row.indices[k]) = row.values[k];
}

}  // namespace

CoCompaction co_compact(const DenseMatrix& a, const DenseMatrix& b, std::size_t delta_rank) {
  if (a.rows() != b.rows()) throw DimensionError("co_compact: factor row counts differ");
  const QrResult qx = factor_transpose(a);
  const QrResult qy = factor_transpose(b);
  const SvdResult svd = thin_svd(qx.r * qy.r.transpose());

  CoCompaction out;
  const Vector& sigma = svd.singular_values;
  const Index k = static_cast<Index>(delta_rank);
  out.delta = (k >= 1 && sigma.size() >= k) ? sigma(k - 1) : 0.0;
  out.shrunk = shrink_values(sigma, out.delta);
  const Vector root = out.shrunk.cwiseSqrt();
  out.a = root.asDiagonal() * (qx.q * svd.u).transpose();
  out.b = root.asDiagonal() * (qy.q * svd.v).transpose();
  return out;
}

CoOccurringDirections::CoOccurringDirections(std::size_t m, std::size_t dx, std::size_t dy,
                                             CodOptions options)
    : m_(m), dx_(dx), dy_(dy), options_(options) {
  if (m == 0 || dx == 0 || dy == 0) {
    throw ParameterError("co-occurring directions: m, dx and dy must be >= 1");
  }
  if (options_.delta_rank == 0) options_.delta_rank = m;
  a_ = DenseMatrix::Zero(static_cast<Index>(2 * m), static_cast<Index>(dx));
  b_ = DenseMatrix::Zero(static_cast<Index>(2 * m), static_cast<Index>(dy));
}

void CoOccurringDirections::update(std::span<const double> x, std::span<const double> y) {
  if (x.size() != dx_ || y.size() != dy_) {
    throw DimensionError("co-occurring directions: row lengths (" + std::to_string(x.size()) +
                         ", " + std::to_string(y.size()) + ") != (" + std::to_string(dx_) + ", " +
                         std::to_string(dy_) + ")");
  }
  require_finite(x, "co-occurring directions");
  require_finite(y, "co-occurring directions");
  const Index slot = static_cast<Index>(fill_);
  a_.row(slot) = Eigen::Map<const Vector>(x.data(), x.size()).transpose();
  b_.row(slot) = Eigen::Map<const Vector>(y.data(), y.size()).transpose();
  after_insert();
}

void CoOccurringDirections::update(const SparseRowView& x, const SparseRowView& y) {
  if (x.dim != dx_ || y.dim != dy_) {
    throw DimensionError("co-occurring directions: row lengths (" + std::to_string(x.dim) + ", " +
                         std::to_string(y.dim) + ") != (" + std::to_string(dx_) + ", " +
                         std::to_string(dy_) + ")");
  }
  require_finite(x.values, "co-occurring directions");
  require_finite(y.values, "co-occurring directions");
  const Index slot = static_cast<Index>(fill_);
  write_sparse(a_.row(slot), x);
  write_sparse(b_.row(slot), y);
  after_insert();
}

void CoOccurringDirections::after_insert() {
  ++rows_seen_;
  ++fill_;
  if (fill_ == 2 * m_) compact();
}

void CoOccurringDirections::compact() {
  const CoCompaction c = co_compact(a_, b_, options_.delta_rank);
  const Index rows = std::min<Index>(c.a.rows(), a_.rows());
  a_.setZero();
  b_.setZero();
  a_.topRows(rows) = c.a.topRows(rows);
  b_.topRows(rows) = c.b.topRows(rows);
  // With delta = sigma_m every row from index m-1 on is zero.
  fill_ = m_ - 1;
  delta_sum_ += c.delta;
  if (options_.keep_delta_log) delta_log_.push_back(c.delta);
  ++compactions_;
}

}  // namespace amm
