#include "amm/fd.hpp"

#include "amm/errors.hpp"

#include <cmath>
#include <string>

namespace amm {

FrequentDirections::FrequentDirections(std::size_t m, std::size_t d, FdOptions options)
    : m_(m), d_(d), options_(options) {
  if (m == 0 || d == 0) throw ParameterError("frequent directions: m and d must be >= 1");
  a_ = DenseMatrix::Zero(static_cast<Index>(2 * m), static_cast<Index>(d));
}

void FrequentDirections::update(std::span<const double> row) {
  if (row.size() != d_) {
    throw DimensionError("frequent directions: row length " + std::to_string(row.size()) +
                         " != " + std::to_string(d_));
  }
  require_finite(row, "frequent directions");
  a_.row(static_cast<Index>(fill_)) = Eigen::Map<const Vector>(row.data(), row.size()).transpose();
  after_insert();
}

void FrequentDirections::update(const SparseRowView& row) {
  if (row.dim != d_) {
    throw DimensionError("frequent directions: row length " + std::to_string(row.dim) + " != " +
                         std::to_string(d_));
  }
  require_finite(row.values, "frequent directions");
  auto dst = a_.row(static_cast<Index>(fill_));
  dst.setZero();
  for (std::size_t k = 0; k < row.nnz(); ++k) dst(row.indices[k]) = row.values[k];
  after_insert();
}

void FrequentDirections::after_insert() {
  ++rows_seen_;
  ++fill_;
  if (fill_ == 2 * m_) compact();
}

void FrequentDirections::compact() {
  const SvdResult svd = thin_svd(a_);
  const Vector& sigma = svd.singular_values;
  const Index m = static_cast<Index>(m_);

  Vector kept;
  if (options_.shrink) {
    const double delta = sigma.size() >= m ? sigma(m - 1) * sigma(m - 1) : 0.0;
    kept = (sigma.array().square() - delta).cwiseMax(0.0).sqrt().matrix();
  } else {
    kept = sigma;
    if (kept.size() >= m) kept.tail(kept.size() - (m - 1)).setZero();
  }

  // Entries at index >= m-1 of `kept` are zero, so only the leading rows carry mass.
  const Index live = std::min<Index>(kept.size(), m - 1);
  a_.setZero();
  a_.topRows(live) = kept.head(live).asDiagonal() * svd.v.leftCols(live).transpose();
  fill_ = m_ - 1;
  ++compactions_;
}

}  // namespace amm
