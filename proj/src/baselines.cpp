#include "amm/baselines.hpp"

#include "amm/errors.hpp"

#include <algorithm>
#include <string>

namespace amm {

namespace {

void check_dims(const char* who, std::size_t x, std::size_t y, std::size_t dx, std::size_t dy) {
  if (x != dx || y != dy) {
    throw DimensionError(std::string(who) + ": row lengths (" + std::to_string(x) + ", " +
                         std::to_string(y) + ") != (" + std::to_string(dx) + ", " +
                         std::to_string(dy) + ")");
  }
}

}  // namespace

SparseRowView concat_rows(const SparseRowView& x, const SparseRowView& y,
                          std::vector<SparseIndex>& idx, std::vector<double>& val) {
  idx.assign(x.indices.begin(), x.indices.end());
  val.assign(x.values.begin(), x.values.end());
  const auto offset = static_cast<SparseIndex>(x.dim);
  for (std::size_t k = 0; k < y.nnz(); ++k) {
    idx.push_back(y.indices[k] + offset);
    val.push_back(y.values[k]);
  }
  return {x.dim + y.dim, idx, val};
}

FdAmm::FdAmm(std::size_t m, std::size_t dx, std::size_t dy, FdOptions options)
    : dx_(dx), dy_(dy), fd_(m, dx + dy, options), scratch_(dx + dy, 0.0) {
  if (dx == 0 || dy == 0) throw ParameterError("fd-amm: dx and dy must be >= 1");
}

void FdAmm::update(std::span<const double> x, std::span<const double> y) {
  check_dims("fd-amm", x.size(), y.size(), dx_, dy_);
  std::copy(x.begin(), x.end(), scratch_.begin());
  std::copy(y.begin(), y.end(), scratch_.begin() + static_cast<std::ptrdiff_t>(dx_));
  fd_.update(scratch_);
}

void FdAmm::update(const SparseRowView& x, const SparseRowView& y) {
  check_dims("fd-amm", x.dim, y.dim, dx_, dy_);
  std::fill(scratch_.begin(), scratch_.end(), 0.0);
  for (std::size_t k = 0; k < x.nnz(); ++k) scratch_[x.indices[k]] = x.values[k];
  for (std::size_t k = 0; k < y.nnz(); ++k) scratch_[dx_ + y.indices[k]] = y.values[k];
  fd_.update(scratch_);
}

SplitFactors FdAmm::finalize() const {
  const DenseMatrix& c = fd_.sketch();
  return {c.leftCols(static_cast<Index>(dx_)), c.rightCols(static_cast<Index>(dy_))};
}

SfdAmm::SfdAmm(std::size_t m, std::size_t dx, std::size_t dy, QSchedule schedule, std::uint64_t seed,
               FlushDiagnostics diagnostics)
    : dx_(dx), dy_(dy), scod_(ScodSketch::symmetric(m, dx + dy, schedule, seed, diagnostics)) {
  if (dx == 0 || dy == 0) throw ParameterError("sfd-amm: dx and dy must be >= 1");
}

void SfdAmm::update(const SparseRowView& x, const SparseRowView& y) {
  check_dims("sfd-amm", x.dim, y.dim, dx_, dy_);
  scod_.update(concat_rows(x, y, idx_, val_));
}

SplitFactors SfdAmm::finalize() {
  const ScodResult r = scod_.finalize();
  return {r.a.leftCols(static_cast<Index>(dx_)), r.b.rightCols(static_cast<Index>(dy_))};
}

}  // namespace amm
