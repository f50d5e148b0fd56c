#include "amm/spm.hpp"

#include "amm/errors.hpp"
#include "amm/random.hpp"

#include <string>

namespace amm {

void SpmConfig::validate() const {
  if (target_rank == 0) throw ParameterError("spm: target rank must be >= 1");
  if (power_iterations == 0) throw ParameterError("spm: power iterations must be >= 1");
}

DenseMatrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  const CounterNormal normal(seed);
  DenseMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      g(i, j) = normal.draw(static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(rows) +
                            static_cast<std::uint64_t>(i));
    }
  }
  return g;
}

namespace {

void check_aligned(const SparseMatrix& x_buf, const SparseMatrix& y_buf, const char* who) {
  if (x_buf.rows() != y_buf.rows()) {
    throw DimensionError(std::string(who) + ": buffers have " + std::to_string(x_buf.rows()) +
                         " and " + std::to_string(y_buf.rows()) + " rows");
  }
}

// M v = X^T (Y v)
DenseMatrix apply_m(const SparseMatrix& x, const SparseMatrix& y, const DenseMatrix& v) {
  return mul_transpose_dense(x, mul_dense(y, v));
}

// M^T u = Y^T (X u)
DenseMatrix apply_mt(const SparseMatrix& x, const SparseMatrix& y, const DenseMatrix& u) {
  return mul_transpose_dense(y, mul_dense(x, u));
}

}  // namespace

DenseMatrix subspace_power_method(const SparseMatrix& x_buf, const SparseMatrix& y_buf,
                                  const SpmConfig& config) {
  config.validate();
  check_aligned(x_buf, y_buf, "spm");
  const Index dx = static_cast<Index>(x_buf.cols());
  const Index dy = static_cast<Index>(y_buf.cols());
  if (x_buf.rows() == 0 || x_buf.nnz() == 0 || y_buf.nnz() == 0) return DenseMatrix(dx, 0);

  const DenseMatrix g = gaussian_matrix(dy, static_cast<Index>(config.target_rank), config.seed);
  DenseMatrix k = apply_m(x_buf, y_buf, g);
  if (config.reorthonormalize) k = orthonormal_columns(k);
  for (std::size_t round = 0; round < config.power_iterations; ++round) {
    DenseMatrix back = apply_mt(x_buf, y_buf, k);
    if (config.reorthonormalize) back = orthonormal_columns(back);
    k = apply_m(x_buf, y_buf, back);
    if (config.reorthonormalize) k = orthonormal_columns(k);
  }
  return config.reorthonormalize ? k : orthonormal_columns(k);
}

BalancedPair balance_split(const DenseMatrix& z, const SparseMatrix& x_buf, const SparseMatrix& y_buf) {
  check_aligned(x_buf, y_buf, "balance_split");
  if (z.rows() != static_cast<Index>(x_buf.cols())) {
    throw DimensionError("balance_split: basis has " + std::to_string(z.rows()) + " rows, expected " +
                         std::to_string(x_buf.cols()));
  }
  // W^T = Y^T (X Z), dy x m'
  const DenseMatrix wt = mul_transpose_dense(y_buf, mul_dense(x_buf, z));
  const SvdResult svd = thin_svd(wt.transpose());
  const Vector root = svd.singular_values.cwiseSqrt();
  return {root.asDiagonal() * (z * svd.u).transpose(), root.asDiagonal() * svd.v.transpose()};
}

}  // namespace amm
