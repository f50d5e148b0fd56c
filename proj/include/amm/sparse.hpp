#pragma once

#include "amm/linalg.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace amm {

using SparseIndex = std::uint32_t;

/// Non-owning view of one sparse row: strictly increasing indices with matching values.
struct SparseRowView {
  std::size_t dim = 0;
  std::span<const SparseIndex> indices;
  std::span<const double> values;

  std::size_t nnz() const { return indices.size(); }
  double squared_norm() const;
  Vector to_dense() const;
};

/// Owning sparse vector. Explicit zeros are dropped, indices kept sorted and unique.
class SparseVector {
 public:
  SparseVector() = default;
  explicit SparseVector(std::size_t dim) : dim_(dim) {}

  /// From (index, value) pairs in any order; duplicate or out-of-range indices throw.
  SparseVector(std::size_t dim, std::vector<std::pair<SparseIndex, double>> entries);

  static SparseVector from_dense(std::span<const double> dense);

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return indices_.size(); }
  std::span<const SparseIndex> indices() const { return indices_; }
  std::span<const double> values() const { return values_; }
  SparseRowView view() const { return {dim_, indices_, values_}; }
  operator SparseRowView() const { return view(); }

 private:
  std::size_t dim_ = 0;
  std::vector<SparseIndex> indices_;
  std::vector<double> values_;
};

/// Compressed-row matrix. Rows are stored in arrival order; every stored value is nonzero.
class SparseMatrix {
 public:
  SparseMatrix() : row_ptr_{0} {}
  SparseMatrix(std::size_t rows, std::size_t cols);

  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  /// Builds from coordinates in any order. Zero values are dropped; duplicate
  /// coordinates and out-of-range indices throw DimensionError.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  static SparseMatrix from_dense(const DenseMatrix& dense);

  std::size_t rows() const { return row_ptr_.size() - 1; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  SparseRowView row(std::size_t i) const;
  DenseMatrix to_dense() const;
  double frobenius_norm() const;

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const SparseIndex> col_indices() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

 private:
  friend class SparseRowBuffer;
  void push_row(const SparseRowView& r);

  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<SparseIndex> col_idx_;
  std::vector<double> values_;
};

/// Append-only row buffer backing the streaming buffers; clear() empties it.
class SparseRowBuffer {
 public:
  explicit SparseRowBuffer(std::size_t cols = 0);

  /// Throws DimensionError if row.dim != cols().
  void append_row(const SparseRowView& row);
  void clear();

  std::size_t rows() const { return matrix_.rows(); }
  std::size_t cols() const { return matrix_.cols(); }
  std::size_t nnz() const { return matrix_.nnz(); }
  const SparseMatrix& matrix() const { return matrix_; }

 private:
  SparseMatrix matrix_;
};

/// a * g for a: p x q sparse, g: q x k dense.
DenseMatrix mul_dense(const SparseMatrix& a, const DenseMatrix& g);

/// a^T * g for a: p x q sparse, g: p x k dense.
DenseMatrix mul_transpose_dense(const SparseMatrix& a, const DenseMatrix& g);

}  // namespace amm
