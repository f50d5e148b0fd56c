#include "amm/sparse.hpp"

#include "amm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace amm {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_index_range(std::size_t dim) {
  if (dim > std::numeric_limits<SparseIndex>::max()) {
    throw DimensionError("sparse: dimension " + std::to_string(dim) + " exceeds index range");
  }
}

}  // namespace

double SparseRowView::squared_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s;
}

Vector SparseRowView::to_dense() const {
  Vector out = Vector::Zero(static_cast<Index>(dim));
  for (std::size_t k = 0; k < indices.size(); ++k) out(indices[k]) = values[k];
  return out;
}

SparseVector::SparseVector(std::size_t dim, std::vector<std::pair<SparseIndex, double>> entries)
    : dim_(dim) {
  check_index_range(dim);
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  indices_.reserve(entries.size());
  values_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto [idx, val] = entries[k];
    if (idx >= dim) throw DimensionError("sparse vector: index out of range");
    if (k > 0 && entries[k - 1].first == idx) throw DimensionError("sparse vector: duplicate index");
    if (!std::isfinite(val)) throw ValueError("sparse vector: non-finite entry");
    if (val == 0.0) continue;
    indices_.push_back(idx);
    values_.push_back(val);
  }
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  check_index_range(dense.size());
  SparseVector out(dense.size());
  for (std::size_t j = 0; j < dense.size(); ++j) {
    if (!std::isfinite(dense[j])) throw ValueError("sparse vector: non-finite entry");
    if (dense[j] != 0.0) {
      out.indices_.push_back(static_cast<SparseIndex>(j));
      out.values_.push_back(dense[j]);
    }
  }
  return out;
}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols) : cols_(cols), row_ptr_(rows + 1, 0) {
  check_index_range(cols);
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  check_index_range(cols);
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw DimensionError("sparse matrix: entry (" + std::to_string(t.row) + ", " +
                           std::to_string(t.col) + ") outside " + std::to_string(rows) + "x" +
                           std::to_string(cols));
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix out;
  out.cols_ = cols;
  out.row_ptr_.assign(rows + 1, 0);
  out.col_idx_.reserve(triplets.size());
  out.values_.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const Triplet& t = triplets[k];
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      throw DimensionError("sparse matrix: duplicate entry (" + std::to_string(t.row) + ", " +
                           std::to_string(t.col) + ")");
    }
    if (!std::isfinite(t.value)) throw ValueError("sparse matrix: non-finite entry");
    if (t.value == 0.0) continue;
    out.col_idx_.push_back(static_cast<SparseIndex>(t.col));
    out.values_.push_back(t.value);
    ++out.row_ptr_[t.row + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) out.row_ptr_[i + 1] += out.row_ptr_[i];
  return out;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  require_finite(dense, "sparse matrix");
  SparseMatrix out(0, static_cast<std::size_t>(dense.cols()));
  for (Index i = 0; i < dense.rows(); ++i) {
    for (Index j = 0; j < dense.cols(); ++j) {
      if (dense(i, j) != 0.0) {
        out.col_idx_.push_back(static_cast<SparseIndex>(j));
        out.values_.push_back(dense(i, j));
      }
    }
    out.row_ptr_.push_back(out.values_.size());
  }
  return out;
}

SparseRowView SparseMatrix::row(std::size_t i) const {
  const std::size_t begin = row_ptr_[i];
  const std::size_t len = row_ptr_[i + 1] - begin;
  return {cols_, std::span(col_idx_).subspan(begin, len), std::span(values_).subspan(begin, len)};
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix out = DenseMatrix::Zero(static_cast<Index>(rows()), static_cast<Index>(cols_));
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      out(static_cast<Index>(i), col_idx_[k]) = values_[k];
    }
  }
  return out;
}

double SparseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

void SparseMatrix::push_row(const SparseRowView& r) {
  for (std::size_t k = 0; k < r.indices.size(); ++k) {
    if (r.values[k] == 0.0) continue;
    col_idx_.push_back(r.indices[k]);
    values_.push_back(r.values[k]);
  }
  row_ptr_.push_back(values_.size());
}

SparseRowBuffer::SparseRowBuffer(std::size_t cols) : matrix_(0, cols) {}

void SparseRowBuffer::append_row(const SparseRowView& row) {
  if (row.dim != matrix_.cols()) {
    throw DimensionError("row buffer: row length " + std::to_string(row.dim) + " != " +
                         std::to_string(matrix_.cols()));
  }
  if (row.indices.size() != row.values.size()) throw DimensionError("row buffer: ragged row view");
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    if (row.indices[k] >= row.dim || (k > 0 && row.indices[k] <= row.indices[k - 1])) {
      throw DimensionError("row buffer: indices must be increasing and in range");
    }
  }
  require_finite(row.values, "row buffer");
  matrix_.push_row(row);
}

void SparseRowBuffer::clear() {
  matrix_.row_ptr_.assign(1, 0);
  matrix_.col_idx_.clear();
  matrix_.values_.clear();
}

DenseMatrix mul_dense(const SparseMatrix& a, const DenseMatrix& g) {
  if (static_cast<Index>(a.cols()) != g.rows()) {
    throw DimensionError("mul_dense: inner dimensions " + std::to_string(a.cols()) + " vs " +
                         std::to_string(g.rows()));
  }
  const RowMajor gr = g;
  RowMajor out = RowMajor::Zero(static_cast<Index>(a.rows()), g.cols());
  const auto ptr = a.row_ptr();
  const auto idx = a.col_indices();
  const auto val = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(static_cast<Index>(i));
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) dst.noalias() += val[k] * gr.row(idx[k]);
  }
  return out;
}

DenseMatrix mul_transpose_dense(const SparseMatrix& a, const DenseMatrix& g) {
  if (static_cast<Index>(a.rows()) != g.rows()) {
    throw DimensionError("mul_transpose_dense: inner dimensions " + std::to_string(a.rows()) +
                         " vs " + std::to_string(g.rows()));
  }
  const RowMajor gr = g;
  RowMajor out = RowMajor::Zero(static_cast<Index>(a.cols()), g.cols());
  const auto ptr = a.row_ptr();
  const auto idx = a.col_indices();
  const auto val = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto src = gr.row(static_cast<Index>(i));
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) out.row(idx[k]).noalias() += val[k] * src;
  }
  return out;
}

}  // namespace amm
