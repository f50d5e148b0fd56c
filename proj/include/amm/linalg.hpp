#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace amm {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Singular values below this fraction of the largest one are treated as zero.
inline constexpr double kRankTolerance = 1e-12;

/// Condensed SVD m = u * diag(singular_values) * v^T restricted to the numerical rank.
struct SvdResult {
  DenseMatrix u;
  Vector singular_values;
  DenseMatrix v;

  Index rank() const { return singular_values.size(); }
};

struct QrResult {
  DenseMatrix q;
  DenseMatrix r;
};

/// Thin SVD; singular values < kRankTolerance * sigma_1 are dropped along with their vectors.
/// Throws KernelError on non-finite input or factorization failure.
SvdResult thin_svd(const DenseMatrix& m);

/// All min(rows, cols) singular values, nonincreasing, including zeros.
Vector singular_values(const DenseMatrix& m);

/// Householder QR with q: rows x cols orthonormal columns and r: cols x cols upper triangular.
/// Requires rows >= cols (DimensionError otherwise).
QrResult thin_qr(const DenseMatrix& m);

/// Orthonormal basis for the column span of k. Rank-deficient input yields fewer columns.
DenseMatrix orthonormal_columns(const DenseMatrix& k);

/// Sum of the k largest singular values; k beyond the rank gives the nuclear norm, k = 0 gives 0.
double ky_fan_norm(const DenseMatrix& m, std::size_t k);
double ky_fan_norm(const Vector& sigma, std::size_t k);

double nuclear_norm(const DenseMatrix& m);

/// max(sigma_i - delta, 0) elementwise.
Vector shrink_values(const Vector& sigma, double delta);

/// Linear operator R^cols -> R^rows given by its action and the action of its adjoint.
struct LinearOperator {
  Index rows = 0;
  Index cols = 0;
  std::function<Vector(const Vector&)> apply;
  std::function<Vector(const Vector&)> apply_adjoint;

  static LinearOperator from_dense(const DenseMatrix& m);
};

struct SpectralEstimate {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct PowerIterationOptions {
  double tol = 1e-7;
  std::size_t max_iter = 1000;
  std::uint64_t seed = 0x5eed;
};

/// Largest singular value by power iteration on op^T op. Stops once the estimate changes
/// by less than tol relative; otherwise returns the last estimate with converged = false.
SpectralEstimate spectral_norm(const LinearOperator& op, const PowerIterationOptions& options = {});

/// Throws ValueError if any entry is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);
void require_finite(const DenseMatrix& m, const char* what);

}  // namespace amm
