#pragma once

#include "amm/linalg.hpp"
#include "amm/scod.hpp"
#include "amm/sparse.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace amm {

/// Largest dx * dy product the dense oracle will materialize.
inline constexpr double kDenseGuardEntries = 4e6;

/// Slack for bound checks, relative to ||X||_F ||Y||_F (rounding only).
inline constexpr double kCheckTolerance = 1e-9;

/// Exact X^T Y. Throws GuardError beyond kDenseGuardEntries, DimensionError on row mismatch.
DenseMatrix exact_product(const SparseMatrix& x, const SparseMatrix& y);
DenseMatrix exact_product(const DenseMatrix& x, const DenseMatrix& y);

enum class ErrorMode { dense, implicit };

/// ||X^T Y - A^T B||. Dense mode takes sigma_1 of the materialized difference; implicit mode runs
/// power iteration on v -> X^T (Y v) - A^T (B v) with relative tolerance 1e-6.
double amm_error(const SparseMatrix& x, const SparseMatrix& y, const DenseMatrix& a,
                 const DenseMatrix& b, ErrorMode mode = ErrorMode::dense);
double amm_error(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& a,
                 const DenseMatrix& b, ErrorMode mode = ErrorMode::dense);

/// Everything the error bounds need about one input pair.
struct ProductSpectrum {
  double frob_x = 0.0;
  double frob_y = 0.0;
  Vector sigma;  ///< all singular values of X^T Y, nonincreasing

  static ProductSpectrum of(const SparseMatrix& x, const SparseMatrix& y);
  static ProductSpectrum of(const DenseMatrix& x, const DenseMatrix& y);
  static ProductSpectrum of_product(const DenseMatrix& xty, double frob_x, double frob_y);

  double frob_product() const { return frob_x * frob_y; }
  double ky_fan(std::size_t k) const { return ky_fan_norm(sigma, k); }
  double nuclear() const { return sigma.sum(); }
};

/// (||X||_F^2 - ||X_k||_F^2) / (m - k). ParameterError unless k < m.
double bound_lemma1(const DenseMatrix& x, std::size_t m, std::size_t k);
double bound_lemma1(const SparseMatrix& x, std::size_t m, std::size_t k);

/// ||X||_F ||Y||_F / m.
double bound_lemma2(const ProductSpectrum& s, std::size_t m);

/// (||X||_F ||Y||_F - ||X^T Y||_k) / (m - k).
double bound_theorem1(const ProductSpectrum& s, std::size_t m, std::size_t k);
double bound_theorem1(const DenseMatrix& x, const DenseMatrix& y, std::size_t m, std::size_t k);
/// Values for k = 0 .. m-1.
std::vector<double> bound_theorem1_all(const ProductSpectrum& s, std::size_t m);
double bound_theorem1_min(const ProductSpectrum& s, std::size_t m);

/// ((2 + eps)/(m - k) + (1 + eps) k/(m - k)^2) (||X||_F ||Y||_F - ||X^T Y||_k).
double bound_theorem3(const ProductSpectrum& s, std::size_t m, std::size_t k, double epsilon);
double bound_theorem3(const DenseMatrix& x, const DenseMatrix& y, std::size_t m, std::size_t k,
                      double epsilon);

/// Worst observed compression accuracy over the retained flushes:
/// max_i ||M_i - Z_i Z_i^T M_i|| / sigma_{m+1}(M_i) - 1, clamped at 0, with the ratio taken as 1
/// when sigma_{m+1}(M_i) <= 1e-12 sigma_1(M_i). ParameterError if nothing was retained.
double measure_epsilon_hat(const std::vector<FlushRecord>& log, std::size_t m);

/// Diagnostics for the accumulated shrink mass of a co-occurring run.
struct ShrinkChecks {
  bool error_within_delta = false;  ///< ||X^T Y - A^T B|| <= Delta
  bool nuclear_budget = false;      ///< ||A^T B||_* <= ||X||_F ||Y||_F - m Delta
  bool nuclear_gap = false;         ///< nuclear gap <= sum_{i>k} sigma_i + k Delta for all k < m
};

ShrinkChecks check_shrink_mass(const ProductSpectrum& s, double error, const DenseMatrix& a,
                               const DenseMatrix& b, std::size_t m, double delta_sum);

enum class ErrorDenominator { frob_product, exact_spectral };

struct BoundReport {
  double exact_spectral_error = 0.0;
  double relative_error = 0.0;
  ErrorDenominator rel_error_denominator = ErrorDenominator::frob_product;
  double denominator = 0.0;
  double lemma2_rhs = 0.0;
  std::vector<double> theorem1_rhs_per_k;
  double theorem1_rhs_min = 0.0;
  double lemma3_delta = 0.0;
  std::optional<ShrinkChecks> shrink_checks;  ///< present for plain co-occurring runs
  std::optional<double> measured_epsilon_hat;
  ProductSpectrum spectrum;
  std::size_t m = 0;
  std::map<std::string, double> wall_time_ms;

  double theorem3_rhs(std::size_t k, double epsilon) const {
    return bound_theorem3(spectrum, m, k, epsilon);
  }
};

struct ReportOptions {
  ErrorMode mode = ErrorMode::dense;
  ErrorDenominator denominator = ErrorDenominator::frob_product;
  bool shrink_checks = false;
};

BoundReport evaluate_bounds(const SparseMatrix& x, const SparseMatrix& y, const DenseMatrix& a,
                            const DenseMatrix& b, std::size_t m, double delta_sum,
                            const ReportOptions& options = {});

}  // namespace amm
