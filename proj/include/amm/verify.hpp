#pragma once

#include "amm/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace amm {

/// Deliberately broken variants, used to show the property suites notice them.
struct Mutations {
  bool fd_no_shrink = false;     ///< FD keeps the top m-1 directions without shrinking
  bool cod_delta_next = false;   ///< COD shrinks by sigma_{m+1} instead of sigma_m
};

struct VerifyOptions {
  /// Multiplies every instance count (at least one instance per suite is always run).
  double scale = 1.0;
  /// Number of rows of the timing instance; 0 skips the timing suite.
  std::size_t perf_rows = 50000;
  std::uint64_t seed = 20240611;
  Mutations mutations;
};

struct SuiteResult {
  std::string name;
  std::string summary;
  std::size_t instances = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  bool passed = false;
  std::string detail;  ///< first failure or the measured shape statistics
  double seconds = 0.0;
};

/// m = 2, d = 2: 2 e1 followed by `repeats` copies of (e1, e2, e2). Frequent Directions without
/// the shrink step keeps e1 forever and drops every e2, ending with error 2 * repeats, above the
/// covariance bound for both k = 0 and k = 1 once repeats >= 5.
DenseMatrix adversarial_fd_stream(std::size_t repeats = 20);

/// X = Y = rows 3 e1, 2 e2, e3, e3, e3 for m = 2. Shrinking by sigma_3 leaves a live row in
/// the slot the fifth row overwrites, so the error (4) exceeds the recorded shrink mass (2).
DenseMatrix adversarial_cod_stream();

// Property suites. Each returns one result; the co-occurring suite returns the bound check and
// the shrink-mass diagnostics separately because they share their runs.
SuiteResult verify_fd_error_bound(const VerifyOptions& options);
std::vector<SuiteResult> verify_cod_bounds(const VerifyOptions& options);
SuiteResult verify_symmetric_reduction(const VerifyOptions& options);
SuiteResult verify_subspace_power_method(const VerifyOptions& options);
/// Flush-level invariants and the end-to-end sparse bound share their runs.
std::vector<SuiteResult> verify_sparse_sketch(const VerifyOptions& options);
SuiteResult verify_performance_shape(const VerifyOptions& options);
SuiteResult verify_monotonicity(const VerifyOptions& options);
SuiteResult verify_mutation_sensitivity(const VerifyOptions& options);

std::vector<SuiteResult> run_verify(const VerifyOptions& options);

}  // namespace amm
