#include "amm/oracle.hpp"

#include "amm/errors.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace amm {

namespace {

void guard(std::size_t dx, std::size_t dy) {
  if (static_cast<double>(dx) * static_cast<double>(dy) > kDenseGuardEntries) {
    throw GuardError("dense oracle refused: " + std::to_string(dx) + "x" + std::to_string(dy) +
                     " product exceeds the desk-scale guard; use the implicit error mode");
  }
}

void check_rows(std::size_t xr, std::size_t yr) {
  if (xr != yr) {
    throw DimensionError("oracle: X has " + std::to_string(xr) + " rows, Y has " + std::to_string(yr));
  }
}

void check_factors(const DenseMatrix& a, const DenseMatrix& b, std::size_t dx, std::size_t dy) {
  if (a.rows() != b.rows() || a.cols() != static_cast<Index>(dx) || b.cols() != static_cast<Index>(dy)) {
    throw DimensionError("oracle: factors " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " and " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                         " do not match " + std::to_string(dx) + "x" + std::to_string(dy));
  }
}

void check_k(std::size_t m, std::size_t k) {
  if (k >= m) throw ParameterError("bound: need k < m (k=" + std::to_string(k) + ", m=" + std::to_string(m) + ")");
}

// sigma_i(X)^2 from the Gram matrix X^T X.
double covariance_bound_from_gram(const DenseMatrix& gram, std::size_t m, std::size_t k) {
  check_k(m, k);
  const Vector sq = singular_values(gram);
  const double total = gram.trace();
  const double head = ky_fan_norm(sq, k);
  return std::max(0.0, total - head) / static_cast<double>(m - k);
}

template <typename Apply, typename ApplyT>
double implicit_error(Index dx, Index dy, Apply apply, ApplyT apply_t) {
  LinearOperator op{dx, dy, apply, apply_t};
  PowerIterationOptions opts;
  opts.tol = 1e-6;
  opts.max_iter = 5000;
  return spectral_norm(op, opts).value;
}

}  // namespace

DenseMatrix exact_product(const SparseMatrix& x, const SparseMatrix& y) {
  check_rows(x.rows(), y.rows());
  guard(x.cols(), y.cols());
  DenseMatrix out = DenseMatrix::Zero(static_cast<Index>(x.cols()), static_cast<Index>(y.cols()));
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const SparseRowView xr = x.row(t);
    const SparseRowView yr = y.row(t);
    for (std::size_t i = 0; i < xr.nnz(); ++i) {
      for (std::size_t j = 0; j < yr.nnz(); ++j) out(xr.indices[i], yr.indices[j]) += xr.values[i] * yr.values[j];
    }
  }
  return out;
}

DenseMatrix exact_product(const DenseMatrix& x, const DenseMatrix& y) {
  check_rows(static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(y.rows()));
  guard(static_cast<std::size_t>(x.cols()), static_cast<std::size_t>(y.cols()));
  return x.transpose() * y;
}

double amm_error(const SparseMatrix& x, const SparseMatrix& y, const DenseMatrix& a,
                 const DenseMatrix& b, ErrorMode mode) {
  check_rows(x.rows(), y.rows());
  check_factors(a, b, x.cols(), y.cols());
  if (mode == ErrorMode::dense) {
    const DenseMatrix diff = exact_product(x, y) - a.transpose() * b;
    const Vector s = singular_values(diff);
    return s.size() ? s(0) : 0.0;
  }
  return implicit_error(
      static_cast<Index>(x.cols()), static_cast<Index>(y.cols()),
      [&](const Vector& v) -> Vector {
        return mul_transpose_dense(x, mul_dense(y, v)) - a.transpose() * (b * v);
      },
      [&](const Vector& u) -> Vector {
        return mul_transpose_dense(y, mul_dense(x, u)) - b.transpose() * (a * u);
      });
}

double amm_error(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& a,
                 const DenseMatrix& b, ErrorMode mode) {
  check_rows(static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(y.rows()));
  check_factors(a, b, static_cast<std::size_t>(x.cols()), static_cast<std::size_t>(y.cols()));
  if (mode == ErrorMode::dense) {
    const Vector s = singular_values(exact_product(x, y) - a.transpose() * b);
    return s.size() ? s(0) : 0.0;
  }
  return implicit_error(
      x.cols(), y.cols(),
      [&](const Vector& v) -> Vector { return x.transpose() * (y * v) - a.transpose() * (b * v); },
      [&](const Vector& u) -> Vector { return y.transpose() * (x * u) - b.transpose() * (a * u); });
}

ProductSpectrum ProductSpectrum::of_product(const DenseMatrix& xty, double frob_x, double frob_y) {
  return {frob_x, frob_y, singular_values(xty)};
}

ProductSpectrum ProductSpectrum::of(const SparseMatrix& x, const SparseMatrix& y) {
  return of_product(exact_product(x, y), x.frobenius_norm(), y.frobenius_norm());
}

ProductSpectrum ProductSpectrum::of(const DenseMatrix& x, const DenseMatrix& y) {
  return of_product(exact_product(x, y), x.norm(), y.norm());
}

double bound_lemma1(const DenseMatrix& x, std::size_t m, std::size_t k) {
  guard(static_cast<std::size_t>(x.cols()), static_cast<std::size_t>(x.cols()));
  return covariance_bound_from_gram(x.transpose() * x, m, k);
}

double bound_lemma1(const SparseMatrix& x, std::size_t m, std::size_t k) {
  return covariance_bound_from_gram(exact_product(x, x), m, k);
}

double bound_lemma2(const ProductSpectrum& s, std::size_t m) {
  if (m == 0) throw ParameterError("bound: m must be >= 1");
  return s.frob_product() / static_cast<double>(m);
}

double bound_theorem1(const ProductSpectrum& s, std::size_t m, std::size_t k) {
  check_k(m, k);
  return std::max(0.0, s.frob_product() - s.ky_fan(k)) / static_cast<double>(m - k);
}

double bound_theorem1(const DenseMatrix& x, const DenseMatrix& y, std::size_t m, std::size_t k) {
  return bound_theorem1(ProductSpectrum::of(x, y), m, k);
}

std::vector<double> bound_theorem1_all(const ProductSpectrum& s, std::size_t m) {
  std::vector<double> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) out.push_back(bound_theorem1(s, m, k));
  return out;
}

double bound_theorem1_min(const ProductSpectrum& s, std::size_t m) {
  double best = std::numeric_limits<double>::infinity();
  for (double v : bound_theorem1_all(s, m)) best = std::min(best, v);
  return best;
}

double bound_theorem3(const ProductSpectrum& s, std::size_t m, std::size_t k, double epsilon) {
  check_k(m, k);
  if (!(epsilon >= 0.0)) throw ParameterError("bound: epsilon must be >= 0");
  const double gap = static_cast<double>(m - k);
  const double factor = (2.0 + epsilon) / gap + (1.0 + epsilon) * static_cast<double>(k) / (gap * gap);
  return factor * std::max(0.0, s.frob_product() - s.ky_fan(k));
}

double bound_theorem3(const DenseMatrix& x, const DenseMatrix& y, std::size_t m, std::size_t k,
                      double epsilon) {
  return bound_theorem3(ProductSpectrum::of(x, y), m, k, epsilon);
}

double measure_epsilon_hat(const std::vector<FlushRecord>& log, std::size_t m) {
  double worst = 1.0;
  std::size_t seen = 0;
  for (const FlushRecord& rec : log) {
    if (!rec.x_buf || !rec.y_buf) continue;
    ++seen;
    const DenseMatrix mat = exact_product(*rec.x_buf, *rec.y_buf);
    const Vector sigma = singular_values(mat);
    if (sigma.size() == 0 || sigma(0) == 0.0) continue;
    const Index tail = static_cast<Index>(m);
    const double next = tail < sigma.size() ? sigma(tail) : 0.0;
    double ratio = 1.0;
    if (next > kRankTolerance * sigma(0)) {
      const DenseMatrix residual = mat - rec.z * (rec.z.transpose() * mat);
      const Vector rs = singular_values(residual);
      ratio = (rs.size() ? rs(0) : 0.0) / next;
    }
    worst = std::max(worst, ratio);
  }
  if (seen == 0) throw ParameterError("measure_epsilon_hat: no retained flush buffers");
  return worst - 1.0;
}

ShrinkChecks check_shrink_mass(const ProductSpectrum& s, double error, const DenseMatrix& a,
                               const DenseMatrix& b, std::size_t m, double delta_sum) {
  const double slack = kCheckTolerance * std::max(1.0, s.frob_product());
  const double sketch_nuclear = nuclear_norm(a.transpose() * b);
  ShrinkChecks c;
  c.error_within_delta = error <= delta_sum + slack;
  c.nuclear_budget = sketch_nuclear <= s.frob_product() - static_cast<double>(m) * delta_sum + slack;
  c.nuclear_gap = true;
  const double total = s.nuclear();
  for (std::size_t k = 0; k < m; ++k) {
    const double tail = total - s.ky_fan(k);
    if (total - sketch_nuclear > tail + static_cast<double>(k) * delta_sum + slack) c.nuclear_gap = false;
  }
  return c;
}

BoundReport evaluate_bounds(const SparseMatrix& x, const SparseMatrix& y, const DenseMatrix& a,
                            const DenseMatrix& b, std::size_t m, double delta_sum,
                            const ReportOptions& options) {
  using Clock = std::chrono::steady_clock;
  BoundReport r;
  r.m = m;
  r.lemma3_delta = delta_sum;
  r.rel_error_denominator = options.denominator;

  const auto t0 = Clock::now();
  const bool dense_ok =
      static_cast<double>(x.cols()) * static_cast<double>(y.cols()) <= kDenseGuardEntries;
  if (options.mode == ErrorMode::dense && !dense_ok) guard(x.cols(), y.cols());

  if (dense_ok) {
    const DenseMatrix xty = exact_product(x, y);
    r.spectrum = ProductSpectrum::of_product(xty, x.frobenius_norm(), y.frobenius_norm());
    if (options.mode == ErrorMode::dense) {
      const Vector s = singular_values(xty - a.transpose() * b);
      r.exact_spectral_error = s.size() ? s(0) : 0.0;
    }
  } else {
    r.spectrum.frob_x = x.frobenius_norm();
    r.spectrum.frob_y = y.frobenius_norm();
  }
  if (options.mode == ErrorMode::implicit) {
    r.exact_spectral_error = amm_error(x, y, a, b, ErrorMode::implicit);
  }
  const auto t1 = Clock::now();

  r.lemma2_rhs = bound_lemma2(r.spectrum, m);
  if (dense_ok) {
    r.theorem1_rhs_per_k = bound_theorem1_all(r.spectrum, m);
    r.theorem1_rhs_min = bound_theorem1_min(r.spectrum, m);
  } else {
    r.theorem1_rhs_min = std::numeric_limits<double>::quiet_NaN();
  }

  if (options.denominator == ErrorDenominator::frob_product) {
    r.denominator = r.spectrum.frob_product();
  } else if (dense_ok) {
    r.denominator = r.spectrum.sigma.size() ? r.spectrum.sigma(0) : 0.0;
  } else {
    r.denominator = amm_error(x, y, DenseMatrix::Zero(1, static_cast<Index>(x.cols())),
                              DenseMatrix::Zero(1, static_cast<Index>(y.cols())), ErrorMode::implicit);
  }
  r.relative_error = r.denominator > 0.0 ? r.exact_spectral_error / r.denominator : 0.0;

  if (options.shrink_checks && dense_ok) {
    r.shrink_checks = check_shrink_mass(r.spectrum, r.exact_spectral_error, a, b, m, delta_sum);
  }
  r.wall_time_ms["oracle"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return r;
}

}  // namespace amm
