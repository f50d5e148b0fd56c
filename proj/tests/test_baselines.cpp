#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "amm/baselines.hpp"
#include "amm/errors.hpp"
#include "oracles.hpp"

using namespace amm;
using amm::testing::jacobi_singular_values;
using amm::testing::jacobi_spectral;
using amm::testing::random_dense;
using amm::testing::random_sparse;
using amm::testing::rel_frob;

namespace {

DenseMatrix hstack(const DenseMatrix& x, const DenseMatrix& y) {
  DenseMatrix z(x.rows(), x.cols() + y.cols());
  z << x, y;
  return z;
}

void feed(FdAmm& s, const DenseMatrix& x, const DenseMatrix& y) {
  for (Index t = 0; t < x.rows(); ++t) {
    const Vector xr = x.row(t).transpose(), yr = y.row(t).transpose();
    s.update(std::span(xr.data(), static_cast<std::size_t>(xr.size())),
             std::span(yr.data(), static_cast<std::size_t>(yr.size())));
  }
}

// (||Z||_F^2 - ||Z_k||_F^2) / (m - k) from the singular values of Z.
double covariance_bound(const DenseMatrix& z, std::size_t m, std::size_t k) {
  const Vector s = jacobi_singular_values(z);
  double tail = 0.0;
  for (Index i = static_cast<Index>(k); i < s.size(); ++i) tail += s(i) * s(i);
  return tail / static_cast<double>(m - k);
}

}  // namespace

TEST_CASE("concatenated rows") {
  const SparseVector x(3, {{0, 1.0}, {2, 2.0}}), y(2, {{1, 5.0}});
  std::vector<SparseIndex> idx;
  std::vector<double> val;
  const SparseRowView z = concat_rows(x, y, idx, val);
  CHECK(z.dim == 5);
  CHECK(z.nnz() == 3);
  CHECK(z.to_dense() == (Vector(5) << 1, 0, 2, 0, 5).finished());
}

TEST_CASE("fd-amm single pair is exact") {
  FdAmm s(3, 3, 2);
  const std::vector<double> x{1, 2, 3}, y{4, 5};
  s.update(x, y);
  const SplitFactors f = s.finalize();
  DenseMatrix expected(3, 2);
  expected << 4, 5, 8, 10, 12, 15;
  CHECK((f.a.transpose() * f.b - expected).norm() < 1e-14);
}

TEST_CASE("fd-amm split reassembles the inner sketch") {
  const DenseMatrix x = random_dense(70, 9, 1), y = random_dense(70, 6, 2);
  FdAmm s(4, 9, 6);
  feed(s, x, y);
  const SplitFactors f = s.finalize();
  CHECK(hstack(f.a, f.b) == s.sketch());
}

TEST_CASE("fd-amm error is dominated by the concatenated covariance error") {
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    const DenseMatrix h = random_dense(150, 4, seed);
    const DenseMatrix x = h * random_dense(4, 12, seed + 100) + 0.3 * random_dense(150, 12, seed + 200);
    const DenseMatrix y = h * random_dense(4, 8, seed + 300) + 0.3 * random_dense(150, 8, seed + 400);
    const std::size_t m = 5;
    FdAmm s(m, 12, 8);
    feed(s, x, y);
    const SplitFactors f = s.finalize();
    const DenseMatrix z = hstack(x, y);
    const double err = jacobi_spectral(x.transpose() * y - f.a.transpose() * f.b);
    const double full = jacobi_spectral(z.transpose() * z - s.sketch().transpose() * s.sketch());
    CHECK(err <= full + 1e-9 * z.squaredNorm());
    for (std::size_t k = 0; k < m; ++k) CHECK(err <= covariance_bound(z, m, k) + 1e-9 * z.squaredNorm());
  }
}

TEST_CASE("fd-amm with X = Y obeys the covariance bound of Z") {
  const DenseMatrix x = random_dense(120, 10, 20);
  const std::size_t m = 4;
  FdAmm s(m, 10, 10);
  feed(s, x, x);
  const SplitFactors f = s.finalize();
  const double err = jacobi_spectral(x.transpose() * x - f.a.transpose() * f.b);
  const DenseMatrix z = hstack(x, x);
  for (std::size_t k = 0; k < m; ++k) CHECK(err <= covariance_bound(z, m, k) + 1e-9 * z.squaredNorm());
}

TEST_CASE("fd-amm sparse and dense updates agree") {
  const SparseMatrix x = random_sparse(50, 8, 0.3, 30), y = random_sparse(50, 5, 0.3, 31);
  FdAmm a(3, 8, 5), b(3, 8, 5);
  for (std::size_t t = 0; t < x.rows(); ++t) a.update(x.row(t), y.row(t));
  feed(b, x.to_dense(), y.to_dense());
  CHECK((a.sketch() - b.sketch()).norm() < 1e-12);
}

TEST_CASE("sfd-amm recovers low-rank streams") {
  // rank(Z) <= 3 < m.
  const DenseMatrix h = random_dense(200, 3, 40);
  const DenseMatrix x = h * random_dense(3, 15, 41), y = h * random_dense(3, 10, 42);
  const SparseMatrix xs = SparseMatrix::from_dense(x), ys = SparseMatrix::from_dense(y);
  SfdAmm s(5, 15, 10);
  for (std::size_t t = 0; t < xs.rows(); ++t) s.update(xs.row(t), ys.row(t));
  const SplitFactors f = s.finalize();
  CHECK(s.inner().flush_count() > 1);
  CHECK(rel_frob(f.a.transpose() * f.b, x.transpose() * y) < 1e-8);
}

TEST_CASE("sfd-amm equals the cross block of sparse co-occurring directions on Z") {
  const SparseMatrix x = random_sparse(250, 14, 0.15, 50), y = random_sparse(250, 9, 0.15, 51);
  const std::size_t m = 4;
  SfdAmm s(m, 14, 9, QSchedule::fixed(5), 17);
  ScodSketch direct(m, 23, 23, QSchedule::fixed(5), 17);
  std::vector<SparseIndex> idx;
  std::vector<double> val;
  for (std::size_t t = 0; t < x.rows(); ++t) {
    s.update(x.row(t), y.row(t));
    const SparseRowView z = concat_rows(x.row(t), y.row(t), idx, val);
    direct.update(z, z);
  }
  const SplitFactors f = s.finalize();
  const ScodResult r = direct.finalize();
  const DenseMatrix cross = (r.a.transpose() * r.b).topRightCorner(14, 9);
  CHECK(rel_frob(f.a.transpose() * f.b, cross) < 1e-9);
}

TEST_CASE("sfd-amm error against the covariance bound shape") {
  const SparseMatrix x = random_sparse(400, 30, 0.05, 60), y = random_sparse(400, 30, 0.05, 61);
  const std::size_t m = 8;
  SfdAmm s(m, 30, 30);
  for (std::size_t t = 0; t < x.rows(); ++t) s.update(x.row(t), y.row(t));
  const SplitFactors f = s.finalize();
  const DenseMatrix xd = x.to_dense(), yd = y.to_dense();
  const DenseMatrix z = hstack(xd, yd);
  const double err = jacobi_spectral(xd.transpose() * yd - f.a.transpose() * f.b);
  // Largest alpha with err <= (||Z||_F^2 - ||Z_k||_F^2) / (alpha m - k) for some k; reported only.
  double alpha = 0.0;
  const Vector sz = jacobi_singular_values(z);
  for (std::size_t k = 0; k < m; ++k) {
    double tail = 0.0;
    for (Index i = static_cast<Index>(k); i < sz.size(); ++i) tail += sz(i) * sz(i);
    alpha = std::max(alpha, (tail / std::max(err, 1e-300) + static_cast<double>(k)) / static_cast<double>(m));
  }
  MESSAGE("measured alpha = " << alpha);
  CHECK(std::isfinite(err));
  CHECK(err <= z.squaredNorm());
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(FdAmm(2, 0, 3), ParameterError);
  CHECK_THROWS_AS(SfdAmm(2, 3, 0), ParameterError);
  FdAmm f(2, 3, 2);
  const std::vector<double> x{1, 2, 3}, bad{1, 2, 3};
  CHECK_THROWS_AS(f.update(x, bad), DimensionError);
  SfdAmm s(2, 3, 2);
  CHECK_THROWS_AS(s.update(SparseVector(3), SparseVector(3)), DimensionError);
}
