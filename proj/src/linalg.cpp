#include "amm/linalg.hpp"

#include "amm/errors.hpp"
#include "amm/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace amm {

namespace {

std::string dims(const DenseMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ValueError(std::string(what) + ": non-finite entry");
  }
}

void require_finite(const DenseMatrix& m, const char* what) {
  if (!m.allFinite()) throw ValueError(std::string(what) + ": non-finite entry");
}

Vector singular_values(const DenseMatrix& m) {
  if (m.size() == 0) return Vector(0);
  if (!m.allFinite()) throw KernelError("svd: non-finite input " + dims(m));
  Eigen::BDCSVD<DenseMatrix> svd(m);
  if (svd.info() != Eigen::Success) throw KernelError("svd: no convergence on " + dims(m));
  return svd.singularValues();
}

SvdResult thin_svd(const DenseMatrix& m) {
  SvdResult out;
  if (m.size() == 0) {
    out.u.resize(m.rows(), 0);
    out.v.resize(m.cols(), 0);
    return out;
  }
  if (!m.allFinite()) throw KernelError("svd: non-finite input " + dims(m));
  Eigen::BDCSVD<DenseMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw KernelError("svd: no convergence on " + dims(m));

  const Vector& s = svd.singularValues();
  Index rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    const double cutoff = kRankTolerance * s(0);
    while (rank < s.size() && s(rank) >= cutoff && s(rank) > 0.0) ++rank;
  }
  out.u = svd.matrixU().leftCols(rank);
  out.singular_values = s.head(rank);
  out.v = svd.matrixV().leftCols(rank);
  return out;
}

QrResult thin_qr(const DenseMatrix& m) {
  if (m.rows() < m.cols()) throw DimensionError("thin_qr: rows < cols for " + dims(m));
  if (!m.allFinite()) throw KernelError("qr: non-finite input " + dims(m));
  const Index n = m.cols();
  Eigen::HouseholderQR<DenseMatrix> qr(m);
  QrResult out;
  out.q = qr.householderQ() * DenseMatrix::Identity(m.rows(), n);
  out.r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  return out;
}

DenseMatrix orthonormal_columns(const DenseMatrix& k) {
  if (k.cols() == 0 || k.rows() == 0) return DenseMatrix(k.rows(), 0);
  if (!k.allFinite()) throw KernelError("orthonormal_columns: non-finite input " + dims(k));
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(k);
  qr.setThreshold(kRankTolerance);
  const Index rank = qr.rank();
  return qr.householderQ() * DenseMatrix::Identity(k.rows(), rank);
}

double ky_fan_norm(const Vector& sigma, std::size_t k) {
  const Index n = std::min<Index>(sigma.size(), static_cast<Index>(k));
  return sigma.head(n).sum();
}

double ky_fan_norm(const DenseMatrix& m, std::size_t k) {
  if (k == 0) return 0.0;
  return ky_fan_norm(singular_values(m), k);
}

double nuclear_norm(const DenseMatrix& m) { return singular_values(m).sum(); }

Vector shrink_values(const Vector& sigma, double delta) {
  return (sigma.array() - delta).cwiseMax(0.0).matrix();
}

LinearOperator LinearOperator::from_dense(const DenseMatrix& m) {
  return LinearOperator{
      m.rows(), m.cols(),
      [m](const Vector& v) -> Vector { return m * v; },
      [m](const Vector& u) -> Vector { return m.transpose() * u; },
  };
}

SpectralEstimate spectral_norm(const LinearOperator& op, const PowerIterationOptions& options) {
  if (!(options.tol > 0.0)) throw ParameterError("spectral_norm: tol must be positive");
  SpectralEstimate est;
  if (op.rows == 0 || op.cols == 0) {
    est.converged = true;
    return est;
  }

  const CounterNormal normal(options.seed);
  Vector v(op.cols);
  for (Index i = 0; i < v.size(); ++i) v(i) = normal.draw(static_cast<std::uint64_t>(i));
  v.normalize();

  double previous = 0.0;
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    const Vector w = op.apply(v);
    if (w.size() != op.rows) throw DimensionError("spectral_norm: operator returned wrong length");
    est.value = w.norm();
    est.iterations = it;
    if (est.value == 0.0) {
      est.converged = true;
      return est;
    }
    Vector u = op.apply_adjoint(w);
    if (u.size() != op.cols) throw DimensionError("spectral_norm: adjoint returned wrong length");
    const double un = u.norm();
    if (un == 0.0) {
      est.converged = true;
      return est;
    }
    v = u / un;
    if (it > 1 && std::abs(est.value - previous) <= options.tol * est.value) {
      est.converged = true;
      return est;
    }
    previous = est.value;
  }
  return est;
}

}  // namespace amm
