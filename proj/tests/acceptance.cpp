// Acceptance run: one PASS/FAIL line per criterion. Data generation, spectra and every bound are
// computed here from first principles; only the sketches themselves come from the library.

#include "amm/cod.hpp"
#include "amm/fd.hpp"
#include "amm/oracle.hpp"
#include "amm/scod.hpp"
#include "amm/spm.hpp"
#include "amm/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace amm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Spectra

/// Nonincreasing singular values: one-sided Jacobi for small matrices, the eigenvalues of the
/// smaller Gram matrix otherwise.
Vector sv(const DenseMatrix& m) {
  const Index small = std::min(m.rows(), m.cols());
  if (small == 0) return Vector(0);
  if (small <= 64) return Eigen::JacobiSVD<DenseMatrix>(m).singularValues();
  const DenseMatrix gram = m.rows() <= m.cols() ? DenseMatrix(m * m.transpose()) : DenseMatrix(m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(gram, Eigen::EigenvaluesOnly);
  Vector lambda = eig.eigenvalues().reverse();
  return lambda.cwiseMax(0.0).cwiseSqrt();
}

double spectral(const DenseMatrix& m) {
  const Vector s = sv(m);
  return s.size() ? s(0) : 0.0;
}

double top_sum(const Vector& s, std::size_t k) {
  return s.head(std::min<Index>(static_cast<Index>(k), s.size())).sum();
}

double value_at(const Vector& s, std::size_t i) { return static_cast<Index>(i) < s.size() ? s(static_cast<Index>(i)) : 0.0; }

// ---------------------------------------------------------------------------
// Data

struct PairSpec {
  std::size_t n = 100, dx = 20, dy = 20, rank = 5;
  double decay = 0.8, noise = 0.0, density = 1.0;
  std::uint64_t seed = 0;
};

struct Pair {
  SparseMatrix x, y;
  DenseMatrix xd() const { return x.to_dense(); }
  DenseMatrix yd() const { return y.to_dense(); }
};

DenseMatrix orthonormal_columns(Index d, Index r, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix g(d, r);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < d; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  return qr.householderQ() * DenseMatrix::Identity(d, r);
}

/// Rows x_t = V_x S u_t + noise and y_t = V_y S u_t + noise for a shared Gaussian u_t, with
/// orthonormal V_x, V_y and S = diag(decay^i); each entry survives independently with
/// probability `density` (sampled by geometric skipping so sparse streams cost O(nnz)).
Pair correlated_pair(const PairSpec& s) {
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Index r = static_cast<Index>(std::min({s.rank, s.dx, s.dy}));
  const DenseMatrix vx = orthonormal_columns(static_cast<Index>(s.dx), r, rng);
  const DenseMatrix vy = orthonormal_columns(static_cast<Index>(s.dy), r, rng);
  Vector weights(r);
  for (Index i = 0; i < r; ++i) weights(i) = std::pow(s.decay, static_cast<double>(i));

  std::vector<SparseMatrix::Triplet> tx, ty;
  const double log_skip = s.density < 1.0 ? std::log1p(-s.density) : 0.0;
  auto emit = [&](std::vector<SparseMatrix::Triplet>& out, const DenseMatrix& v, std::size_t t, const Vector& u) {
    const std::size_t d = static_cast<std::size_t>(v.rows());
    auto value = [&](std::size_t j) { return v.row(static_cast<Index>(j)).dot(u) + s.noise * normal(rng); };
    if (s.density >= 1.0) {
      for (std::size_t j = 0; j < d; ++j) out.push_back({t, j, value(j)});
      return;
    }
    for (std::size_t j = 0;; ++j) {
      j += static_cast<std::size_t>(std::floor(std::log(1.0 - unit(rng)) / log_skip));
      if (j >= d) break;
      out.push_back({t, j, value(j)});
    }
  };
  Vector u(r);
  for (std::size_t t = 0; t < s.n; ++t) {
    for (Index i = 0; i < r; ++i) u(i) = weights(i) * normal(rng);
    emit(tx, vx, t, u);
    emit(ty, vy, t, u);
  }
  return {SparseMatrix::from_triplets(s.n, s.dx, std::move(tx)), SparseMatrix::from_triplets(s.n, s.dy, std::move(ty))};
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double pick(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

DenseMatrix run_fd(const SparseMatrix& x, std::size_t m, FdOptions opts = {}) {
  FrequentDirections fd(m, x.cols(), opts);
  for (std::size_t t = 0; t < x.rows(); ++t) fd.update(x.row(t));
  return fd.finalize();
}

CoOccurringDirections run_cod(const SparseMatrix& x, const SparseMatrix& y, std::size_t m, CodOptions opts = {}) {
  CoOccurringDirections cod(m, x.cols(), y.cols(), opts);
  for (std::size_t t = 0; t < x.rows(); ++t) cod.update(x.row(t), y.row(t));
  return cod;
}

void feed(ScodSketch& s, const Pair& p) {
  for (std::size_t t = 0; t < p.x.rows(); ++t) s.update(p.x.row(t), p.y.row(t));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// ---------------------------------------------------------------------------
// Bounds

/// Smallest k < m for which the covariance bound is violated, or -1.
int covariance_bound_violation(const DenseMatrix& x, const DenseMatrix& a, std::size_t m) {
  const double err = spectral(x.transpose() * x - a.transpose() * a);
  const Vector s = sv(x);
  const double total = s.squaredNorm();
  const double slack = 1e-9 * std::max(1.0, total);
  for (std::size_t k = 0; k < m; ++k) {
    const double head = s.head(std::min<Index>(static_cast<Index>(k), s.size())).squaredNorm();
    if (err > (total - head) / static_cast<double>(m - k) + slack) return static_cast<int>(k);
  }
  return -1;
}

struct ProductFacts {
  Vector sigma;  // singular values of X^T Y
  double frob = 0.0;
  double nuclear() const { return sigma.sum(); }
  double product_bound(std::size_t m, std::size_t k) const {
    return std::max(0.0, frob - top_sum(sigma, k)) / static_cast<double>(m - k);
  }
  double best_product_bound(std::size_t m) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) best = std::min(best, product_bound(m, k));
    return best;
  }
};

ProductFacts facts_of(const DenseMatrix& x, const DenseMatrix& y) {
  return {sv(x.transpose() * y), x.norm() * y.norm()};
}

/// Shrink-mass diagnostics for one co-occurring run; returns the first failure or "".
std::string shrink_mass_failure(const ProductFacts& f, double err, const DenseMatrix& sketch_product, std::size_t m,
                                double delta) {
  const double slack = 1e-9 * std::max(1.0, f.frob);
  if (err > delta + slack) return "error " + fmt(err) + " > shrink mass " + fmt(delta);
  const double sketch_nuclear = sv(sketch_product).sum();
  if (sketch_nuclear > f.frob - static_cast<double>(m) * delta + slack) return "sketch nuclear norm over budget";
  for (std::size_t k = 0; k < m; ++k) {
    const double tail = f.nuclear() - top_sum(f.sigma, k);
    if (f.nuclear() - sketch_nuclear > tail + static_cast<double>(k) * delta + slack)
      return "nuclear gap at k=" + std::to_string(k);
  }
  return {};
}

double sparse_bound(const ProductFacts& f, std::size_t m, std::size_t k, double eps) {
  const double gap = static_cast<double>(m - k);
  return ((2.0 + eps) / gap + (1.0 + eps) * static_cast<double>(k) / (gap * gap)) *
         std::max(0.0, f.frob - top_sum(f.sigma, k));
}

/// max over flushes of ||M - Z Z^T M|| / sigma_{m+1}(M), minus one, floored at zero.
double measured_epsilon(const std::vector<FlushRecord>& log, std::size_t m) {
  double worst = 1.0;
  for (const FlushRecord& rec : log) {
    const DenseMatrix mat = rec.x_buf->to_dense().transpose() * rec.y_buf->to_dense();
    const Vector s = sv(mat);
    if (s.size() == 0 || s(0) == 0.0) continue;
    const double next = value_at(s, m);
    if (next <= 1e-10 * s(0)) continue;
    worst = std::max(worst, spectral(mat - rec.z * (rec.z.transpose() * mat)) / next);
  }
  return worst - 1.0;
}

// ---------------------------------------------------------------------------
// Criteria

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

constexpr std::size_t kSizes[] = {4, 8, 16};

Outcome covariance_sketch_bound() {
  const auto t0 = Clock::now();
  Outcome o;
  std::mt19937_64 rng(101);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const std::size_t m = kSizes[i % 3];
    PairSpec s;
    s.n = pick(rng, std::size_t{50}, std::size_t{500});
    s.dx = s.dy = pick(rng, std::size_t{5}, std::size_t{40});
    s.rank = pick(rng, std::size_t{1}, s.dx);
    s.decay = pick(rng, 0.5, 1.0);
    s.noise = pick(rng, 0.0, 0.5);
    s.seed = rng();
    const Pair p = correlated_pair(s);
    const int k = covariance_bound_violation(p.xd(), run_fd(p.x, m), m);
    if (k >= 0) o.fail("stream " + std::to_string(i) + " violates k=" + std::to_string(k));
    ++checked;
  }
  const double secs = seconds_since(t0);
  if (secs >= 60.0) o.fail("took " + fmt(secs) + " s");
  if (o.pass) o.detail = std::to_string(checked) + " streams, every k < m, " + fmt(secs) + " s";
  return o;
}

struct CodInstance {
  ProductFacts facts;
  double err = 0.0;
  double delta = 0.0;
  DenseMatrix sketch_product;
  std::size_t m = 0;
};

std::vector<CodInstance> cod_instances;  // shared by the product-bound and shrink-mass criteria
double low_rank_tight_fraction = 0.0;

CodInstance cod_instance(const Pair& p, std::size_t m, CodOptions opts = {}) {
  const CoOccurringDirections cod = run_cod(p.x, p.y, m, opts);
  CodInstance c;
  const DenseMatrix x = p.xd(), y = p.yd();
  c.facts = facts_of(x, y);
  c.sketch_product = cod.a().transpose() * cod.b();
  c.err = spectral(x.transpose() * y - c.sketch_product);
  c.delta = cod.delta_sum();
  c.m = m;
  return c;
}

Outcome product_sketch_bound() {
  Outcome o;
  std::mt19937_64 rng(202);
  for (std::size_t i = 0; i < 50; ++i) {
    const std::size_t m = kSizes[i % 3];
    PairSpec s;
    s.n = pick(rng, std::size_t{50}, std::size_t{500});
    s.dx = pick(rng, std::size_t{5}, std::size_t{40});
    s.dy = pick(rng, std::size_t{5}, std::size_t{40});
    s.rank = pick(rng, std::size_t{1}, std::min(s.dx, s.dy));
    s.decay = pick(rng, 0.5, 1.0);
    s.noise = pick(rng, 0.0, 0.5);
    s.seed = rng();
    cod_instances.push_back(cod_instance(correlated_pair(s), m));
  }
  const std::size_t general = cod_instances.size();
  for (std::size_t i = 0; i < 50; ++i) {
    const std::size_t m = kSizes[i % 3];
    PairSpec s;
    s.n = pick(rng, std::size_t{50}, std::size_t{500});
    s.dx = pick(rng, std::max<std::size_t>(m, 5), std::size_t{40});
    s.dy = pick(rng, std::max<std::size_t>(m, 5), std::size_t{40});
    s.rank = m / 2;
    s.decay = 0.5;
    s.noise = 0.01;
    s.seed = rng();
    cod_instances.push_back(cod_instance(correlated_pair(s), m));
  }

  std::size_t tight = 0;
  for (std::size_t i = 0; i < cod_instances.size(); ++i) {
    const CodInstance& c = cod_instances[i];
    const double slack = 1e-9 * std::max(1.0, c.facts.frob);
    for (std::size_t k = 0; k < c.m; ++k) {
      if (c.err > c.facts.product_bound(c.m, k) + slack)
        o.fail("instance " + std::to_string(i) + " violates k=" + std::to_string(k));
    }
    const double best = c.facts.best_product_bound(c.m);
    const double frob_bound = c.facts.frob / static_cast<double>(c.m);
    if (best > frob_bound + slack) o.fail("instance " + std::to_string(i) + ": min bound above the Frobenius bound");
    if (i >= general && best / frob_bound < 0.5) ++tight;
  }
  low_rank_tight_fraction = static_cast<double>(tight) / static_cast<double>(cod_instances.size() - general);
  if (low_rank_tight_fraction < 0.8)
    o.fail("ratio < 0.5 on only " + fmt(100 * low_rank_tight_fraction) + "% of low-rank pairs");
  if (o.pass)
    o.detail = std::to_string(cod_instances.size()) + " pairs; ratio < 0.5 on " +
               fmt(100 * low_rank_tight_fraction) + "% of low-rank pairs";
  return o;
}

Outcome shrink_mass() {
  Outcome o;
  for (std::size_t i = 0; i < cod_instances.size(); ++i) {
    const CodInstance& c = cod_instances[i];
    const std::string bad = shrink_mass_failure(c.facts, c.err, c.sketch_product, c.m, c.delta);
    if (!bad.empty()) o.fail("instance " + std::to_string(i) + ": " + bad);
  }
  if (cod_instances.empty()) o.fail("no co-occurring runs recorded");
  if (o.pass) o.detail = std::to_string(cod_instances.size()) + " runs, three checks each";
  return o;
}

Outcome symmetric_reduction() {
  Outcome o;
  std::mt19937_64 rng(404);
  double worst_gram = 0.0, worst_bound = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    const std::size_t m = kSizes[i % 3];
    PairSpec s;
    s.n = pick(rng, std::size_t{50}, std::size_t{500});
    s.dx = s.dy = pick(rng, std::size_t{5}, std::size_t{40});
    s.rank = pick(rng, std::size_t{1}, s.dx);
    s.decay = pick(rng, 0.5, 1.0);
    s.noise = pick(rng, 0.0, 0.5);
    s.seed = rng();
    const Pair p = correlated_pair(s);
    const DenseMatrix a = run_fd(p.x, m);
    const CoOccurringDirections cod = run_cod(p.x, p.x, m);
    const DenseMatrix gram = a.transpose() * a;
    const double rel = (gram - cod.a().transpose() * cod.b()).norm() / std::max(gram.norm(), 1e-300);
    worst_gram = std::max(worst_gram, rel);
    if (rel > 1e-8) o.fail("stream " + std::to_string(i) + ": relative difference " + fmt(rel));

    const DenseMatrix x = p.xd();
    for (std::size_t k = 0; k < m; ++k) {
      const double scale = x.squaredNorm() / static_cast<double>(m - k);
      const double diff = std::abs(bound_theorem1(x, x, m, k) - bound_lemma1(x, m, k)) / scale;
      worst_bound = std::max(worst_bound, diff);
      if (diff > 1e-12) o.fail("stream " + std::to_string(i) + " k=" + std::to_string(k) + ": bounds differ");
      // Both must also agree with the spectrum computed here.
      const Vector sx = sv(x);
      const double mine = (sx.squaredNorm() - sx.head(std::min<Index>(k, sx.size())).squaredNorm()) /
                          static_cast<double>(m - k);
      if (std::abs(mine - bound_lemma1(x, m, k)) > 1e-9 * scale) o.fail("covariance bound disagrees with oracle");
    }
  }
  if (o.pass)
    o.detail = "20 streams; worst Gram gap " + fmt(worst_gram) + ", worst bound gap " + fmt(worst_bound);
  return o;
}

Outcome power_method_contract() {
  Outcome o;
  std::mt19937_64 rng(505);
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < 20; ++i) {
    const std::size_t m = i % 2 ? 4 : 8;
    const std::size_t dx = pick(rng, std::size_t{20}, std::size_t{80});
    const std::size_t dy = pick(rng, std::size_t{20}, std::size_t{80});
    // A rank-r product (r <= m) buffered over many rows: X = U Px, Y = U Py with r-column U.
    const std::size_t r = pick(rng, std::size_t{1}, m);
    const std::size_t rows = pick(rng, std::size_t{20}, std::size_t{100});
    DenseMatrix u(rows, r), px(r, dx), py(r, dy);
    for (Index a = 0; a < u.size(); ++a) u.data()[a] = normal(rng);
    for (Index a = 0; a < px.size(); ++a) px.data()[a] = normal(rng);
    for (Index a = 0; a < py.size(); ++a) py.data()[a] = normal(rng);
    const DenseMatrix xd = u * px, yd = i % 3 == 0 ? DenseMatrix(DenseMatrix::Random(rows, dy)) : DenseMatrix(u * py);
    const SparseMatrix xb = SparseMatrix::from_dense(xd), yb = SparseMatrix::from_dense(yd);
    const DenseMatrix mat = xd.transpose() * yd;
    const DenseMatrix z = subspace_power_method(xb, yb, {.target_rank = m, .power_iterations = 5, .seed = rng()});
    const double res = spectral(mat - z * (z.transpose() * mat));
    if (res > 1e-8 * mat.norm()) o.fail("rank <= m case " + std::to_string(i) + ": residual " + fmt(res));
  }

  std::size_t good = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    PairSpec s;
    s.n = 200;
    s.dx = s.dy = 60;
    s.rank = 30;
    s.decay = 0.85;
    s.noise = 0.05;
    s.density = 0.1;
    s.seed = rng();
    const Pair p = correlated_pair(s);
    const DenseMatrix mat = p.xd().transpose() * p.yd();
    const DenseMatrix z = subspace_power_method(p.x, p.y, {.target_rank = 8, .power_iterations = 5, .seed = rng()});
    const Vector sigma = sv(mat);
    if (spectral(mat - z * (z.transpose() * mat)) <= 1.5 * value_at(sigma, 8) + 1e-12 * sigma(0)) ++good;
  }
  if (good < 95) o.fail("within 1.5 sigma_{m+1} on only " + std::to_string(good) + "/100 trials");

  PairSpec s;
  s.n = 400;
  s.dx = s.dy = 80;
  s.rank = 40;
  s.decay = 0.9;
  s.noise = 0.05;
  s.density = 0.1;
  s.seed = 5050;
  const Pair p = correlated_pair(s);
  const DenseMatrix mat = p.xd().transpose() * p.yd();
  const double next = sv(mat)(8);
  double previous = std::numeric_limits<double>::infinity();
  std::string trace;
  for (std::size_t q : {1, 3, 5, 9}) {
    const DenseMatrix z = subspace_power_method(p.x, p.y, {.target_rank = 8, .power_iterations = q, .seed = 77});
    const double eps = spectral(mat - z * (z.transpose() * mat)) / next - 1.0;
    trace += (trace.empty() ? "" : ", ") + std::string("q=") + std::to_string(q) + ": " + fmt(eps);
    if (eps > previous + 1e-10) o.fail("epsilon increased with q (" + trace + ")");
    previous = eps;
  }
  if (o.pass) o.detail = "20 exact cases; " + std::to_string(good) + "/100 within 1.5 sigma_{m+1}; " + trace;
  return o;
}

struct ScodInstance {
  Pair pair;
  std::size_t m;
  std::uint64_t seed;
};

std::vector<ScodInstance> scod_instances() {
  std::mt19937_64 rng(606);
  std::vector<ScodInstance> out;
  for (std::size_t i = 0; i < 30; ++i) {
    PairSpec s;
    s.n = pick(rng, std::size_t{500}, std::size_t{2000});
    s.dx = pick(rng, std::size_t{50}, std::size_t{200});
    s.dy = pick(rng, std::size_t{50}, std::size_t{200});
    s.rank = pick(rng, std::size_t{10}, std::size_t{40});
    s.decay = pick(rng, 0.7, 0.95);
    s.noise = pick(rng, 0.0, 0.2);
    s.density = pick(rng, 0.01, 0.05);
    s.seed = rng();
    out.push_back({correlated_pair(s), i % 2 ? std::size_t{16} : std::size_t{8}, rng()});
  }
  return out;
}

Outcome flush_invariants(const std::vector<ScodInstance>& instances) {
  Outcome o;
  std::size_t flushes = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const ScodInstance& inst = instances[i];
    ScodSketch scod(inst.m, inst.pair.x.cols(), inst.pair.y.cols(), QSchedule::fixed(5), inst.seed,
                    FlushDiagnostics::retain);
    feed(scod, inst.pair);
    scod.finalize();
    for (const FlushRecord& rec : scod.flush_log()) {
      ++flushes;
      const std::string where = "instance " + std::to_string(i) + " flush " + std::to_string(rec.index);
      const DenseMatrix xb = rec.x_buf->to_dense(), yb = rec.y_buf->to_dense();
      const double before = xb.norm() * yb.norm();
      const double after = rec.x_tilde.norm() * rec.y_tilde.norm();
      if (after > before * (1.0 + 1e-9)) o.fail(where + ": Frobenius product grew");

      // Squared singular values are the eigenvalues of the small Gram matrices.
      Eigen::SelfAdjointEigenSolver<DenseMatrix> ex(rec.x_tilde * rec.x_tilde.transpose(), Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<DenseMatrix> ey(rec.y_tilde * rec.y_tilde.transpose(), Eigen::EigenvaluesOnly);
      const Vector gx = ex.eigenvalues(), gy = ey.eigenvalues();
      const double top = std::max(gx.size() ? gx.maxCoeff() : 0.0, gy.size() ? gy.maxCoeff() : 0.0);
      if (gx.size() != gy.size() || (gx.size() && (gx - gy).cwiseAbs().maxCoeff() > 1e-8 * std::max(top, 1e-300)))
        o.fail(where + ": factor spectra differ");

      const DenseMatrix mat = xb.transpose() * yb;
      const double diff = (rec.x_tilde.transpose() * rec.y_tilde - rec.z * (rec.z.transpose() * mat)).norm();
      if (diff > 1e-9 * std::max(mat.norm(), 1e-300)) o.fail(where + ": compressed product differs by " + fmt(diff));
    }
  }
  if (flushes == 0) o.fail("no flushes recorded");
  if (o.pass) o.detail = std::to_string(flushes) + " flushes over " + std::to_string(instances.size()) + " runs";
  return o;
}

Outcome sparse_end_to_end(const std::vector<ScodInstance>& instances) {
  Outcome o;
  std::size_t close = 0;
  double worst_eps = 0.0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const ScodInstance& inst = instances[i];
    const std::size_t m = inst.m;
    ScodSketch scod(m, inst.pair.x.cols(), inst.pair.y.cols(), QSchedule::fixed(5), inst.seed,
                    FlushDiagnostics::retain);
    feed(scod, inst.pair);
    const ScodResult res = scod.finalize();
    const double eps = measured_epsilon(scod.flush_log(), m);
    worst_eps = std::max(worst_eps, eps);

    const DenseMatrix x = inst.pair.xd(), y = inst.pair.yd();
    const DenseMatrix exact = x.transpose() * y;
    const ProductFacts f{sv(exact), x.norm() * y.norm()};
    const double err = spectral(exact - res.a.transpose() * res.b);
    const double slack = 1e-9 * std::max(1.0, f.frob);
    for (std::size_t k = 0; k < m; ++k) {
      if (err > sparse_bound(f, m, k, eps) + slack)
        o.fail("instance " + std::to_string(i) + " violates k=" + std::to_string(k));
    }
    const CoOccurringDirections cod = run_cod(inst.pair.x, inst.pair.y, m);
    const double cod_err = spectral(exact - cod.a().transpose() * cod.b());
    if (err <= 3.0 * cod_err + slack) ++close;
  }
  const double frac = static_cast<double>(close) / static_cast<double>(instances.size());
  if (frac < 0.9) o.fail("within 3x COD on only " + fmt(100 * frac) + "% of instances");
  if (o.pass)
    o.detail = std::to_string(instances.size()) + " runs, measured epsilon <= " + fmt(worst_eps) +
               "; within 3x COD on " + fmt(100 * frac) + "%";
  return o;
}

Outcome performance_shape() {
  Outcome o;
  const std::size_t n = 50000, d = 2000, m = 16;
  const double densities[] = {0.005, 0.01, 0.02, 0.04};
  std::vector<double> lx, ly;
  double scod_base = 0.0, cod_base = 0.0;
  std::string trace;
  for (double density : densities) {
    PairSpec s;
    s.n = n;
    s.dx = s.dy = d;
    s.rank = 50;
    s.decay = 0.9;
    s.noise = 0.1;
    s.density = density;
    s.seed = 808;
    const Pair p = correlated_pair(s);
    std::vector<double> runs;
    for (std::uint64_t rep = 0; rep < 3; ++rep) {
      const auto t0 = Clock::now();
      ScodSketch scod(m, d, d, QSchedule::fixed(5), rep);
      feed(scod, p);
      scod.finalize();
      runs.push_back(seconds_since(t0));
    }
    const double t = median(runs);
    lx.push_back(std::log(static_cast<double>(p.x.nnz() + p.y.nnz())));
    ly.push_back(std::log(t));
    trace += "density " + fmt(density) + ": " + fmt(t) + " s; ";
    if (density == densities[0]) {
      scod_base = t;
      const auto t0 = Clock::now();
      run_cod(p.x, p.y, m);
      cod_base = seconds_since(t0);
    }
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  if (scod_base > 0.5 * cod_base) o.fail("SCOD " + fmt(scod_base) + " s vs COD " + fmt(cod_base) + " s");
  if (slope > 1.2) o.fail("time-vs-nnz slope " + fmt(slope));
  const std::string shape = "SCOD " + fmt(scod_base) + " s vs COD " + fmt(cod_base) + " s at density 0.005; " +
                            trace + "slope " + fmt(slope);
  o.detail = o.pass ? shape : o.detail + " (" + shape + ")";
  return o;
}

Outcome error_vs_sketch_size() {
  Outcome o;
  PairSpec s;
  s.n = 4000;
  s.dx = s.dy = 300;
  s.rank = 80;
  s.decay = 0.85;
  s.noise = 0.05;
  s.density = 0.05;
  s.seed = 909;
  const Pair p = correlated_pair(s);
  const DenseMatrix x = p.xd(), y = p.yd();
  const DenseMatrix exact = x.transpose() * y;
  const double denom = x.norm() * y.norm();
  double prev_cod = std::numeric_limits<double>::infinity(), prev_scod = prev_cod;
  std::string trace;
  for (std::size_t m : {8, 16, 32, 64}) {
    const CoOccurringDirections cod = run_cod(p.x, p.y, m);
    const double cod_rel = spectral(exact - cod.a().transpose() * cod.b()) / denom;
    std::vector<double> seeds;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      ScodSketch scod(m, s.dx, s.dy, QSchedule::fixed(5), 1000 + seed);
      feed(scod, p);
      const ScodResult r = scod.finalize();
      seeds.push_back(spectral(exact - r.a.transpose() * r.b) / denom);
    }
    const double scod_rel = median(seeds);
    trace += "m=" + std::to_string(m) + ": " + fmt(cod_rel) + "/" + fmt(scod_rel) + "; ";
    if (cod_rel > prev_cod) o.fail("COD error increased at m=" + std::to_string(m));
    if (scod_rel > prev_scod) o.fail("SCOD median error increased at m=" + std::to_string(m));
    prev_cod = cod_rel;
    prev_scod = scod_rel;
  }
  o.detail = o.pass ? "cod/scod relative error " + trace : o.detail + " (" + trace + ")";
  return o;
}

Outcome mutation_sensitivity() {
  Outcome o;
  const SparseMatrix fd_stream = SparseMatrix::from_dense(adversarial_fd_stream());
  const DenseMatrix fx = fd_stream.to_dense();
  if (covariance_bound_violation(fx, run_fd(fd_stream, 2), 2) >= 0) o.fail("correct FD flagged");
  if (covariance_bound_violation(fx, run_fd(fd_stream, 2, FdOptions{.shrink = false}), 2) < 0)
    o.fail("FD without shrink satisfied the covariance bound");

  const Pair cod_stream{SparseMatrix::from_dense(adversarial_cod_stream()),
                        SparseMatrix::from_dense(adversarial_cod_stream())};
  const auto failure = [&](CodOptions opts) {
    const CodInstance c = cod_instance(cod_stream, 2, opts);
    return shrink_mass_failure(c.facts, c.err, c.sketch_product, 2, c.delta);
  };
  if (!failure({}).empty()) o.fail("correct COD flagged: " + failure({}));
  const std::string caught = failure({.delta_rank = 3});
  if (caught.empty()) o.fail("COD shrinking by sigma_{m+1} passed the shrink-mass checks");
  if (o.pass) o.detail = "both defects caught; COD defect: " + caught;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<ScodInstance> sparse;
  const std::vector<Criterion> criteria = {
      {1, "covariance-sketch-error-bound", covariance_sketch_bound},
      {2, "product-sketch-error-bound", product_sketch_bound},
      {3, "shrink-mass-diagnostics", shrink_mass},
      {4, "symmetric-reduction", symmetric_reduction},
      {5, "power-method-accuracy", power_method_contract},
      {6, "flush-invariants",
       [&] {
         sparse = scod_instances();
         return flush_invariants(sparse);
       }},
      {7, "sparse-sketch-end-to-end", [&] { return sparse_end_to_end(sparse); }},
      {8, "performance-shape", performance_shape},
      {9, "error-vs-sketch-size", error_vs_sketch_size},
      {10, "mutation-sensitivity", mutation_sensitivity},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s %2d %-30s %7.1f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
