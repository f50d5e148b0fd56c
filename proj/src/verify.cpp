#include "amm/verify.hpp"

#include "amm/cod.hpp"
#include "amm/data_io.hpp"
#include "amm/fd.hpp"
#include "amm/oracle.hpp"
#include "amm/scod.hpp"
#include "amm/spm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace amm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t scaled(double base, const VerifyOptions& options) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(base * options.scale)));
}

class Tally {
 public:
  explicit Tally(SuiteResult& r) : r_(r) {}

  void check(bool ok, const std::string& what) {
    ++r_.checks;
    if (!ok) {
      ++r_.violations;
      if (r_.detail.empty()) r_.detail = what;
    }
  }

 private:
  SuiteResult& r_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void feed(FrequentDirections& fd, const SparseMatrix& x) {
  for (std::size_t t = 0; t < x.rows(); ++t) fd.update(x.row(t));
}

void feed(CoOccurringDirections& cod, const SparseMatrix& x, const SparseMatrix& y) {
  for (std::size_t t = 0; t < x.rows(); ++t) cod.update(x.row(t), y.row(t));
}

void feed(ScodSketch& s, const SparseMatrix& x, const SparseMatrix& y) {
  for (std::size_t t = 0; t < x.rows(); ++t) s.update(x.row(t), y.row(t));
}

double spectral(const DenseMatrix& m) {
  const Vector s = singular_values(m);
  return s.size() ? s(0) : 0.0;
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

constexpr std::size_t kSketchSizes[] = {4, 8, 16};

// Random dense-ish stream for the covariance suites.
SparseMatrix random_stream(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  SynthConfig cfg;
  cfg.n = n;
  cfg.dx = d;
  cfg.dy = d;
  cfg.rank = uniform(rng, std::size_t{1}, d);
  cfg.decay = uniform(rng, 0.5, 1.0);
  cfg.noise = uniform(rng, 0.0, 0.5);
  cfg.seed = rng();
  return gen_synthetic_pair(cfg).x;
}

// Covariance-bound check for one FD run; returns the first violated k description or "".
std::string fd_bound_violation(const SparseMatrix& x, std::size_t m, const DenseMatrix& a) {
  const DenseMatrix xd = x.to_dense();
  const double err = spectral(xd.transpose() * xd - a.transpose() * a);
  const double slack = kCheckTolerance * std::max(1.0, xd.squaredNorm());
  for (std::size_t k = 0; k < m; ++k) {
    const double rhs = bound_lemma1(xd, m, k);
    if (err > rhs + slack) {
      return "m=" + std::to_string(m) + " k=" + std::to_string(k) + ": error " + fmt(err) + " > " + fmt(rhs);
    }
  }
  return {};
}

SparseMatrix to_sparse(const DenseMatrix& x) { return SparseMatrix::from_dense(x); }

struct CodRun {
  ProductSpectrum spectrum;
  double error = 0.0;
  ShrinkChecks shrink;
};

CodRun run_cod(const SparseMatrix& x, const SparseMatrix& y, std::size_t m, const Mutations& mut) {
  CodOptions opts;
  if (mut.cod_delta_next) opts.delta_rank = m + 1;
  CoOccurringDirections cod(m, x.cols(), y.cols(), opts);
  feed(cod, x, y);
  CodRun r;
  r.spectrum = ProductSpectrum::of(x, y);
  r.error = amm_error(x, y, cod.a(), cod.b());
  r.shrink = check_shrink_mass(r.spectrum, r.error, cod.a(), cod.b(), m, cod.delta_sum());
  return r;
}

std::string shrink_violation(const ShrinkChecks& c) {
  if (!c.error_within_delta) return "error exceeds the shrink mass";
  if (!c.nuclear_budget) return "sketch nuclear norm exceeds the shrink budget";
  if (!c.nuclear_gap) return "nuclear gap exceeds the tail plus k times the shrink mass";
  return {};
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

DenseMatrix adversarial_fd_stream(std::size_t repeats) {
  DenseMatrix x = DenseMatrix::Zero(static_cast<Index>(1 + 3 * repeats), 2);
  x(0, 0) = 2.0;
  for (std::size_t t = 0; t < repeats; ++t) {
    const Index base = static_cast<Index>(1 + 3 * t);
    x(base, 0) = 1.0;
    x(base + 1, 1) = 1.0;
    x(base + 2, 1) = 1.0;
  }
  return x;
}

DenseMatrix adversarial_cod_stream() {
  DenseMatrix x = DenseMatrix::Zero(5, 3);
  x(0, 0) = 3.0;
  x(1, 1) = 2.0;
  x(2, 2) = 1.0;
  x(3, 2) = 1.0;
  x(4, 2) = 1.0;
  return x;
}

SuiteResult verify_fd_error_bound(const VerifyOptions& options) {
  const auto t0 = Clock::now();
  SuiteResult r;
  r.name = "fd-covariance-bound";
  r.summary = "Frequent Directions error <= (||X||_F^2 - ||X_k||_F^2)/(m-k) for all k < m";
  Tally tally(r);
  std::mt19937_64 rng(options.seed ^ 0x1);
  const FdOptions fd_opts{.shrink = !options.mutations.fd_no_shrink};

  const std::size_t count = scaled(50, options);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t m = kSketchSizes[i % 3];
    const SparseMatrix x = random_stream(rng, uniform(rng, std::size_t{50}, std::size_t{500}),
                                         uniform(rng, std::size_t{5}, std::size_t{40}));
    FrequentDirections fd(m, x.cols(), fd_opts);
    feed(fd, x);
    const std::string bad = fd_bound_violation(x, m, fd.finalize());
    tally.check(bad.empty(), "stream " + std::to_string(i) + " " + bad);
    ++r.instances;
  }

  const SparseMatrix adv = to_sparse(adversarial_fd_stream());
  FrequentDirections fd(2, 2, fd_opts);
  feed(fd, adv);
  const std::string bad = fd_bound_violation(adv, 2, fd.finalize());
  tally.check(bad.empty(), "adversarial stream " + bad);
  ++r.instances;

  r.passed = r.violations == 0;
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<SuiteResult> verify_cod_bounds(const VerifyOptions& options) {
  const auto t0 = Clock::now();
  SuiteResult bound;
  bound.name = "cod-product-bound";
  bound.summary = "COD error <= (||X||_F||Y||_F - ||X^T Y||_k)/(m-k) for all k < m; min over k <= ||X||_F||Y||_F/m";
  SuiteResult shrink;
  shrink.name = "cod-shrink-mass";
  shrink.summary = "error <= Delta; ||A^T B||_* <= ||X||_F||Y||_F - m Delta; nuclear gap <= tail_k + k Delta";
  Tally tb(bound), ts(shrink);
  std::mt19937_64 rng(options.seed ^ 0x2);

  const auto check_run = [&](const SparseMatrix& x, const SparseMatrix& y, std::size_t m,
                             const std::string& label) -> double {
    const CodRun run = run_cod(x, y, m, options.mutations);
    const double slack = kCheckTolerance * std::max(1.0, run.spectrum.frob_product());
    const std::vector<double> rhs = bound_theorem1_all(run.spectrum, m);
    for (std::size_t k = 0; k < m; ++k) {
      tb.check(run.error <= rhs[k] + slack, label + " k=" + std::to_string(k) + ": error " +
                                                fmt(run.error) + " > " + fmt(rhs[k]));
    }
    const double best = bound_theorem1_min(run.spectrum, m);
    const double frob_bound = bound_lemma2(run.spectrum, m);
    tb.check(best <= frob_bound + slack, label + ": min bound above the Frobenius bound");
    const std::string bad = shrink_violation(run.shrink);
    ts.check(bad.empty(), label + ": " + bad);
    ++bound.instances;
    ++shrink.instances;
    return frob_bound > 0 ? best / frob_bound : 0.0;
  };

  const std::size_t count = scaled(50, options);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t m = kSketchSizes[i % 3];
    SynthConfig cfg;
    cfg.n = uniform(rng, std::size_t{50}, std::size_t{500});
    cfg.dx = uniform(rng, std::size_t{5}, std::size_t{40});
    cfg.dy = uniform(rng, std::size_t{5}, std::size_t{40});
    cfg.rank = uniform(rng, std::size_t{1}, std::min(cfg.dx, cfg.dy));
    cfg.decay = uniform(rng, 0.5, 1.0);
    cfg.noise = uniform(rng, 0.0, 0.5);
    cfg.seed = rng();
    const SyntheticPair p = gen_synthetic_pair(cfg);
    check_run(p.x, p.y, m, "pair " + std::to_string(i));
  }

  // Strongly correlated, approximately low-rank pairs: latent rank m/2, decay 0.5.
  std::size_t tight = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t m = kSketchSizes[i % 3];
    SynthConfig cfg;
    cfg.n = uniform(rng, std::size_t{50}, std::size_t{500});
    cfg.dx = uniform(rng, std::max<std::size_t>(m, 5), std::size_t{40});
    cfg.dy = uniform(rng, std::max<std::size_t>(m, 5), std::size_t{40});
    cfg.rank = m / 2;
    cfg.decay = 0.5;
    cfg.noise = 0.01;
    cfg.seed = rng();
    const SyntheticPair p = gen_synthetic_pair(cfg);
    if (check_run(p.x, p.y, m, "low-rank pair " + std::to_string(i)) < 0.5) ++tight;
  }
  const double tight_fraction = static_cast<double>(tight) / static_cast<double>(count);
  tb.check(tight_fraction >= 0.8, "bound ratio < 0.5 on only " + fmt(100 * tight_fraction) + "% of low-rank pairs");

  const SparseMatrix adv = to_sparse(adversarial_cod_stream());
  check_run(adv, adv, 2, "crafted stream");

  bound.detail = bound.detail.empty()
                     ? "bound ratio < 0.5 on " + fmt(100 * tight_fraction) + "% of low-rank pairs"
                     : bound.detail;
  bound.passed = bound.violations == 0;
  shrink.passed = shrink.violations == 0;
  bound.seconds = shrink.seconds = seconds_since(t0);
  return {bound, shrink};
}

SuiteResult verify_symmetric_reduction(const VerifyOptions& options) {
  const auto t0 = Clock::now();
  SuiteResult r;
  r.name = "symmetric-reduction";
  r.summary = "COD(X, X) product equals the FD Gram sketch; both bounds coincide";
  Tally tally(r);
  std::mt19937_64 rng(options.seed ^ 0x3);

  const std::size_t count = scaled(20, options);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t m = kSketchSizes[i % 3];
    const SparseMatrix x = random_stream(rng, uniform(rng, std::size_t{50}, std::size_t{500}),
                                         uniform(rng, std::size_t{5}, std::size_t{40}));
    FrequentDirections fd(m, x.cols());
    feed(fd, x);
    CoOccurringDirections cod(m, x.cols(), x.cols());
    feed(cod, x, x);
    const DenseMatrix gram = fd.sketch().transpose() * fd.sketch();
    const DenseMatrix prod = cod.a().transpose() * cod.b();
    const double rel = (gram - prod).norm() / std::max(gram.norm(), 1e-300);
    tally.check(rel <= 1e-8, "stream " + std::to_string(i) + ": relative difference " + fmt(rel));

    const DenseMatrix xd = x.to_dense();
    const double scale = xd.squaredNorm();
    for (std::size_t k = 0; k < m; ++k) {
      const double diff = std::abs(bound_theorem1(xd, xd, m, k) - bound_lemma1(xd, m, k));
      tally.check(diff <= 1e-12 * scale / static_cast<double>(m - k),
                  "stream " + std::to_string(i) + " k=" + std::to_string(k) + ": bounds differ by " + fmt(diff));
    }
    ++r.instances;
  }
  r.passed = r.violations == 0;
  r.seconds = seconds_since(t0);
  return r;
}

SuiteResult verify_subspace_power_method(const VerifyOptions& options) {
  const auto t0 = Clock::now();
  SuiteResult r;
  r.name = "subspace-power-method";
  r.summary = "exact on rank <= m; residual <= 1.5 sigma_{m+1} on >= 95% of trials; accuracy improves with q";
  Tally tally(r);
  std::mt19937_64 rng(options.seed ^ 0x4);

  const auto residual = [](const DenseMatrix& m, const DenseMatrix& z) {
    return spectral(m - z * (z.transpose() * m));
  };

  const std::size_t exact_count = scaled(20, options);
  for (std::size_t i = 0; i < exact_count; ++i) {
    const std::size_t m = i % 2 ? 4 : 8;
    const std::size_t dx = uniform(rng, std::size_t{20}, std::size_t{80});
    const std::size_t dy = uniform(rng, std::size_t{20}, std::size_t{80});
    // Either at most m buffered rows, or Y confined to m columns: rank(M) <= m either way.
    const std::size_t rows = i % 4 < 2 ? uniform(rng, std::size_t{1}, m) : uniform(rng, std::size_t{20}, std::size_t{100});
    const std::size_t y_cols = i % 4 < 2 ? dy : m;
    std::normal_distribution<double> normal;
    std::vector<SparseMatrix::Triplet> tx, ty;
    for (std::size_t t = 0; t < rows; ++t) {
      for (std::size_t j = 0; j < dx; ++j) {
        if (uniform(rng, 0.0, 1.0) < 0.2) tx.push_back({t, j, normal(rng)});
      }
      for (std::size_t j = 0; j < y_cols; ++j) {
        if (uniform(rng, 0.0, 1.0) < 0.3) ty.push_back({t, j, normal(rng)});
      }
    }
    const SparseMatrix xb = SparseMatrix::from_triplets(rows, dx, std::move(tx));
    const SparseMatrix yb = SparseMatrix::from_triplets(rows, dy, std::move(ty));
    const DenseMatrix mat = exact_product(xb, yb);
    const DenseMatrix z = subspace_power_method(xb, yb, {.target_rank = m, .power_iterations = 5, .seed = rng()});
    const double res = residual(mat, z);
    tally.check(res <= 1e-8 * mat.norm(), "rank-deficient case " + std::to_string(i) + ": residual " + fmt(res));
    ++r.instances;
  }

  const std::size_t trials = scaled(100, options);
  std::size_t good = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    SynthConfig cfg;
    cfg.n = 200;
    cfg.dx = 60;
    cfg.dy = 60;
    cfg.rank = 30;
    cfg.decay = 0.85;
    cfg.noise = 0.05;
    cfg.density = 0.1;
    cfg.seed = rng();
    const SyntheticPair p = gen_synthetic_pair(cfg);
    const DenseMatrix mat = exact_product(p.x, p.y);
    const std::size_t m = 8;
    const DenseMatrix z = subspace_power_method(p.x, p.y, {.target_rank = m, .power_iterations = 5, .seed = rng()});
    const Vector sigma = singular_values(mat);
    const double next = sigma.size() > static_cast<Index>(m) ? sigma(static_cast<Index>(m)) : 0.0;
    if (residual(mat, z) <= 1.5 * next + 1e-12 * sigma(0)) ++good;
    ++r.instances;
  }
  const double frac = static_cast<double>(good) / static_cast<double>(trials);
  tally.check(frac >= 0.95, "residual within 1.5 sigma_{m+1} on only " + fmt(100 * frac) + "% of trials");

  SynthConfig cfg;
  cfg.n = 400;
  cfg.dx = 80;
  cfg.dy = 80;
  cfg.rank = 40;
  cfg.decay = 0.9;
  cfg.noise = 0.05;
  cfg.density = 0.1;
  cfg.seed = options.seed;
  const SyntheticPair p = gen_synthetic_pair(cfg);
  const DenseMatrix mat = exact_product(p.x, p.y);
  const double next = singular_values(mat)(8);
  double previous = std::numeric_limits<double>::infinity();
  std::string trace;
  for (std::size_t q : {1, 3, 5, 9}) {
    const DenseMatrix z = subspace_power_method(p.x, p.y, {.target_rank = 8, .power_iterations = q, .seed = options.seed});
    const double eps = residual(mat, z) / next - 1.0;
    trace += (trace.empty() ? "" : ", ") + std::string("q=") + std::to_string(q) + ": " + fmt(eps);
    tally.check(eps <= previous + 1e-10, "epsilon increased with q (" + trace + ")");
    previous = eps;
  }
  ++r.instances;
  if (r.detail.empty()) r.detail = fmt(100 * frac) + "% within 1.5 sigma_{m+1}; epsilon " + trace;

  r.passed = r.violations == 0;
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<SuiteResult> verify_sparse_sketch(const VerifyOptions& options) {
  const auto t0 = Clock::now();
  SuiteResult flush;
  flush.name = "flush-invariants";
  flush.summary = "per flush: ||X~||_F||Y~||_F <= ||X'||_F||Y'||_F; equal spectra; X~^T Y~ = Z Z^T X'^T Y'";
  SuiteResult e2e;
  e2e.name = "scod-end-to-end";
  e2e.summary = "SCOD error <= sparse bound with measured epsilon for all k < m; error <= 3x COD on >= 90%";
  Tally tf(flush), te(e2e);
  std::mt19937_64 rng(options.seed ^ 0x6);

  const std::size_t count = scaled(30, options);
  std::size_t close = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t m = i % 2 ? 16 : 8;
    SynthConfig cfg;
    cfg.n = uniform(rng, std::size_t{500}, std::size_t{2000});
    cfg.dx = uniform(rng, std::size_t{50}, std::size_t{200});
    cfg.dy = uniform(rng, std::size_t{50}, std::size_t{200});
    cfg.rank = uniform(rng, std::size_t{10}, std::size_t{40});
    cfg.decay = uniform(rng, 0.7, 0.95);
    cfg.noise = uniform(rng, 0.0, 0.2);
    cfg.density = uniform(rng, 0.01, 0.05);
    cfg.seed = rng();
    const SyntheticPair p = gen_synthetic_pair(cfg);
    const std::string label = "instance " + std::to_string(i);

    ScodSketch scod(m, cfg.dx, cfg.dy, QSchedule::fixed(5), rng(), FlushDiagnostics::retain);
    feed(scod, p.x, p.y);
    const ScodResult res = scod.finalize();

    for (const FlushRecord& rec : scod.flush_log()) {
      const std::string where = label + " flush " + std::to_string(rec.index);
      const double before = rec.buffer_frob_product;
      tf.check(rec.compressed_frob_product <= before * (1.0 + 1e-9) + 1e-300,
               where + ": compressed Frobenius product " + fmt(rec.compressed_frob_product) + " > " + fmt(before));
      const Vector sx = singular_values(rec.x_tilde);
      const Vector sy = singular_values(rec.y_tilde);
      const Index r = std::max(sx.size(), sy.size());
      Vector px = Vector::Zero(r), py = Vector::Zero(r);
      px.head(sx.size()) = sx.array().square().matrix();
      py.head(sy.size()) = sy.array().square().matrix();
      const double top = std::max(px.size() ? px(0) : 0.0, py.size() ? py(0) : 0.0);
      tf.check((px - py).cwiseAbs().maxCoeff() <= 1e-8 * std::max(top, 1e-300) || r == 0,
               where + ": factor spectra differ");
      const DenseMatrix mat = exact_product(*rec.x_buf, *rec.y_buf);
      const DenseMatrix projected = rec.z * (rec.z.transpose() * mat);
      const double diff = (rec.x_tilde.transpose() * rec.y_tilde - projected).norm();
      tf.check(diff <= 1e-9 * std::max(mat.norm(), 1e-300), where + ": compressed product differs by " + fmt(diff));
    }
    flush.instances += scod.flush_log().size();

    const ProductSpectrum spec = ProductSpectrum::of(p.x, p.y);
    const double err = amm_error(p.x, p.y, res.a, res.b);
    const double eps = measure_epsilon_hat(scod.flush_log(), m);
    const double slack = kCheckTolerance * std::max(1.0, spec.frob_product());
    for (std::size_t k = 0; k < m; ++k) {
      const double rhs = bound_theorem3(spec, m, k, eps);
      te.check(err <= rhs + slack, label + " k=" + std::to_string(k) + ": error " + fmt(err) + " > " + fmt(rhs));
    }

    CoOccurringDirections cod(m, cfg.dx, cfg.dy);
    feed(cod, p.x, p.y);
    const double cod_err = amm_error(p.x, p.y, cod.a(), cod.b());
    if (err <= 3.0 * cod_err + slack) ++close;
    ++e2e.instances;
  }
  const double frac = static_cast<double>(close) / static_cast<double>(count);
  te.check(frac >= 0.9, "SCOD within 3x COD on only " + fmt(100 * frac) + "% of instances");
  if (e2e.detail.empty()) e2e.detail = "SCOD within 3x COD on " + fmt(100 * frac) + "% of instances";

  flush.passed = flush.violations == 0 && flush.instances > 0;
  if (flush.instances == 0 && flush.detail.empty()) flush.detail = "no flushes were recorded";
  e2e.passed = e2e.violations == 0;
  flush.seconds = e2e.seconds = seconds_since(t0);
  return {flush, e2e};
}

SuiteResult verify_performance_shape(const VerifyOptions& options) {
  const auto t0 = Clock::now();
  SuiteResult r;
  r.name = "performance-shape";
  r.summary = "SCOD sketch time <= 0.5x COD at density 0.005; SCOD time-vs-nnz log-log slope <= 1.2";
  Tally tally(r);
  const std::size_t m = 16;
  const std::size_t d = 2000;

  const auto timed = [](auto&& fn) {
    const auto start = Clock::now();
    fn();
    return seconds_since(start);
  };

  const double densities[] = {0.005, 0.01, 0.02, 0.04};
  std::vector<double> log_nnz, log_time;
  double scod_base = 0.0, cod_base = 0.0;
  std::ostringstream shape;
  for (double density : densities) {
    SynthConfig cfg;
    cfg.n = options.perf_rows;
    cfg.dx = d;
    cfg.dy = d;
    cfg.rank = 50;
    cfg.decay = 0.9;
    cfg.noise = 0.1;
    cfg.density = density;
    cfg.seed = options.seed;
    const SyntheticPair p = gen_synthetic_pair(cfg);

    std::vector<double> runs;
    for (int rep = 0; rep < 3; ++rep) {
      runs.push_back(timed([&] {
        ScodSketch s(m, d, d, QSchedule::fixed(5), options.seed + static_cast<std::uint64_t>(rep));
        feed(s, p.x, p.y);
        s.finalize();
      }));
    }
    const double t = median(runs);
    const double nnz = static_cast<double>(p.x.nnz() + p.y.nnz());
    log_nnz.push_back(std::log(nnz));
    log_time.push_back(std::log(t));
    shape << "density " << density << ": scod " << fmt(t) << " s; ";
    if (density == densities[0]) {
      scod_base = t;
      cod_base = timed([&] {
        CoOccurringDirections c(m, d, d);
        feed(c, p.x, p.y);
      });
      shape << "cod " << fmt(cod_base) << " s; ";
    }
    ++r.instances;
  }
  const double slope = least_squares_slope(log_nnz, log_time);
  shape << "slope " << fmt(slope);
  tally.check(scod_base <= 0.5 * cod_base, "SCOD " + fmt(scod_base) + " s vs COD " + fmt(cod_base) + " s");
  tally.check(slope <= 1.2, "time-vs-nnz slope " + fmt(slope));
  r.detail = r.violations ? r.detail + " (" + shape.str() + ")" : shape.str();
  r.passed = r.violations == 0;
  r.seconds = seconds_since(t0);
  return r;
}

SuiteResult verify_monotonicity(const VerifyOptions& options) {
  const auto t0 = Clock::now();
  SuiteResult r;
  r.name = "error-vs-sketch-size";
  r.summary = "COD error nonincreasing over m in {8,16,32,64}; SCOD median over 5 seeds likewise";
  Tally tally(r);

  SynthConfig cfg;
  cfg.n = 4000;
  cfg.dx = 300;
  cfg.dy = 300;
  cfg.rank = 80;
  cfg.decay = 0.85;
  cfg.noise = 0.05;
  cfg.density = 0.05;
  cfg.seed = options.seed;
  const SyntheticPair p = gen_synthetic_pair(cfg);
  const ProductSpectrum spec = ProductSpectrum::of(p.x, p.y);
  const double denom = spec.frob_product();

  double prev_cod = std::numeric_limits<double>::infinity();
  double prev_scod = std::numeric_limits<double>::infinity();
  std::ostringstream trace;
  for (std::size_t m : {8, 16, 32, 64}) {
    CoOccurringDirections cod(m, cfg.dx, cfg.dy);
    feed(cod, p.x, p.y);
    const double cod_rel = amm_error(p.x, p.y, cod.a(), cod.b()) / denom;

    std::vector<double> seeds;
    for (std::uint64_t s = 0; s < 5; ++s) {
      ScodSketch scod(m, cfg.dx, cfg.dy, QSchedule::fixed(5), options.seed + s);
      feed(scod, p.x, p.y);
      const ScodResult res = scod.finalize();
      seeds.push_back(amm_error(p.x, p.y, res.a, res.b) / denom);
    }
    const double scod_rel = median(seeds);
    trace << "m=" << m << ": cod " << fmt(cod_rel) << ", scod " << fmt(scod_rel) << "; ";
    tally.check(cod_rel <= prev_cod, "COD error increased at m=" + std::to_string(m));
    tally.check(scod_rel <= prev_scod, "SCOD median error increased at m=" + std::to_string(m));
    prev_cod = cod_rel;
    prev_scod = scod_rel;
    ++r.instances;
  }
  r.detail = r.violations ? r.detail + " (" + trace.str() + ")" : trace.str();
  r.passed = r.violations == 0;
  r.seconds = seconds_since(t0);
  return r;
}

SuiteResult verify_mutation_sensitivity(const VerifyOptions& options) {
  const auto t0 = Clock::now();
  SuiteResult r;
  r.name = "mutation-sensitivity";
  r.summary = "FD without shrink and COD shrinking by sigma_{m+1} are both caught on crafted streams";
  Tally tally(r);
  (void)options;

  const SparseMatrix fd_stream = to_sparse(adversarial_fd_stream());
  FrequentDirections good_fd(2, 2);
  FrequentDirections bad_fd(2, 2, FdOptions{.shrink = false});
  feed(good_fd, fd_stream);
  feed(bad_fd, fd_stream);
  tally.check(fd_bound_violation(fd_stream, 2, good_fd.finalize()).empty(),
              "correct FD flagged on the adversarial stream");
  tally.check(!fd_bound_violation(fd_stream, 2, bad_fd.finalize()).empty(),
              "FD without shrink passed the covariance bound");

  const SparseMatrix cod_stream = to_sparse(adversarial_cod_stream());
  const CodRun good_cod = run_cod(cod_stream, cod_stream, 2, {});
  const CodRun bad_cod = run_cod(cod_stream, cod_stream, 2, {.cod_delta_next = true});
  tally.check(shrink_violation(good_cod.shrink).empty(), "correct COD flagged on the crafted stream");
  tally.check(!shrink_violation(bad_cod.shrink).empty(), "COD with sigma_{m+1} passed the shrink-mass checks");
  r.instances = 2;
  if (r.detail.empty()) {
    r.detail = "FD without shrink: " + fd_bound_violation(fd_stream, 2, bad_fd.finalize()) +
               "; COD with sigma_{m+1}: " + shrink_violation(bad_cod.shrink);
  }
  r.passed = r.violations == 0;
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<SuiteResult> run_verify(const VerifyOptions& options) {
  std::vector<SuiteResult> out;
  out.push_back(verify_fd_error_bound(options));
  for (SuiteResult& s : verify_cod_bounds(options)) out.push_back(std::move(s));
  out.push_back(verify_symmetric_reduction(options));
  out.push_back(verify_subspace_power_method(options));
  for (SuiteResult& s : verify_sparse_sketch(options)) out.push_back(std::move(s));
  if (options.perf_rows > 0) out.push_back(verify_performance_shape(options));
  out.push_back(verify_monotonicity(options));
  out.push_back(verify_mutation_sensitivity(options));
  return out;
}

}  // namespace amm
