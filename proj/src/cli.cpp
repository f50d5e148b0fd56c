#include "amm/cli.hpp"

#include "amm/baselines.hpp"
#include "amm/cod.hpp"
#include "amm/errors.hpp"
#include "amm/scod.hpp"
#include "amm/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace amm::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

constexpr std::pair<Algo, std::string_view> kAlgoNames[] = {
    {Algo::fd_amm, "fd-amm"}, {Algo::cod, "cod"}, {Algo::sfd_amm, "sfd-amm"}, {Algo::scod, "scod"}};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <typename T>
std::string opt_field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_real(*v);
  } else {
    return std::to_string(*v);
  }
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

template <typename T, typename Get>
std::optional<T> median_field(const std::vector<const RunRow*>& rows, Get get) {
  std::vector<double> vals;
  for (const RunRow* r : rows) {
    if (const auto v = get(*r)) vals.push_back(static_cast<double>(*v));
  }
  if (vals.empty()) return std::nullopt;
  const double med = median_of(std::move(vals));
  if constexpr (std::is_integral_v<T>) {
    return static_cast<T>(std::llround(med));
  } else {
    return med;
  }
}

RunRow median_row(const std::vector<const RunRow*>& rows, const RunSpec& spec) {
  std::vector<const RunRow*> ok;
  for (const RunRow* r : rows) {
    if (r->status == "ok") ok.push_back(r);
  }
  RunRow m;
  m.spec = spec;
  m.repeat = "median";
  if (ok.empty()) {
    m.status = "error: all repeats failed";
    return m;
  }
  const RunRow& first = *ok.front();
  m.n = first.n;
  m.dx = first.dx;
  m.dy = first.dy;
  m.nnz_x = first.nnz_x;
  m.nnz_y = first.nnz_y;
  const auto med = [&](auto member) {
    return *median_field<double>(ok, [&](const RunRow& r) { return std::optional<double>(r.*member); });
  };
  m.time_ms_total = med(&RunRow::time_ms_total);
  m.time_ms_sketch = med(&RunRow::time_ms_sketch);
  m.rel_err = med(&RunRow::rel_err);
  m.abs_err = med(&RunRow::abs_err);
  m.err_denominator = med(&RunRow::err_denominator);
  m.lemma2_rhs = med(&RunRow::lemma2_rhs);
  m.theorem1_rhs_min = med(&RunRow::theorem1_rhs_min);
  m.delta_sum = median_field<double>(ok, [](const RunRow& r) { return r.delta_sum; });
  m.flush_count = median_field<std::size_t>(ok, [](const RunRow& r) { return r.flush_count; });
  m.epsilon_hat = median_field<double>(ok, [](const RunRow& r) { return r.epsilon_hat; });
  return m;
}

void refuse_dense_beyond_guard(const RunSpec& spec, std::size_t dx, std::size_t dy) {
  if (spec.error_mode == ErrorMode::dense &&
      static_cast<double>(dx) * static_cast<double>(dy) > kDenseGuardEntries) {
    throw GuardError("dense error mode refused: " + std::to_string(dx) + "x" + std::to_string(dy) +
                     " product exceeds the dense-oracle guard; pass --error-mode implicit");
  }
}

// ---------------------------------------------------------------------------
// Command-line plumbing

struct InputFlags {
  std::string x, y, synth_file;
  SynthConfig inline_cfg;
  std::vector<CLI::Option*> inline_opts;
};

void add_synth_flags(CLI::App* cmd, SynthConfig& cfg, std::vector<CLI::Option*>* track) {
  const auto add = [&](CLI::Option* o) {
    if (track) track->push_back(o);
  };
  add(cmd->add_option("--n", cfg.n, "rows")->check(CLI::PositiveNumber));
  add(cmd->add_option("--dx", cfg.dx, "columns of X")->check(CLI::PositiveNumber));
  add(cmd->add_option("--dy", cfg.dy, "columns of Y")->check(CLI::PositiveNumber));
  add(cmd->add_option("--rank", cfg.rank, "latent rank")->check(CLI::PositiveNumber));
  add(cmd->add_option("--decay", cfg.decay, "geometric decay of the latent spectrum, in (0, 1]"));
  add(cmd->add_option("--noise", cfg.noise, "standard deviation of additive noise"));
  add(cmd->add_option("--density", cfg.density, "probability of keeping an entry, in (0, 1]"));
  add(cmd->add_option("--seed", cfg.seed, "generator seed"));
}

void add_input_flags(CLI::App* cmd, InputFlags& in) {
  cmd->add_option("--x", in.x, "Matrix Market file for X");
  cmd->add_option("--y", in.y, "Matrix Market file for Y");
  cmd->add_option("--synth", in.synth_file, "synthetic configuration (key=value lines)");
  SynthConfig& cfg = in.inline_cfg;
  auto track = &in.inline_opts;
  track->push_back(cmd->add_option("--n", cfg.n, "synthetic rows")->check(CLI::PositiveNumber));
  track->push_back(cmd->add_option("--dx", cfg.dx, "synthetic columns of X")->check(CLI::PositiveNumber));
  track->push_back(cmd->add_option("--dy", cfg.dy, "synthetic columns of Y")->check(CLI::PositiveNumber));
  track->push_back(cmd->add_option("--rank", cfg.rank, "synthetic latent rank")->check(CLI::PositiveNumber));
  track->push_back(cmd->add_option("--decay", cfg.decay, "synthetic spectral decay"));
  track->push_back(cmd->add_option("--noise", cfg.noise, "synthetic noise level"));
  track->push_back(cmd->add_option("--density", cfg.density, "synthetic density"));
  track->push_back(cmd->add_option("--data-seed", cfg.seed, "synthetic generator seed"));
}

InputSpec resolve_input(const InputFlags& in) {
  const bool files = !in.x.empty() || !in.y.empty();
  const bool inline_synth =
      std::any_of(in.inline_opts.begin(), in.inline_opts.end(), [](CLI::Option* o) { return o->count() > 0; });
  const int sources = int(files) + int(!in.synth_file.empty()) + int(inline_synth);
  if (sources != 1) {
    throw ParameterError("give exactly one input: --x/--y files, --synth FILE, or inline synthetic flags");
  }
  InputSpec spec;
  if (files) {
    if (in.x.empty() || in.y.empty()) throw ParameterError("--x and --y must be given together");
    spec.x_path = in.x;
    spec.y_path = in.y;
  } else if (!in.synth_file.empty()) {
    std::ifstream f(in.synth_file);
    if (!f) throw ParameterError("cannot open synthetic configuration " + in.synth_file);
    spec.synth = parse_synth_config(f);
  } else {
    in.inline_cfg.validate();
    spec.synth = in.inline_cfg;
  }
  return spec;
}

struct SketchFlags {
  std::size_t q = 5;
  std::uint64_t seed = 0;
  std::string error_mode = "dense";
  std::string denominator = "frob";
  bool diagnostics = false;
};

void add_sketch_flags(CLI::App* cmd, SketchFlags& f) {
  cmd->add_option("--q", f.q, "power iterations per flush (sparse engines)")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "sketch seed (sparse engines)");
  cmd->add_option("--error-mode", f.error_mode, "dense or implicit")
      ->check(CLI::IsMember({"dense", "implicit"}));
  cmd->add_option("--denominator", f.denominator, "relative error scale: frob or spectral")
      ->check(CLI::IsMember({"frob", "spectral"}));
  cmd->add_flag("--diagnostics", f.diagnostics, "measure the compression accuracy of every flush");
}

RunSpec make_spec(Algo algo, std::size_t m, const SketchFlags& f) {
  RunSpec s;
  s.algo = algo;
  s.m = m;
  s.q = f.q;
  s.seed = f.seed;
  s.error_mode = f.error_mode == "implicit" ? ErrorMode::implicit : ErrorMode::dense;
  s.denominator = f.denominator == "spectral" ? ErrorDenominator::exact_spectral : ErrorDenominator::frob_product;
  s.diagnostics = f.diagnostics;
  s.validate();
  return s;
}

Algo algo_or_throw(const std::string& name) {
  const auto a = parse_algo(name);
  if (!a) throw ParameterError("unknown algorithm '" + name + "' (fd-amm, cod, sfd-amm, scod)");
  return *a;
}

int cmd_gen(const SynthConfig& cfg, const std::string& out_dir, std::ostream& out) {
  cfg.validate();
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  const SyntheticPair p = gen_synthetic_pair(cfg);
  write_matrix_market(dir / "X.mtx", p.x);
  write_matrix_market(dir / "Y.mtx", p.y);

  const auto density = [](const SparseMatrix& m) {
    return static_cast<double>(m.nnz()) / (static_cast<double>(m.rows()) * static_cast<double>(m.cols()));
  };
  nlohmann::json manifest = {
      {"generator", "amm gen"},
      {"files", {{"x", "X.mtx"}, {"y", "Y.mtx"}}},
      {"config",
       {{"n", cfg.n},
        {"dx", cfg.dx},
        {"dy", cfg.dy},
        {"rank", cfg.rank},
        {"decay", cfg.decay},
        {"noise", cfg.noise},
        {"density", cfg.density},
        {"seed", cfg.seed}}},
      {"nnz_x", p.x.nnz()},
      {"nnz_y", p.y.nnz()},
      {"density_x", density(p.x)},
      {"density_y", density(p.y)},
  };
  std::ofstream mf(dir / "manifest.json");
  if (!mf) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  mf << manifest.dump(2) << '\n';
  out << "wrote " << (dir / "X.mtx").string() << ", " << (dir / "Y.mtx").string() << ", "
      << (dir / "manifest.json").string() << '\n';
  return kExitOk;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out) {
  const std::vector<SuiteResult> results = run_verify(options);
  std::size_t passed = 0;
  for (const SuiteResult& r : results) {
    char line[256];
    std::snprintf(line, sizeof line, "%s %-22s %6zu/%-6zu checks  %5zu instances  %7.2f s",
                  r.passed ? "PASS" : "FAIL", r.name.c_str(), r.checks - r.violations, r.checks,
                  r.instances, r.seconds);
    out << line << '\n' << "     " << r.summary << '\n';
    if (!r.detail.empty()) out << "     " << r.detail << '\n';
    passed += r.passed ? 1 : 0;
  }
  out << passed << "/" << results.size() << " suites passed\n";
  return passed == results.size() ? kExitOk : kExitVerifyFailed;
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<Algo> parse_algo(std::string_view name) {
  for (const auto& [algo, n] : kAlgoNames) {
    if (n == name) return algo;
  }
  return std::nullopt;
}

std::string_view algo_name(Algo algo) {
  for (const auto& [a, n] : kAlgoNames) {
    if (a == algo) return n;
  }
  return "?";
}

bool is_sparse_engine(Algo algo) { return algo == Algo::scod || algo == Algo::sfd_amm; }

void RunSpec::validate() const {
  if (m == 0) throw ParameterError("m must be >= 1");
  if (q == 0) throw ParameterError("q must be >= 1");
}

LoadedPair load_input(const InputSpec& input) {
  const auto t0 = Clock::now();
  LoadedPair p;
  if (input.synth) {
    SyntheticPair s = gen_synthetic_pair(*input.synth);
    p.x = std::move(s.x);
    p.y = std::move(s.y);
  } else {
    p.x = read_matrix_market(input.x_path).matrix;
    p.y = read_matrix_market(input.y_path).matrix;
  }
  if (p.x.rows() != p.y.rows()) {
    throw DimensionError("X has " + std::to_string(p.x.rows()) + " rows but Y has " +
                         std::to_string(p.y.rows()) + "; rows must be aligned");
  }
  p.load_ms = ms_since(t0);
  return p;
}

SketchOutcome run_sketch(const RunSpec& spec, const SparseMatrix& x, const SparseMatrix& y) {
  spec.validate();
  if (x.rows() != y.rows()) throw DimensionError("run: X and Y row counts differ");
  const std::size_t dx = x.cols(), dy = y.cols(), n = x.rows();
  const FlushDiagnostics diag = spec.diagnostics ? FlushDiagnostics::retain : FlushDiagnostics::none;
  SketchOutcome o;
  const auto t0 = Clock::now();
  switch (spec.algo) {
    case Algo::fd_amm: {
      FdAmm s(spec.m, dx, dy);
      for (std::size_t t = 0; t < n; ++t) s.update(x.row(t), y.row(t));
      SplitFactors f = s.finalize();
      o.sketch_ms = ms_since(t0);
      o.a = std::move(f.a);
      o.b = std::move(f.b);
      break;
    }
    case Algo::cod: {
      CoOccurringDirections s(spec.m, dx, dy);
      for (std::size_t t = 0; t < n; ++t) s.update(x.row(t), y.row(t));
      o.sketch_ms = ms_since(t0);
      o.a = s.a();
      o.b = s.b();
      o.delta_sum = s.delta_sum();
      break;
    }
    case Algo::scod: {
      ScodSketch s(spec.m, dx, dy, QSchedule::fixed(spec.q), spec.seed, diag);
      for (std::size_t t = 0; t < n; ++t) s.update(x.row(t), y.row(t));
      ScodResult r = s.finalize();
      o.sketch_ms = ms_since(t0);
      o.a = std::move(r.a);
      o.b = std::move(r.b);
      o.delta_sum = r.delta_sum;
      o.flush_count = r.flush_count;
      if (spec.diagnostics && r.flush_count > 0) o.epsilon_hat = measure_epsilon_hat(s.flush_log(), spec.m);
      break;
    }
    case Algo::sfd_amm: {
      SfdAmm s(spec.m, dx, dy, QSchedule::fixed(spec.q), spec.seed, diag);
      for (std::size_t t = 0; t < n; ++t) s.update(x.row(t), y.row(t));
      SplitFactors f = s.finalize();
      o.sketch_ms = ms_since(t0);
      o.a = std::move(f.a);
      o.b = std::move(f.b);
      o.delta_sum = s.inner().delta_sum();
      o.flush_count = s.inner().flush_count();
      if (spec.diagnostics && s.inner().flush_count() > 0) {
        o.epsilon_hat = measure_epsilon_hat(s.inner().flush_log(), spec.m);
      }
      break;
    }
  }
  return o;
}

RunRow run_one(const RunSpec& spec, const LoadedPair& pair) {
  spec.validate();
  refuse_dense_beyond_guard(spec, pair.x.cols(), pair.y.cols());
  RunRow row;
  row.spec = spec;
  row.n = pair.x.rows();
  row.dx = pair.x.cols();
  row.dy = pair.y.cols();
  row.nnz_x = pair.x.nnz();
  row.nnz_y = pair.y.nnz();

  const SketchOutcome o = run_sketch(spec, pair.x, pair.y);
  const auto t0 = Clock::now();
  ReportOptions opts;
  opts.mode = spec.error_mode;
  opts.denominator = spec.denominator;
  const BoundReport r = evaluate_bounds(pair.x, pair.y, o.a, o.b, spec.m, o.delta_sum.value_or(0.0), opts);
  const double eval_ms = ms_since(t0);

  row.time_ms_sketch = o.sketch_ms;
  row.time_ms_total = pair.load_ms + o.sketch_ms + eval_ms;
  row.rel_err = r.relative_error;
  row.abs_err = r.exact_spectral_error;
  row.err_denominator = r.denominator;
  row.lemma2_rhs = r.lemma2_rhs;
  row.theorem1_rhs_min = r.theorem1_rhs_min;
  row.delta_sum = o.delta_sum;
  row.flush_count = o.flush_count;
  row.epsilon_hat = o.epsilon_hat;
  return row;
}

std::vector<std::string> csv_columns(bool sweep) {
  std::vector<std::string> c = {"algo",     "m",          "q",           "n",
                                "dx",       "dy",         "nnz_x",       "nnz_y",
                                "time_ms_total", "time_ms_sketch", "rel_err", "abs_err",
                                "err_denominator", "lemma2_rhs", "theorem1_rhs_min", "delta_sum",
                                "flush_count", "epsilon_hat", "seed"};
  if (sweep) {
    c.push_back("repeat");
    c.push_back("status");
  }
  return c;
}

std::string csv_header(bool sweep) {
  std::string out;
  for (const std::string& c : csv_columns(sweep)) out += (out.empty() ? "" : ",") + c;
  return out;
}

std::string format_real(double v) {
  if (std::isnan(v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string csv_row(const RunRow& r, bool sweep) {
  const bool sparse = is_sparse_engine(r.spec.algo);
  const bool failed = r.status != "ok";
  std::vector<std::string> f;
  f.emplace_back(algo_name(r.spec.algo));
  f.push_back(std::to_string(r.spec.m));
  f.push_back(sparse ? std::to_string(r.spec.q) : "");
  if (failed) {
    f.resize(18);
  } else {
    for (std::size_t v : {r.n, r.dx, r.dy, r.nnz_x, r.nnz_y}) f.push_back(std::to_string(v));
    for (double v : {r.time_ms_total, r.time_ms_sketch, r.rel_err, r.abs_err, r.err_denominator, r.lemma2_rhs,
                     r.theorem1_rhs_min}) {
      f.push_back(format_real(v));
    }
    f.push_back(opt_field(r.delta_sum));
    f.push_back(opt_field(r.flush_count));
    f.push_back(opt_field(r.epsilon_hat));
  }
  f.push_back(std::to_string(r.spec.seed));
  if (sweep) {
    f.push_back(r.repeat);
    f.push_back(csv_escape(r.status));
  }
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
  return out;
}

std::size_t sweep_threads(std::size_t requested) {
  std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("AMM_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<std::size_t>(n, cap);
  }
  return std::max<std::size_t>(n, 1);
}

std::vector<RunRow> run_sweep(const SweepSpec& sweep, const LoadedPair& pair) {
  if (sweep.algos.empty() || sweep.ms.empty()) throw ParameterError("sweep: empty grid");
  if (sweep.repeats == 0) throw ParameterError("sweep: repeats must be >= 1");
  sweep.base.validate();
  refuse_dense_beyond_guard(sweep.base, pair.x.cols(), pair.y.cols());

  struct Cell {
    RunSpec spec;
    std::size_t repeat;
  };
  std::vector<Cell> cells;
  for (Algo algo : sweep.algos) {
    for (std::size_t m : sweep.ms) {
      for (std::size_t rep = 0; rep < sweep.repeats; ++rep) {
        RunSpec s = sweep.base;
        s.algo = algo;
        s.m = m;
        if (is_sparse_engine(algo)) s.seed = sweep.base.seed + rep;
        cells.push_back({s, rep});
      }
    }
  }

  std::vector<RunRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        rows[i] = run_one(cells[i].spec, pair);
      } catch (const std::exception& e) {
        rows[i] = RunRow{};
        rows[i].spec = cells[i].spec;
        rows[i].status = std::string("error: ") + e.what();
      }
      rows[i].repeat = std::to_string(cells[i].repeat);
    }
  };
  const std::size_t threads = std::min(sweep_threads(sweep.threads), cells.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::vector<RunRow> out;
  for (std::size_t i = 0; i < cells.size(); i += sweep.repeats) {
    std::vector<const RunRow*> group;
    for (std::size_t r = 0; r < sweep.repeats; ++r) {
      out.push_back(rows[i + r]);
      group.push_back(&rows[i + r]);
    }
    if (sweep.repeats == 1) continue;  // a single repeat is its own median
    RunSpec median_spec = cells[i].spec;
    median_spec.seed = sweep.base.seed;
    out.push_back(median_row(group, median_spec));
  }
  return out;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming approximate matrix multiplication: sketches, bounds and experiments"};
  app.name("amm");
  app.require_subcommand(1);

  // gen
  CLI::App* gen = app.add_subcommand("gen", "write a synthetic correlated pair as Matrix Market files");
  SynthConfig gen_cfg;
  std::string gen_out = ".";
  add_synth_flags(gen, gen_cfg, nullptr);
  gen->add_option("--out", gen_out, "output directory");

  // run
  CLI::App* run = app.add_subcommand("run", "sketch one input and print one CSV row");
  std::string run_algo;
  std::size_t run_m = 0;
  InputFlags run_in;
  SketchFlags run_flags;
  run->add_option("--algo", run_algo, "fd-amm, cod, sfd-amm or scod")->required();
  run->add_option("--m", run_m, "sketch size")->required();
  add_input_flags(run, run_in);
  add_sketch_flags(run, run_flags);

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "grid of algorithms x sketch sizes x repeats as CSV");
  std::vector<std::string> sweep_algos{"fd-amm", "cod", "sfd-amm", "scod"};
  std::vector<std::size_t> sweep_ms;
  std::size_t sweep_repeats = 3;
  std::size_t sweep_thread_count = 0;
  InputFlags sweep_in;
  SketchFlags sweep_flags;
  sweep->add_option("--algos", sweep_algos, "algorithms (comma separated)")->delimiter(',');
  sweep->add_option("--m", sweep_ms, "sketch sizes (comma separated)")->delimiter(',')->required();
  sweep->add_option("--repeats", sweep_repeats, "repeats per cell")->check(CLI::PositiveNumber);
  sweep->add_option("--threads", sweep_thread_count, "worker threads (capped by AMM_THREADS)");
  add_input_flags(sweep, sweep_in);
  add_sketch_flags(sweep, sweep_flags);

  // verify
  CLI::App* verify = app.add_subcommand("verify", "run the property suites and report pass counts");
  VerifyOptions vopts;
  bool quick = false;
  std::vector<std::string> inject;
  verify->add_option("--scale", vopts.scale, "multiplier on instance counts")->check(CLI::PositiveNumber);
  verify->add_option("--perf-rows", vopts.perf_rows, "rows of the timing instance (0 skips timing)");
  verify->add_option("--seed", vopts.seed, "suite seed");
  verify->add_flag("--quick", quick, "fifth of the instances and a 10000-row timing instance");
  verify->add_option("--inject", inject, "deliberate defect: fd-no-shrink, cod-delta-next")
      ->check(CLI::IsMember({"fd-no-shrink", "cod-delta-next"}))
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(gen_cfg, gen_out, out);

    if (*run) {
      const RunSpec spec = make_spec(algo_or_throw(run_algo), run_m, run_flags);
      const InputSpec input = resolve_input(run_in);
      refuse_dense_beyond_guard(spec, 0, 0);
      const LoadedPair pair = load_input(input);
      const RunRow row = run_one(spec, pair);
      out << csv_header(false) << '\n' << csv_row(row, false) << '\n';
      return kExitOk;
    }

    if (*sweep) {
      SweepSpec s;
      for (const std::string& a : sweep_algos) s.algos.push_back(algo_or_throw(a));
      s.ms = sweep_ms;
      s.repeats = sweep_repeats;
      s.threads = sweep_thread_count;
      s.base = make_spec(Algo::cod, 1, sweep_flags);
      for (std::size_t m : s.ms) {
        if (m == 0) throw ParameterError("m must be >= 1");
      }
      const LoadedPair pair = load_input(resolve_input(sweep_in));
      const std::vector<RunRow> rows = run_sweep(s, pair);
      out << csv_header(true) << '\n';
      for (const RunRow& r : rows) out << csv_row(r, true) << '\n';
      return kExitOk;
    }

    if (*verify) {
      if (quick) {
        vopts.scale *= 0.2;
        if (verify->count("--perf-rows") == 0) vopts.perf_rows = 10000;
      }
      for (const std::string& i : inject) {
        if (i == "fd-no-shrink") vopts.mutations.fd_no_shrink = true;
        if (i == "cod-delta-next") vopts.mutations.cod_delta_next = true;
      }
      return cmd_verify(vopts, out);
    }
  } catch (const GuardError& e) {
    err << "amm: " << e.what() << '\n';
    return kExitGuard;
  } catch (const ParseError& e) {
    err << "amm: parse error at line " << e.line() << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "amm: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace amm::cli
