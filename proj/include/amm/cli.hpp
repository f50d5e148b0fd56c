#pragma once

#include "amm/data_io.hpp"
#include "amm/linalg.hpp"
#include "amm/oracle.hpp"
#include "amm/sparse.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace amm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitGuard = 3;

enum class Algo { fd_amm, cod, sfd_amm, scod };

std::optional<Algo> parse_algo(std::string_view name);
std::string_view algo_name(Algo algo);
/// Whether the algorithm uses the sparse engine (q, flush count and seed are meaningful).
bool is_sparse_engine(Algo algo);

/// Either a pair of Matrix Market files or a synthetic configuration.
struct InputSpec {
  std::filesystem::path x_path;
  std::filesystem::path y_path;
  std::optional<SynthConfig> synth;
};

struct LoadedPair {
  SparseMatrix x;
  SparseMatrix y;
  double load_ms = 0.0;
};

/// Reads or generates the pair. ParseError for malformed files, DimensionError if misaligned.
LoadedPair load_input(const InputSpec& input);

struct RunSpec {
  Algo algo = Algo::cod;
  std::size_t m = 8;
  std::size_t q = 5;
  std::uint64_t seed = 0;
  ErrorMode error_mode = ErrorMode::dense;
  ErrorDenominator denominator = ErrorDenominator::frob_product;
  /// Retain flush buffers so the compression accuracy can be measured (sparse engines only).
  bool diagnostics = false;

  void validate() const;
};

/// Factors and bookkeeping of one sketching run.
struct SketchOutcome {
  DenseMatrix a;
  DenseMatrix b;
  std::optional<double> delta_sum;        ///< shrink mass (co-occurring engines)
  std::optional<std::size_t> flush_count; ///< sparse engines
  std::optional<double> epsilon_hat;      ///< sparse engines with diagnostics
  double sketch_ms = 0.0;
};

/// Streams the pair once through the selected algorithm.
SketchOutcome run_sketch(const RunSpec& spec, const SparseMatrix& x, const SparseMatrix& y);

/// One CSV row: the sketch plus its bound report.
struct RunRow {
  RunSpec spec;
  std::size_t n = 0, dx = 0, dy = 0, nnz_x = 0, nnz_y = 0;
  double time_ms_total = 0.0;
  double time_ms_sketch = 0.0;
  double rel_err = 0.0;
  double abs_err = 0.0;
  double err_denominator = 0.0;
  double lemma2_rhs = 0.0;
  double theorem1_rhs_min = 0.0;
  std::optional<double> delta_sum;
  std::optional<std::size_t> flush_count;
  std::optional<double> epsilon_hat;
  std::string repeat;  ///< sweep only: repeat index or "median"
  std::string status = "ok";
};

/// Sketches the loaded pair and evaluates it with the oracle.
RunRow run_one(const RunSpec& spec, const LoadedPair& pair);

/// Column names in output order. Sweeps append "repeat" and "status".
std::vector<std::string> csv_columns(bool sweep);
std::string csv_header(bool sweep);
std::string csv_row(const RunRow& row, bool sweep);
/// Full-precision scientific notation; NaN prints as an empty field.
std::string format_real(double v);

struct SweepSpec {
  std::vector<Algo> algos;
  std::vector<std::size_t> ms;
  std::size_t repeats = 3;
  RunSpec base;
  /// Worker threads; 0 means min(hardware threads, AMM_THREADS if set).
  std::size_t threads = 0;
};

/// One row per (algo, m, repeat) followed by a median row per (algo, m) when there is more than
/// one repeat. Cells run concurrently;
/// a failing cell yields a row whose status carries the error message. Sparse engines use seed
/// base.seed + repeat.
std::vector<RunRow> run_sweep(const SweepSpec& sweep, const LoadedPair& pair);

/// Effective worker count for a sweep.
std::size_t sweep_threads(std::size_t requested);

/// Entry point of the `amm` executable: subcommands gen, run, sweep and verify.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace amm::cli
