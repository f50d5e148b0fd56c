#pragma once

#include "amm/sparse.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace amm {

// ---------------------------------------------------------------------------
// Matrix Market (coordinate real general, 1-indexed)

struct MatrixMarketHeader {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t entries = 0;  ///< as declared on the size line
};

struct MatrixMarketData {
  SparseMatrix matrix;
  std::size_t explicit_zeros = 0;  ///< entries dropped because their value was 0
};

/// Parses a coordinate real general file. Duplicate coordinates, out-of-range indices,
/// non-real fields and short files raise ParseError with the offending line number.
MatrixMarketData parse_matrix_market(std::istream& in);
MatrixMarketData read_matrix_market(const std::filesystem::path& path);

/// Reads only the banner and size line.
MatrixMarketHeader read_matrix_market_header(const std::filesystem::path& path);

void write_matrix_market(std::ostream& out, const SparseMatrix& m);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m);

// ---------------------------------------------------------------------------
// Corpus metadata

/// One side of a parallel corpus as characterized by its row count, vocabulary and density.
struct CorpusSide {
  std::string_view dataset;
  std::string_view language;
  double n;
  double d;
  double density;
};

/// Size and density of the public cross-language corpora used for the headline experiments.
std::span<const CorpusSide> reference_corpora();
std::optional<CorpusSide> find_corpus(std::string_view dataset, std::string_view language);

struct MetadataCheck {
  bool rows_match = false;
  bool cols_match = false;
  bool density_match = false;
  double density = 0.0;

  bool ok() const { return rows_match && cols_match && density_match; }
};

/// Dimensions must agree with the table to its three significant digits; density within
/// density_tol relative.
MetadataCheck check_corpus_metadata(std::size_t rows, std::size_t cols, std::size_t nnz,
                                    const CorpusSide& expected, double density_tol = 0.10);

// ---------------------------------------------------------------------------
// Aligned row-pair streams

struct RowPair {
  SparseRowView x;
  SparseRowView y;
};

/// Single-pass stream over aligned rows of X and Y. Once consumed it stays exhausted.
class PairStream {
 public:
  PairStream(std::shared_ptr<const SparseMatrix> x, std::shared_ptr<const SparseMatrix> y);

  std::optional<RowPair> next();

  std::size_t n() const { return x_->rows(); }
  std::size_t dx() const { return x_->cols(); }
  std::size_t dy() const { return y_->cols(); }
  std::size_t remaining() const { return n() - pos_; }

 private:
  std::shared_ptr<const SparseMatrix> x_;
  std::shared_ptr<const SparseMatrix> y_;
  std::size_t pos_ = 0;
};

/// Throws DimensionError when the row counts differ.
PairStream zip_pair(SparseMatrix x, SparseMatrix y);

// ---------------------------------------------------------------------------
// Synthetic correlated low-rank pairs

struct SynthConfig {
  std::size_t n = 1000;
  std::size_t dx = 100;
  std::size_t dy = 100;
  std::size_t rank = 10;
  double decay = 0.8;
  double noise = 0.0;
  double density = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// key=value lines (n, dx, dy, rank, decay, noise, density, seed); '#' starts a comment.
SynthConfig parse_synth_config(std::istream& in);
std::string format_synth_config(const SynthConfig& cfg);

struct SyntheticPair {
  SparseMatrix x;
  SparseMatrix y;
};

/// X = H diag(s) P_x^T + noise N_x and Y = H diag(s) P_y^T + noise N_y with shared Gaussian
/// latent rows H (n x r), s_i = decay^(i-1) and random orthonormal P_x, P_y. Each entry is then
/// kept with probability density and divided by it. Deterministic in cfg.seed.
SyntheticPair gen_synthetic_pair(const SynthConfig& cfg);

PairStream stream_of(const SyntheticPair& pair);

}  // namespace amm
