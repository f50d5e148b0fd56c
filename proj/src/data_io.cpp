#include "amm/data_io.hpp"

#include "amm/errors.hpp"
#include "amm/linalg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <type_traits>

namespace amm {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

MatrixMarketHeader parse_header(std::istream& in, std::size_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market input", 1);
  line_no = 1;
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner", line_no);
  if (lower(object) != "matrix" || lower(format) != "coordinate") {
    throw ParseError("only 'matrix coordinate' files are supported", line_no);
  }
  if (lower(field) != "real") throw ParseError("field '" + field + "' is not real", line_no);
  if (lower(symmetry) != "general") throw ParseError("symmetry '" + symmetry + "' is not general", line_no);

  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line) || line[0] == '%') continue;
    std::istringstream sz(line);
    long long rows = -1, cols = -1, entries = -1;
    std::string extra;
    if (!(sz >> rows >> cols >> entries) || (sz >> extra) || rows < 0 || cols < 0 || entries < 0) {
      throw ParseError("malformed size line '" + line + "'", line_no);
    }
    return {static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), static_cast<std::size_t>(entries)};
  }
  throw ParseError("missing size line", line_no + 1);
}

}  // namespace

MatrixMarketData parse_matrix_market(std::istream& in) {
  std::size_t line_no = 0;
  const MatrixMarketHeader header = parse_header(in, line_no);

  struct Entry {
    SparseMatrix::Triplet t;
    std::size_t line;
  };
  std::vector<Entry> entries;
  entries.reserve(header.entries);
  std::string line;
  while (entries.size() < header.entries && std::getline(in, line)) {
    ++line_no;
    if (blank(line) || line[0] == '%') continue;
    std::istringstream ls(line);
    long long i = 0, j = 0;
    std::string value_text, extra;
    if (!(ls >> i >> j >> value_text) || (ls >> extra)) {
      throw ParseError("expected 'row col value', got '" + line + "'", line_no);
    }
    double value = 0.0;
    const char* first = value_text.data();
    const char* last = first + value_text.size();
    if (value_text.size() > 1 && value_text[0] == '+') ++first;  // from_chars rejects a leading '+'
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      throw ParseError("value '" + value_text + "' is not a finite real", line_no);
    }
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > header.rows ||
        static_cast<std::size_t>(j) > header.cols) {
      throw ParseError("index (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range", line_no);
    }
    entries.push_back({{static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), value}, line_no});
  }
  if (entries.size() < header.entries) {
    throw ParseError("expected " + std::to_string(header.entries) + " entries, found " +
                         std::to_string(entries.size()),
                     line_no);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line) && line[0] != '%') throw ParseError("data after the declared entries", line_no);
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.t.row != b.t.row ? a.t.row < b.t.row : a.t.col < b.t.col;
  });
  MatrixMarketData out;
  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k > 0 && entries[k - 1].t.row == entries[k].t.row && entries[k - 1].t.col == entries[k].t.col) {
      throw ParseError("duplicate entry (" + std::to_string(entries[k].t.row + 1) + ", " +
                           std::to_string(entries[k].t.col + 1) + ")",
                       std::max(entries[k - 1].line, entries[k].line));
    }
    if (entries[k].t.value == 0.0) {
      ++out.explicit_zeros;
      continue;
    }
    triplets.push_back(entries[k].t);
  }
  out.matrix = SparseMatrix::from_triplets(header.rows, header.cols, std::move(triplets));
  return out;
}

MatrixMarketData read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_matrix_market(in);
}

MatrixMarketHeader read_matrix_market_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::size_t line_no = 0;
  return parse_header(in, line_no);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  std::array<char, 32> buf{};
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const SparseRowView r = m.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), r.values[k]);
      out << (i + 1) << ' ' << (r.indices[k] + 1) << ' ' << std::string_view(buf.data(), res.ptr - buf.data())
          << '\n';
    }
  }
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_matrix_market(out, m);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::span<const CorpusSide> reference_corpora() {
  static constexpr std::array<CorpusSide, 16> kTable{{
      {"APR", "EN", 2.32e4, 2.80e4, 6.31e-4},  {"APR", "FR", 2.32e4, 4.28e4, 4.53e-4},
      {"PAN", "EN", 8.90e4, 5.12e4, 4.38e-4},  {"PAN", "FR", 8.90e4, 9.96e4, 2.43e-4},
      {"JRC-EN-FR", "EN", 1.50e5, 1.72e5, 1.65e-4}, {"JRC-EN-FR", "FR", 1.50e5, 1.87e5, 1.64e-4},
      {"JRC-EN-ES", "EN", 1.50e5, 1.72e5, 1.65e-4}, {"JRC-EN-ES", "ES", 1.50e5, 1.92e5, 1.60e-4},
      {"JRC-FR-ES", "FR", 1.50e5, 1.87e5, 1.64e-4}, {"JRC-FR-ES", "ES", 1.50e5, 1.92e5, 1.60e-4},
      {"EURO-EN-FR", "EN", 4.76e5, 7.25e4, 3.46e-4}, {"EURO-EN-FR", "FR", 4.76e5, 8.77e4, 3.65e-4},
      {"EURO-EN-ES", "EN", 4.76e5, 7.25e4, 3.46e-4}, {"EURO-EN-ES", "ES", 4.76e5, 8.80e4, 3.47e-4},
      {"EURO-FR-ES", "FR", 4.76e5, 8.77e4, 3.65e-4}, {"EURO-FR-ES", "ES", 4.76e5, 8.80e4, 3.47e-4},
  }};
  return kTable;
}

std::optional<CorpusSide> find_corpus(std::string_view dataset, std::string_view language) {
  for (const CorpusSide& c : reference_corpora()) {
    if (c.dataset == dataset && c.language == language) return c;
  }
  return std::nullopt;
}

MetadataCheck check_corpus_metadata(std::size_t rows, std::size_t cols, std::size_t nnz,
                                    const CorpusSide& expected, double density_tol) {
  // Three significant digits: the table value is within half a unit in the last place.
  const auto matches = [](double actual, double table) {
    const double ulp = std::pow(10.0, std::floor(std::log10(table)) - 2.0);
    return std::abs(actual - table) <= 0.5 * ulp;
  };
  MetadataCheck c;
  c.rows_match = matches(static_cast<double>(rows), expected.n);
  c.cols_match = matches(static_cast<double>(cols), expected.d);
  c.density = rows && cols ? static_cast<double>(nnz) / (static_cast<double>(rows) * static_cast<double>(cols)) : 0.0;
  c.density_match = std::abs(c.density - expected.density) <= density_tol * expected.density;
  return c;
}

PairStream::PairStream(std::shared_ptr<const SparseMatrix> x, std::shared_ptr<const SparseMatrix> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_->rows() != y_->rows()) {
    throw DimensionError("pair stream: X has " + std::to_string(x_->rows()) + " rows, Y has " +
                         std::to_string(y_->rows()) + "; rows must be aligned");
  }
}

std::optional<RowPair> PairStream::next() {
  if (pos_ >= n()) return std::nullopt;
  const std::size_t t = pos_++;
  return RowPair{x_->row(t), y_->row(t)};
}

PairStream zip_pair(SparseMatrix x, SparseMatrix y) {
  return PairStream(std::make_shared<const SparseMatrix>(std::move(x)),
                    std::make_shared<const SparseMatrix>(std::move(y)));
}

void SynthConfig::validate() const {
  if (n == 0 || dx == 0 || dy == 0) throw ParameterError("synthetic: n, dx, dy must be >= 1");
  if (rank == 0 || rank > std::min(dx, dy)) throw ParameterError("synthetic: need 1 <= rank <= min(dx, dy)");
  if (!(decay > 0.0 && decay <= 1.0)) throw ParameterError("synthetic: decay must be in (0, 1]");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ParameterError("synthetic: noise must be >= 0");
  if (!(density > 0.0 && density <= 1.0)) throw ParameterError("synthetic: density must be in (0, 1]");
}

SynthConfig parse_synth_config(std::istream& in) {
  SynthConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (blank(line)) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::istringstream vs(value);
    bool ok = false;
    auto read = [&](auto& field) {
      // istream wraps negative input for unsigned fields instead of failing.
      if constexpr (std::is_unsigned_v<std::remove_reference_t<decltype(field)>>) {
        if (value.find('-') != std::string::npos) return;
      }
      ok = static_cast<bool>(vs >> field) && (vs >> std::ws).eof();
    };
    if (key == "n") read(cfg.n);
    else if (key == "dx") read(cfg.dx);
    else if (key == "dy") read(cfg.dy);
    else if (key == "rank") read(cfg.rank);
    else if (key == "decay") read(cfg.decay);
    else if (key == "noise") read(cfg.noise);
    else if (key == "density") read(cfg.density);
    else if (key == "seed") read(cfg.seed);
    else throw ParseError("unknown key '" + key + "'", line_no);
    if (!ok) throw ParseError("bad value for '" + key + "'", line_no);
  }
  cfg.validate();
  return cfg;
}

std::string format_synth_config(const SynthConfig& cfg) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "n=" << cfg.n << "\ndx=" << cfg.dx << "\ndy=" << cfg.dy << "\nrank=" << cfg.rank
      << "\ndecay=" << cfg.decay << "\nnoise=" << cfg.noise << "\ndensity=" << cfg.density
      << "\nseed=" << cfg.seed << "\n";
  return out.str();
}

namespace {

DenseMatrix random_orthonormal(std::size_t d, std::size_t r, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix g(static_cast<Index>(d), static_cast<Index>(r));
  for (Index j = 0; j < g.cols(); ++j)
    for (Index i = 0; i < g.rows(); ++i) g(i, j) = normal(rng);
  return thin_qr(g).q;
}

// Keeps each entry with probability `density`, visiting only the kept positions.
template <typename Value>
void emit_sparse_row(std::size_t d, double density, std::mt19937_64& rng, Value value,
                     std::vector<SparseMatrix::Triplet>& out, std::size_t row) {
  if (density >= 1.0) {
    for (std::size_t j = 0; j < d; ++j) out.push_back({row, j, value(j)});
    return;
  }
  std::geometric_distribution<std::size_t> skip(density);
  for (std::size_t j = skip(rng); j < d; j += 1 + skip(rng)) out.push_back({row, j, value(j) / density});
}

}  // namespace

SyntheticPair gen_synthetic_pair(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;

  const DenseMatrix px = random_orthonormal(cfg.dx, cfg.rank, rng);
  const DenseMatrix py = random_orthonormal(cfg.dy, cfg.rank, rng);
  Vector spectrum(static_cast<Index>(cfg.rank));
  for (Index i = 0; i < spectrum.size(); ++i) spectrum(i) = std::pow(cfg.decay, static_cast<double>(i));

  std::vector<SparseMatrix::Triplet> tx, ty;
  const double expected = cfg.density * static_cast<double>(cfg.n);
  tx.reserve(static_cast<std::size_t>(expected * static_cast<double>(cfg.dx) * 1.05) + 16);
  ty.reserve(static_cast<std::size_t>(expected * static_cast<double>(cfg.dy) * 1.05) + 16);

  Vector h(static_cast<Index>(cfg.rank));
  for (std::size_t t = 0; t < cfg.n; ++t) {
    for (Index i = 0; i < h.size(); ++i) h(i) = normal(rng) * spectrum(i);
    const auto x_value = [&](std::size_t j) {
      return px.row(static_cast<Index>(j)).dot(h) + cfg.noise * normal(rng);
    };
    const auto y_value = [&](std::size_t j) {
      return py.row(static_cast<Index>(j)).dot(h) + cfg.noise * normal(rng);
    };
    emit_sparse_row(cfg.dx, cfg.density, rng, x_value, tx, t);
    emit_sparse_row(cfg.dy, cfg.density, rng, y_value, ty, t);
  }
  return {SparseMatrix::from_triplets(cfg.n, cfg.dx, std::move(tx)),
          SparseMatrix::from_triplets(cfg.n, cfg.dy, std::move(ty))};
}

PairStream stream_of(const SyntheticPair& pair) {
  return PairStream(std::make_shared<const SparseMatrix>(pair.x), std::make_shared<const SparseMatrix>(pair.y));
}

}  // namespace amm
