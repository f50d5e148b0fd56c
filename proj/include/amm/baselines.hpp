#pragma once

#include "amm/fd.hpp"
#include "amm/scod.hpp"
#include "amm/sparse.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace amm {

struct SplitFactors {
  DenseMatrix a;  ///< columns of the concatenated sketch belonging to X
  DenseMatrix b;  ///< columns belonging to Y
};

/// FD-AMM: Frequent Directions on the concatenated rows z = [x, y]; A^T B is the cross block
/// of the approximate Gram matrix C^T C.
class FdAmm {
 public:
  FdAmm(std::size_t m, std::size_t dx, std::size_t dy, FdOptions options = {});

  void update(std::span<const double> x, std::span<const double> y);
  void update(const SparseRowView& x, const SparseRowView& y);

  /// The full (dx + dy)-column sketch C.
  const DenseMatrix& sketch() const { return fd_.sketch(); }
  SplitFactors finalize() const;

  std::size_t dx() const { return dx_; }
  std::size_t dy() const { return dy_; }

 private:
  std::size_t dx_;
  std::size_t dy_;
  FrequentDirections fd_;
  std::vector<double> scratch_;
};

/// SFD-AMM: the symmetric-mode SCOD engine run on z = [x, y]; the output pair is split
/// columnwise so that A^T B is the cross block of the sketched Z^T Z.
class SfdAmm {
 public:
  SfdAmm(std::size_t m, std::size_t dx, std::size_t dy, QSchedule schedule = QSchedule::fixed(),
         std::uint64_t seed = 0, FlushDiagnostics diagnostics = FlushDiagnostics::none);

  void update(const SparseRowView& x, const SparseRowView& y);

  /// Flushes the inner sketch and returns (A[:, :dx], B[:, dx:]).
  SplitFactors finalize();

  const ScodSketch& inner() const { return scod_; }
  std::size_t dx() const { return dx_; }
  std::size_t dy() const { return dy_; }

 private:
  std::size_t dx_;
  std::size_t dy_;
  ScodSketch scod_;
  std::vector<SparseIndex> idx_;
  std::vector<double> val_;
};

/// Row z = [x, y] as a sparse row of dimension dx + dy written into the given scratch storage.
SparseRowView concat_rows(const SparseRowView& x, const SparseRowView& y,
                          std::vector<SparseIndex>& idx, std::vector<double>& val);

}  // namespace amm
