#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace amm {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Mixes a stream id into a seed so sub-streams (flush i, trial j) do not overlap.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Counter-based standard normal source: draw(c) depends only on (seed, c), so a Gaussian
/// matrix can be filled in any order and reproduced exactly.
class CounterNormal {
 public:
  explicit constexpr CounterNormal(std::uint64_t seed) : key_(splitmix64(seed)) {}

  double draw(std::uint64_t counter) const {
    const double u1 = to_unit_open(splitmix64(key_ ^ (2 * counter)));
    const double u2 = to_unit_open(splitmix64(key_ ^ (2 * counter + 1)));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  // (0, 1], never 0 so the log is finite.
  static double to_unit_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
  }

  std::uint64_t key_;
};

}  // namespace amm
