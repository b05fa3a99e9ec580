#pragma once

#include <cmath>
#include <cstdint>

namespace sobocert {

/// Counter-based splitmix64 stream. Deterministic across platforms, which
/// keeps every multistart optimizer and every randomized suite reproducible
/// from a single recorded seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double next_double(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  /// Standard normal via Box-Muller (uses two draws).
  double next_gaussian();

 private:
  std::uint64_t state_;
};

inline double SplitMix64::next_gaussian() {
  double u1 = next_double();
  double u2 = next_double();
  if (u1 < 1e-300) u1 = 1e-300;
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

/// Derives a child seed for worker `index` from a master seed.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 s(master ^ (0xd1342543de82ef95ULL * (index + 1)));
  return s.next_u64();
}

}  // namespace sobocert
