#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "slope/normal.hpp"

namespace slope {

namespace detail {

// SplitMix64 output function (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based random stream. A stream is identified by a user seed plus
/// a list of stream labels (replicate index, purpose tag, ...); draws are a
/// pure function of (seed, labels, draw counter), so parallel schedules
/// cannot change results. Normal variates are produced by inverting the
/// normal CDF on one uniform each, keeping the draw count per variate fixed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> labels = {})
      : key_(detail::mix64(seed)) {
    for (std::uint64_t id : labels) key_ = detail::mix64(key_ ^ detail::mix64(id));
  }

  std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() { return inv_norm_cdf(uniform()); }

  /// Laplace(0, scale); variance is 2*scale^2.
  double laplace(double scale) {
    double u = uniform() - 0.5;
    return u < 0 ? scale * std::log(1.0 + 2.0 * u) : -scale * std::log(1.0 - 2.0 * u);
  }

  /// Unbiased draw from {0, 1, ..., n-1}.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t bound = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= bound);
    return x % n;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace slope
