#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace covert {

// Counter-based deterministic random streams.
//
// Every consumer of randomness (codeword (i,j), trial t, ...) derives its own
// stream key from the master seed and its indices, so results are independent
// of evaluation order and of how trials are distributed across threads.

namespace detail {

inline constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer.
inline constexpr uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Derives a stream key from a seed and a list of domain-separating indices.
inline constexpr uint64_t derive_key(uint64_t seed, std::initializer_list<uint64_t> parts) {
  uint64_t k = detail::mix64(seed + detail::kGolden);
  for (uint64_t p : parts) k = detail::mix64(k + detail::kGolden + p * 0xD6E8FEB86659FD93ull);
  return k;
}

// value(i) = mix(key + (i+1)*golden); advancing the counter is the only state.
class CounterRng {
 public:
  explicit CounterRng(uint64_t key) : key_(key) {}
  CounterRng(uint64_t seed, std::initializer_list<uint64_t> parts)
      : key_(derive_key(seed, parts)) {}

  uint64_t next_u64() { return detail::mix64(key_ + (++ctr_) * detail::kGolden); }

  // Uniform in [0, 1).
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_unit() < p; }

  uint32_t next_below(uint32_t bound) {
    return uint32_t(next_u64() % uint64_t(bound));  // bias negligible at our bounds
  }

  // Standard normal, Box-Muller (std::normal_distribution is not
  // reproducible across library implementations).
  double next_gaussian() {
    double u1 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  // Positions of an i.i.d. Bernoulli(p) indicator sequence of length n,
  // appended to `out` in increasing order. Skips between hits are sampled
  // geometrically, which realizes the same law in O(np) draws.
  template <typename Vec>
  void sample_support(uint32_t n, double p, Vec& out) {
    if (p <= 0.0) return;
    if (p >= 1.0) {
      for (uint32_t i = 0; i < n; ++i) out.push_back(i);
      return;
    }
    const double denom = std::log1p(-p);
    double pos = -1.0;
    for (;;) {
      double u = next_unit();
      while (u <= 0.0) u = next_unit();
      pos += 1.0 + std::floor(std::log(u) / denom);
      if (pos >= double(n)) break;
      out.push_back(uint32_t(pos));
    }
  }

 private:
  uint64_t key_;
  uint64_t ctr_ = 0;
};

}  // namespace covert
