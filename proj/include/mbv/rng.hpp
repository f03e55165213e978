#pragma once

#include <cmath>
#include <cstdint>

namespace mbv {

// splitmix64 (Steele/Lea/Flood). Used both as a seed expander and as the
// 64-bit avalanche behind per-repetition seed derivation, so that other
// implementations can reproduce the streams from the published constants.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

// Derives an independent stream seed from (base_seed, n, repetition, stream).
// Each component is absorbed through one splitmix64 step; collisions between
// distinct tuples are as unlikely as 64-bit hash collisions.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t n,
                                 std::uint64_t repetition, std::uint64_t stream) {
  SplitMix64 sm(base_seed);
  sm.state ^= sm.next() + n;
  sm.state ^= sm.next() + repetition;
  sm.state ^= sm.next() + stream;
  return sm.next();
}

// xoshiro256++ 1.0 (Blackman/Vigna), seeded via splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via the Marsaglia polar method (one spare cached).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4]{};
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mbv
