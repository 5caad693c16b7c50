#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace driftbench {

/// SplitMix64, used to expand a single 64-bit seed into generator state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman & Vigna). All stream generation and
/// randomized learners draw from this generator so that output depends only
/// on the seed, never on the standard library's distribution objects.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 0) { this->seed(seed); }

  void seed(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n) by bitmask rejection; n > 0.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t bound = n - 1;
    std::uint64_t mask = bound;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    std::uint64_t v;
    do {
      v = (*this)() & mask;
    } while (v > bound);
    return v;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
};

/// Index sampler reproducing NumPy's legacy `RandomState.randint(0, n)`
/// stream (MT19937 seeded with init_genrand, masked rejection on 32-bit
/// draws). `std::mt19937` is specified bit-for-bit by the standard, so this
/// matches `np.random.seed(seed); np.random.choice(n, k)` on every platform.
class NumpyLegacyIndexSampler {
 public:
  explicit NumpyLegacyIndexSampler(std::uint32_t seed = 0) : engine_(seed) {}

  void seed(std::uint32_t seed) { engine_.seed(seed); }

  std::uint32_t below(std::uint32_t n) {
    if (n <= 1) return 0;  // NumPy skips the draw when the range is empty
    const std::uint32_t bound = n - 1;
    std::uint32_t mask = bound;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    std::uint32_t v;
    do {
      v = static_cast<std::uint32_t>(engine_()) & mask;
    } while (v > bound);
    return v;
  }

 private:
  std::mt19937 engine_;
};

}  // namespace driftbench
