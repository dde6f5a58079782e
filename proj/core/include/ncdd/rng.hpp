#pragma once

#include <cstdint>
#include <vector>

namespace ncdd {

/// 64-bit seed for any stochastic operation. Same seed, same build: bit-identical results.
struct RngSeed {
  std::uint64_t value = 1;
};

/// splitmix64 generator. Self-contained so results do not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  explicit Rng(RngSeed seed) : state_(seed.value) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n), unbiased (rejection sampling). n must be > 0.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via Box-Muller.
  double normal();

  /// Independent child stream; does not advance this generator.
  Rng child(std::uint64_t stream) const;

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stable seed derivation for named substreams.
inline RngSeed derive_seed(RngSeed seed, std::uint64_t stream) {
  std::uint64_t z = seed.value ^ (0xD1B54A32D192ED03ull + stream * 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return RngSeed{z ^ (z >> 31)};
}

inline Rng Rng::child(std::uint64_t stream) const {
  return Rng(derive_seed(RngSeed{state_}, stream));
}

/// Fisher-Yates shuffle of an index vector.
void shuffle_indices(std::vector<std::size_t>& indices, Rng& rng);

/// First k elements of a seeded permutation of [0, n), returned sorted.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace ncdd
