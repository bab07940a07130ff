#pragma once

#include <cstdint>
#include <vector>

namespace saga {

// Deterministic 64-bit generator (splitmix64). Unlike <random> engines +
// distributions, every draw here is bit-reproducible across platforms, which
// the run/experiment determinism guarantees rely on. Child streams derived
// with split() depend only on the construction seed and the stream index,
// never on how many draws the parent has made.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n).
  int uniform_int(int n) {
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (0ull - un) % un;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return static_cast<int>(x % un);
    }
  }

  // Independent child stream; a pure function of (seed, stream).
  Rng split(std::uint64_t stream) const {
    std::uint64_t z = seed_ ^ (0xD1B54A32D192ED03ull * (stream + 1));
    z = (z ^ (z >> 32)) * 0xDABA0B6EB09322E3ull;
    z = (z ^ (z >> 32)) * 0xDABA0B6EB09322E3ull;
    return Rng(z ^ (z >> 32));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
      const int j = uniform_int(i + 1);
      std::swap(v[static_cast<size_t>(i)], v[static_cast<size_t>(j)]);
    }
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

// Stable 64-bit hash combiner for deriving per-task seeds.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0) {
  Rng r(base ^ (a * 0x9E3779B97F4A7C15ull) ^ (b * 0xC2B2AE3D27D4EB4Full));
  return r.next_u64();
}

}  // namespace saga
