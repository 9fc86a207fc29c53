#pragma once

#include <cstdint>
#include <random>

namespace nafs {

// mt19937_64 is bit-exact on every conforming implementation; the standard
// <random> distributions are not. All randomness in the library therefore
// goes through the hand-rolled mappings below so that a fixed seed yields
// identical output everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, bound), bound >= 1.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = gen_();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double next_normal();

  bool next_bernoulli(double p) { return next_unit() < p; }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Derives a decorrelated child seed so independent consumers (k-means
// restarts, ensemble branches, negative samplers) never share a stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace nafs
