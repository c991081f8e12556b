#pragma once

#include <cstdint>
#include <random>

namespace cvdv {

// SplitMix64 finalizer. Used to derive independent per-trial seeds from one
// experiment seed by counter splitting.
std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_stream_seed(std::uint64_t root_seed, std::uint64_t stream_index);

// Seeded random source. Uniform variates are built from the raw engine bits
// so a seed reproduces the same numbers on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace cvdv
