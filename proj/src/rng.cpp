#include "cvdv/rng.hpp"

namespace cvdv {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t root_seed, std::uint64_t stream_index) {
  return splitmix64(root_seed ^ splitmix64(stream_index));
}

}  // namespace cvdv
