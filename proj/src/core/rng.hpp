#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace groomsim {

// Random stream used by every stochastic step of the simulator.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions are implementation-defined, so the
// uniform, index and Gaussian transforms are implemented here; a given seed
// therefore reproduces the same run with any conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) from the top 53 bits of one engine output.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  // Gaussian(mean, sigma) by the Box-Muller transform. Consumes exactly two
  // uniform01() draws per call; the second Box-Muller output is discarded.
  double normal(double mean, double sigma);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer. Bijective on 64-bit words with full avalanche.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace groomsim
