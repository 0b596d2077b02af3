#pragma once

#include <cstdint>
#include <random>

namespace hadamux {

// SplitMix64 finalizer. Used to turn (seed, stream index) pairs into
// decorrelated 64-bit seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Child seed for stream `index` of `seed`. This is the only seed-splitting
// primitive in the library, so every derived stream is reproducible from the
// master seed plus a path of indices.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Portable random source: mt19937_64 for bits, hand-written conversions for
// doubles and Gaussians so the streams do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on [lo, hi].
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller; the second variate is cached.
  double gaussian();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace hadamux
