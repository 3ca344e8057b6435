#pragma once

#include <array>
#include <cstdint>

namespace sykq {

/// Generator identity recorded in run manifests; results are reproducible
/// across platforms because nothing here depends on the standard library's
/// distribution implementations.
inline constexpr const char* kRngIdentity =
    "xoshiro256** seeded via splitmix64; Gaussian via Box-Muller";

/// SplitMix64 finalizer step; a bijection of the 64-bit integers.
std::uint64_t splitmix64(std::uint64_t& state);

/// Per-realization seed stream: deterministic and collision-free over the
/// index for a fixed base seed (the finalizer is bijective and the input is
/// affine in the index).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in (0, 1].
  double next_unit();

 private:
  std::array<std::uint64_t, 4> s_;
};

/// Standard normal deviates via the Box-Muller transform (no rejection, so
/// the draw count per sample is fixed and the stream is reproducible).
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double next();

 private:
  Xoshiro256StarStar rng_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace sykq
