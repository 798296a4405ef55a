#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ampkit {

// Deterministic random stream with named substream derivation. The engine is
// the standardized mt19937_64; uniform and Gaussian transforms are done by
// hand so that draws are bit-identical across platforms and standard
// libraries (std::*_distribution is implementation-defined).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  // Independent stream keyed by (seed, name). Substreams of substreams work.
  RandomStream substream(std::string_view name) const;

  // Uniform on the open interval (0, 1).
  double uniform();

  // Standard normal via Box-Muller; pairs are cached.
  double gaussian();

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// SplitMix64 finalizer, used for seed mixing.
std::uint64_t mix64(std::uint64_t x);

}  // namespace ampkit
