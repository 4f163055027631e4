#pragma once

#include <cstdint>
#include <random>

namespace sim {

// Deterministic per-episode random source. Every noise draw of an episode
// flows through one instance, so a seed fully determines the trajectory.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// splitmix64-style mixing of a base seed with a stream index. Streams derived
// from distinct indices are independent for simulation purposes, and the
// mapping is stable so sweeps are reproducible and order-free.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace sim
