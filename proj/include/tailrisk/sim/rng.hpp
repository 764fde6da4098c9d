#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace tailrisk {

/// xoshiro256** seeded through SplitMix64. Small state, so a fresh generator
/// per inner draw is cheap; that is what makes draws addressable by
/// (stream, draw index) and independent of batching and thread count.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

  double uniform() noexcept;  // (0, 1)
  double normal();            // standard normal

 private:
  std::array<std::uint64_t, 4> s_{};
  std::normal_distribution<double> normal_;
};

/// Stream key of scenario `scenario` within a run seeded by `run_seed`.
std::uint64_t scenario_stream(std::uint64_t run_seed, std::uint64_t scenario) noexcept;

/// Generator for inner draw `draw` (0-based count of prior draws) of a stream.
Xoshiro256 draw_rng(std::uint64_t stream, std::uint64_t draw) noexcept;

/// Seed of macro-replication `rep` derived from a master seed.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t rep) noexcept;

}  // namespace tailrisk
