#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tailrisk {

/// Per-scenario replication counts and running sample statistics.
struct DesignState {
  std::vector<std::int64_t> reps;
  std::vector<double> mean;
  std::vector<double> sq_dev;  // sum of squared deviations, (r - 1) * tau_hat^2
  std::size_t stage = 0;
  std::int64_t remaining = 0;

  DesignState() = default;
  DesignState(std::size_t n_scenarios, std::int64_t budget);

  std::size_t size() const noexcept { return reps.size(); }
  bool sampled(std::size_t n) const noexcept { return reps[n] > 0; }
  bool has_variance(std::size_t n) const noexcept { return reps[n] >= 2; }
  /// Sample variance; NaN when fewer than two replications exist.
  double tau2_hat(std::size_t n) const noexcept;
  /// Mean of tau_hat^2 over scenarios that have one; NaN if none.
  double pooled_tau2() const noexcept;
  std::vector<std::size_t> sampled_indices() const;
  std::int64_t total_reps() const noexcept;
};

/// Merge a batch of new outputs at scenario n into the running statistics
/// using the pooled-mean and pooled-variance identities.
DesignState update_observations(DesignState design, std::size_t n, std::span<const double> outputs);

/// In-place form used by the engine.
void add_outputs(DesignState& design, std::size_t n, std::span<const double> outputs);

}  // namespace tailrisk
