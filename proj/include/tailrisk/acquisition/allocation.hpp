#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "tailrisk/acquisition/lookahead.hpp"
#include "tailrisk/acquisition/scores.hpp"

namespace tailrisk {

struct AllocationPlan {
  std::map<std::size_t, std::int64_t> entries;  // scenario -> added replications
  std::int64_t budget = 0;

  std::int64_t total() const noexcept;
  void add(std::size_t n, std::int64_t r) {
    if (r > 0) entries[n] += r;
  }
};

/// Integer minimizer of sum_i a_i / (r_i + x_i) subject to sum x_i = budget,
/// x_i >= 0. Requires r_i > 0 wherever a_i > 0.
std::vector<std::int64_t> allocate_separable(const std::vector<double>& a, const std::vector<double>& r,
                                             std::int64_t budget);

double separable_objective(const std::vector<double>& a, const std::vector<double>& r,
                           const std::vector<std::int64_t>& x);

struct SvDetails {
  std::vector<std::size_t> optimized;  // scenarios in the variance-minimization subset
  std::vector<double> a;               // u_n^2 tau_n^2 aligned with `optimized`
  std::int64_t probes = 0;
};

/// Estimator-variance allocation. `candidates` must be ordered by decreasing
/// priority (screening weight); unsampled candidates first get one probe
/// replication each, at most ceil(dr/2) of them.
AllocationPlan allocate_sv_gp(const StageView& view, const Eigen::VectorXd& offset,
                              const std::vector<std::size_t>& candidates, const std::vector<std::size_t>& support,
                              const std::vector<double>& weights, std::int64_t dr, SvDetails* details = nullptr);

/// Uniform split over scenarios whose mean lies between the L-th and U-th
/// smallest means (1-based ranks); the remainder goes to the lowest means.
AllocationPlan allocate_sr_gp(const Eigen::VectorXd& means, std::size_t lower, std::size_t upper, std::int64_t dr);

/// Uniform split of dr over `members`, remainder one each in the given order.
AllocationPlan allocate_uniform(const std::vector<std::size_t>& members, std::int64_t dr);

}  // namespace tailrisk
