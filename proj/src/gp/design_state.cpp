#include "tailrisk/gp/design_state.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tailrisk {

DesignState::DesignState(std::size_t n_scenarios, std::int64_t budget)
    : reps(n_scenarios, 0), mean(n_scenarios, 0.0), sq_dev(n_scenarios, 0.0), remaining(budget) {}

double DesignState::tau2_hat(std::size_t n) const noexcept {
  if (reps[n] < 2) return std::numeric_limits<double>::quiet_NaN();
  return sq_dev[n] / static_cast<double>(reps[n] - 1);
}

double DesignState::pooled_tau2() const noexcept {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 0; n < reps.size(); ++n) {
    if (reps[n] >= 2) {
      sum += tau2_hat(n);
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

std::vector<std::size_t> DesignState::sampled_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t n = 0; n < reps.size(); ++n) {
    if (reps[n] > 0) idx.push_back(n);
  }
  return idx;
}

std::int64_t DesignState::total_reps() const noexcept {
  return std::accumulate(reps.begin(), reps.end(), std::int64_t{0});
}

void add_outputs(DesignState& design, std::size_t n, std::span<const double> outputs) {
  if (n >= design.size()) throw std::out_of_range("add_outputs: scenario index");
  if (outputs.empty()) return;
  double batch_mean = 0.0;
  for (double y : outputs) {
    if (!std::isfinite(y)) throw std::invalid_argument("add_outputs: non-finite output");
    batch_mean += y;
  }
  const double rb = static_cast<double>(outputs.size());
  batch_mean /= rb;
  double batch_sq = 0.0;
  for (double y : outputs) batch_sq += (y - batch_mean) * (y - batch_mean);

  const double ra = static_cast<double>(design.reps[n]);
  const double total = ra + rb;
  const double delta = batch_mean - design.mean[n];
  design.mean[n] = (ra * design.mean[n] + rb * batch_mean) / total;
  design.sq_dev[n] += batch_sq + delta * delta * ra * rb / total;
  design.reps[n] += static_cast<std::int64_t>(outputs.size());
}

DesignState update_observations(DesignState design, std::size_t n, std::span<const double> outputs) {
  add_outputs(design, n, outputs);
  return design;
}

}  // namespace tailrisk
