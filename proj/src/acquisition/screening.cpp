#include "tailrisk/acquisition/screening.hpp"

#include <algorithm>
#include <numeric>

#include "tailrisk/acquisition/weights.hpp"

namespace tailrisk {

CandidateSet screen_candidates(const StageView& view, double level, double eps, Measure measure,
                               std::size_t quantile_scenario, std::size_t tail_count,
                               const ScreeningOptions& options) {
  const std::size_t n = view.size();
  const Eigen::VectorXd w = tmse_weights(view.mean, view.var, level, eps, measure, options.mixing);
  const double total = w.sum();
  std::vector<bool> keep(n, false);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w(static_cast<Eigen::Index>(i));
    const bool pass = measure == Measure::VaR ? (total > 0.0 && wi / total > options.var_ratio)
                                              : wi > options.tvar_threshold;
    if (pass) keep[i] = any = true;
  }
  CandidateSet out;
  if (!any) {
    out.fallback = true;
    const auto order = ascending_order(view.mean);
    const std::size_t count = std::min(n, 4 * tail_count);
    for (std::size_t i = 0; i < count; ++i) keep[order[i]] = true;
  }
  keep[quantile_scenario] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (view.mean(static_cast<Eigen::Index>(i)) < level) keep[i] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.indices.push_back(i);
  }
  std::stable_sort(out.indices.begin(), out.indices.end(), [&](std::size_t a, std::size_t b) {
    return w(static_cast<Eigen::Index>(a)) > w(static_cast<Eigen::Index>(b));
  });
  for (std::size_t i : out.indices) out.weights.push_back(w(static_cast<Eigen::Index>(i)));
  return out;
}

}  // namespace tailrisk
