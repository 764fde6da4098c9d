#include "tailrisk/engine/stage_estimate.hpp"

#include <cmath>
#include <limits>

namespace tailrisk {

RiskEstimate estimate_from_view(const StageView& view, const RiskSpec& risk, const std::vector<double>& hd,
                                const Eigen::VectorXd* means_override) {
  const Eigen::VectorXd& means = means_override ? *means_override : view.mean;
  RiskEstimate est = estimate_risk(means, risk, hd);
  est.sd = estimator_sd(*view.gp, rows_of(*view.x, est.support), est.weights);
  const std::size_t tail = risk.tail_count(view.size());
  std::size_t sampled = 0;
  for (auto r : view.reps) sampled += r > 0 ? 1 : 0;
  est.provisional = sampled < tail;
  return est;
}

RiskEstimate estimate_from_samples(const Eigen::VectorXd& ybar, const Eigen::VectorXd& tau2,
                                   const std::vector<std::int64_t>& reps, const RiskSpec& risk,
                                   const std::vector<double>& hd) {
  RiskEstimate est = estimate_risk(ybar, risk, hd);
  double var = 0.0;
  for (std::size_t i = 0; i < est.support.size(); ++i) {
    const std::size_t n = est.support[i];
    const double w = est.weights[i];
    const double t = tau2(static_cast<Eigen::Index>(n));
    if (reps[n] < 1) {
      var = std::numeric_limits<double>::quiet_NaN();
      break;
    }
    var += w * w * t / static_cast<double>(reps[n]);
  }
  est.sd = std::sqrt(var);
  return est;
}

}  // namespace tailrisk
