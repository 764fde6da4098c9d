#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tailrisk/acquisition/lookahead.hpp"
#include "tailrisk/risk/risk_measures.hpp"

namespace tailrisk {

/// Risk estimate from the posterior means over all scenarios plus its
/// posterior standard deviation.
RiskEstimate estimate_from_view(const StageView& view, const RiskSpec& risk, const std::vector<double>& hd,
                                const Eigen::VectorXd* means_override = nullptr);

/// Sample-average estimate; sd from the Monte Carlo error of the weighted
/// sample means (NaN when no sample variance is available).
RiskEstimate estimate_from_samples(const Eigen::VectorXd& ybar, const Eigen::VectorXd& tau2,
                                   const std::vector<std::int64_t>& reps, const RiskSpec& risk,
                                   const std::vector<double>& hd);

}  // namespace tailrisk
