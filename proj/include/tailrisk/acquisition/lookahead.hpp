#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "tailrisk/gp/surrogate.hpp"

namespace tailrisk {

/// Everything the acquisition rules need at one stage, over all N scenarios.
struct StageView {
  const GpSurrogate* gp = nullptr;
  const Eigen::MatrixXd* x = nullptr;  // standardized coordinates, one row per scenario
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  Eigen::VectorXd tau2;               // per-replication noise variance
  std::vector<std::int64_t> reps;

  std::size_t size() const noexcept { return reps.size(); }
};

StageView make_stage_view(const GpSurrogate& gp, const Eigen::MatrixXd& x, const Eigen::VectorXd& offset,
                          Eigen::VectorXd tau2, std::vector<std::int64_t> reps);

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx);

/// Posterior covariance between target scenarios (rows) and candidates (columns).
Eigen::MatrixXd cross_posterior_covariance(const StageView& view, const std::vector<std::size_t>& targets,
                                           const std::vector<std::size_t>& candidates);

/// Posterior variance at scenario n if dr more replications were added at
/// scenario m, all else frozen.
double lookahead_variance(const StageView& view, std::size_t n, std::size_t m, std::int64_t dr);

/// Same quantity from precomputed pieces: s2_n - cov^2 / (s2_m + tau2_m / dr).
inline double lookahead_from(double s2_n, double cov_nm, double s2_m, double tau2_m, std::int64_t dr) {
  if (dr <= 0) return s2_n;
  const double denom = s2_m + tau2_m / static_cast<double>(dr);
  if (!(denom > 0.0)) return s2_n;
  const double v = s2_n - cov_nm * cov_nm / denom;
  return v > 0.0 ? v : 0.0;
}

/// (C + Delta_cand)^{-1} by the Woodbury identity, given A^{-1} = (C + Delta)^{-1}
/// and the two noise diagonals (delta_cand <= delta entrywise).
Eigen::MatrixXd woodbury_inverse(const Eigen::MatrixXd& a_inv, const Eigen::VectorXd& delta,
                                 const Eigen::VectorXd& delta_cand);

/// First-order approximation A^{-1} + A^{-1} (Delta - Delta_cand) A^{-1}.
Eigen::MatrixXd approximate_inverse(const Eigen::MatrixXd& a_inv, const Eigen::VectorXd& delta,
                                    const Eigen::VectorXd& delta_cand);

}  // namespace tailrisk
