#pragma once

#include <Eigen/Dense>
#include <limits>

#include "tailrisk/gp/kernel.hpp"

namespace tailrisk {

struct LikelihoodValue {
  double loglik = -std::numeric_limits<double>::infinity();
  double beta0 = 0.0;  // GLS level when profiled, else the fixed value
  bool ok = false;
};

/// Gaussian marginal log-likelihood of `resid` (outputs minus known trend
/// offsets) under N(beta0, C + diag(noise)). When `profile_level` is set the
/// constant level is replaced by its generalized-least-squares estimate.
LikelihoodValue log_likelihood(const KernelSpec& kernel, const Eigen::MatrixXd& x, const Eigen::VectorXd& resid,
                               const Eigen::VectorXd& noise, bool profile_level, double fixed_beta0 = 0.0);

}  // namespace tailrisk
