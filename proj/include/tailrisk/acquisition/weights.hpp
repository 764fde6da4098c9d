#pragma once

#include <Eigen/Dense>

#include "tailrisk/risk/risk_measures.hpp"

namespace tailrisk {

/// Targeted-MSE weight for a quantile level: Gaussian density of (m - level)
/// with variance s2 + eps^2.
double tmse_weight(double m, double s2, double level, double eps);

/// Tail-weighted variant: the same normalization times Phi((level - m)/sd),
/// so deeper tail scenarios keep a large weight.
double tmse_weight_tvar(double m, double s2, double level, double eps);

/// Weights for every entry of (mean, var). `mixing` in [0,1] blends the VaR
/// (mixing = 1) and TVaR (mixing = 0) forms; by default the measure decides.
Eigen::VectorXd tmse_weights(const Eigen::VectorXd& mean, const Eigen::VectorXd& var, double level, double eps,
                             Measure measure, double mixing = -1.0);

}  // namespace tailrisk
