#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string_view>
#include <vector>

#include "tailrisk/gp/surrogate.hpp"

namespace tailrisk {

enum class Measure { VaR, TVaR };

const char* measure_name(Measure m) noexcept;
Measure parse_measure(std::string_view name);

struct RiskSpec {
  Measure measure = Measure::VaR;
  double alpha = 0.005;

  /// ceil(alpha * N), at least 1.
  std::size_t tail_count(std::size_t n) const;
  bool operator==(const RiskSpec&) const = default;
};

struct RiskEstimate {
  double point = 0.0;
  double sd = 0.0;
  std::vector<std::size_t> support;  // scenario indices with nonzero weight
  std::vector<double> weights;       // aligned with support, summing to 1
  std::size_t quantile_scenario = 0;
  std::size_t stage = 0;
  bool provisional = false;
};

/// Harrell-Davis weights over ranks 1..N (index 0 holds rank 1).
std::vector<double> hd_weights(std::size_t n, double alpha);

/// Ascending order of `values`, ties broken by index.
std::vector<std::size_t> ascending_order(const Eigen::VectorXd& values);

/// HD-smoothed VaR over all means; support holds the weights at least
/// `min_weight`, renormalized to sum to 1.
RiskEstimate estimate_var(const Eigen::VectorXd& means, const std::vector<double>& hd, double alpha,
                          double min_weight = 1e-12);

/// Average of the tail_count smallest means.
RiskEstimate estimate_tvar(const Eigen::VectorXd& means, std::size_t tail_count);

RiskEstimate estimate_risk(const Eigen::VectorXd& means, const RiskSpec& spec, const std::vector<double>& hd);

/// sqrt(w K w^T) with K the posterior covariance over the support points,
/// given as rows of `x_support`.
double estimator_sd(const GpSurrogate& surrogate, const Eigen::MatrixXd& x_support, const std::vector<double>& weights);

}  // namespace tailrisk
