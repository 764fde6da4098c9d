#include "tailrisk/risk/risk_measures.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tailrisk/util/errors.hpp"

namespace tailrisk {

const char* measure_name(Measure m) noexcept { return m == Measure::VaR ? "VaR" : "TVaR"; }

Measure parse_measure(std::string_view name) {
  if (name == "VaR" || name == "var") return Measure::VaR;
  if (name == "TVaR" || name == "tvar") return Measure::TVaR;
  throw std::invalid_argument("unknown risk measure '" + std::string(name) + "'");
}

std::size_t RiskSpec::tail_count(std::size_t n) const {
  const double t = std::ceil(alpha * static_cast<double>(n) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(t, 1.0)), 1, std::max<std::size_t>(n, 1));
}

std::vector<double> hd_weights(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("hd_weights: alpha must lie in (0,1)");
  if (n < 2) throw std::invalid_argument("hd_weights: need N >= 2");
  const double a = static_cast<double>(n + 1) * alpha;
  const double b = static_cast<double>(n + 1) * (1.0 - alpha);
  std::vector<double> w(n);
  double prev = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double cdf = i == n ? 1.0 : boost::math::ibeta(a, b, static_cast<double>(i) / static_cast<double>(n));
    w[i - 1] = std::max(cdf - prev, 0.0);
    prev = cdf;
  }
  return w;
}

std::vector<std::size_t> ascending_order(const Eigen::VectorXd& values) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    return values(static_cast<Eigen::Index>(i)) < values(static_cast<Eigen::Index>(j));
  });
  return idx;
}

RiskEstimate estimate_var(const Eigen::VectorXd& means, const std::vector<double>& hd, double alpha,
                          double min_weight) {
  if (static_cast<std::size_t>(means.size()) != hd.size()) {
    throw std::invalid_argument("estimate_var: weight vector does not match the number of means");
  }
  if (!means.allFinite()) throw std::invalid_argument("estimate_var: non-finite means");
  const auto order = ascending_order(means);
  RiskEstimate est;
  double kept = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (hd[i] >= min_weight) {
      est.support.push_back(order[i]);
      est.weights.push_back(hd[i]);
      kept += hd[i];
    }
  }
  for (double& w : est.weights) w /= kept;
  for (std::size_t i = 0; i < est.support.size(); ++i) {
    est.point += est.weights[i] * means(static_cast<Eigen::Index>(est.support[i]));
  }
  const std::size_t rank = RiskSpec{Measure::VaR, alpha}.tail_count(order.size());
  est.quantile_scenario = order[rank - 1];
  return est;
}

RiskEstimate estimate_tvar(const Eigen::VectorXd& means, std::size_t tail_count) {
  if (tail_count < 1 || tail_count > static_cast<std::size_t>(means.size())) {
    throw std::invalid_argument("estimate_tvar: tail count out of range");
  }
  if (!means.allFinite()) throw std::invalid_argument("estimate_tvar: non-finite means");
  const auto order = ascending_order(means);
  RiskEstimate est;
  const double w = 1.0 / static_cast<double>(tail_count);
  double sum = 0.0;
  for (std::size_t i = 0; i < tail_count; ++i) {
    est.support.push_back(order[i]);
    est.weights.push_back(w);
    sum += means(static_cast<Eigen::Index>(order[i]));
  }
  est.point = sum / static_cast<double>(tail_count);
  est.quantile_scenario = order[tail_count - 1];
  return est;
}

RiskEstimate estimate_risk(const Eigen::VectorXd& means, const RiskSpec& spec, const std::vector<double>& hd) {
  if (spec.measure == Measure::VaR) return estimate_var(means, hd, spec.alpha);
  return estimate_tvar(means, spec.tail_count(static_cast<std::size_t>(means.size())));
}

double estimator_sd(const GpSurrogate& surrogate, const Eigen::MatrixXd& x_support, const std::vector<double>& weights) {
  if (static_cast<std::size_t>(x_support.rows()) != weights.size()) {
    throw std::invalid_argument("estimator_sd: weights and support differ in size");
  }
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
  // w K w^T = w C w^T - |L^{-1} c(X, support) w|^2
  const double prior = w.dot(gram(surrogate.kernel(), x_support) * w);
  double reduction = 0.0;
  if (surrogate.size() > 0) reduction = (surrogate.whitened_cross(x_support) * w).squaredNorm();
  const double var = prior - reduction;
  const double tol = 1e-8 * std::max(surrogate.kernel().sigma2, 1.0);
  if (var < -tol) throw NumericalError("estimator_sd: negative posterior variance of the estimator");
  return std::sqrt(std::max(var, 0.0));
}

}  // namespace tailrisk
