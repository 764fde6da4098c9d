#include "tailrisk/acquisition/weights.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

#include "tailrisk/simd/kernels.hpp"

namespace tailrisk {

namespace {
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
}  // namespace

double tmse_weight(double m, double s2, double level, double eps) {
  const double v = s2 + eps * eps;
  if (!(v > 0.0)) throw std::invalid_argument("tmse_weight: zero variance and zero smoothing");
  const double u = m - level;
  return std::exp(-0.5 * u * u / v) / std::sqrt(2.0 * std::numbers::pi * v);
}

double tmse_weight_tvar(double m, double s2, double level, double eps) {
  const double v = s2 + eps * eps;
  if (!(v > 0.0)) throw std::invalid_argument("tmse_weight_tvar: zero variance and zero smoothing");
  return normal_cdf((level - m) / std::sqrt(v)) / std::sqrt(2.0 * std::numbers::pi * v);
}

Eigen::VectorXd tmse_weights(const Eigen::VectorXd& mean, const Eigen::VectorXd& var, double level, double eps,
                             Measure measure, double mixing) {
  const double mix = mixing >= 0.0 ? mixing : (measure == Measure::VaR ? 1.0 : 0.0);
  const auto n = mean.size();
  Eigen::VectorXd var_floor = var.cwiseMax(0.0);
  if (eps == 0.0) var_floor = var_floor.cwiseMax(1e-300);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  if (mix > 0.0) {
    simd::tmse_weights(std::span<const double>(mean.data(), static_cast<std::size_t>(n)),
                       std::span<const double>(var_floor.data(), static_cast<std::size_t>(n)), level, eps * eps,
                       std::span<double>(w.data(), static_cast<std::size_t>(n)));
    w *= mix;
  }
  if (mix < 1.0) {
    for (Eigen::Index i = 0; i < n; ++i) w(i) += (1.0 - mix) * tmse_weight_tvar(mean(i), var_floor(i), level, eps);
  }
  return w;
}

}  // namespace tailrisk
