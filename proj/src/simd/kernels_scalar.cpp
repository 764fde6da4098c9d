#include "tailrisk/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tailrisk::simd::scalar {

namespace {
constexpr double kSqrt5 = 2.23606797749978969641;
}

void kernel_row(KernelFamily family, double sigma2, std::span<const double> inv_lengthscale,
                std::span<const double> x, ColumnPoints pts, std::span<double> out) {
  const std::size_t d = pts.cols;
  for (std::size_t i = 0; i < pts.rows; ++i) {
    double poly = 1.0;
    double expo = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (x[j] - pts.data[j * pts.stride + i]) * inv_lengthscale[j];
      if (family == KernelFamily::Matern52) {
        const double t = kSqrt5 * std::abs(h);
        poly *= 1.0 + t + t * t / 3.0;
        expo += t;
      } else {
        expo += 0.5 * h * h;
      }
    }
    out[i] = sigma2 * poly * std::exp(-expo);
  }
}

void tmse_weights(std::span<const double> mean, std::span<const double> var, double level,
                  double eps2, std::span<double> out) {
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double v = var[i] + eps2;
    const double u = mean[i] - level;
    out[i] = std::exp(-0.5 * u * u / v) / std::sqrt(2.0 * std::numbers::pi * v);
  }
}

double timse_sum(std::span<const double> var, std::span<const double> cov,
                 std::span<const double> weight, double inv_denom) {
  double acc = 0.0;
  for (std::size_t i = 0; i < var.size(); ++i) {
    const double v = std::max(var[i] - cov[i] * cov[i] * inv_denom, 0.0);
    acc += v * weight[i];
  }
  return acc;
}

void bs_payoff_batch(const BsPayoffCoeffs& c, std::span<const double> za, std::span<const double> zb,
                     std::span<const double> zc, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double s1 = c.spot1 * std::exp(c.drift1 + c.vol1 * za[i]);
    const double s2 =
        c.spot2 * std::exp(c.drift2 + c.vol2a * za[i] + c.vol2b * zb[i] + c.vol2c * zc[i]);
    out[i] = c.weight1 * std::max(s1 - c.strike1, 0.0) + c.weight2 * std::max(s2 - c.strike2, 0.0);
  }
}

}  // namespace tailrisk::simd::scalar
