#pragma once

#include <Eigen/Dense>
#include <span>
#include <string_view>
#include <vector>

#include "tailrisk/simd/kernels.hpp"

namespace tailrisk {

using simd::KernelFamily;

struct KernelSpec {
  KernelFamily family = KernelFamily::Matern52;
  double sigma2 = 1.0;
  std::vector<double> lengthscales;

  std::size_t dim() const noexcept { return lengthscales.size(); }
  void validate() const;  // throws std::invalid_argument
};

const char* family_name(KernelFamily family) noexcept;
KernelFamily parse_family(std::string_view name);

double kernel_eval(const KernelSpec& spec, std::span<const double> z, std::span<const double> zp);

/// Covariance between the rows of `a` (na x d) and the rows of `b` (nb x d),
/// returned as an na x nb matrix.
Eigen::MatrixXd cross_covariance(const KernelSpec& spec, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

inline Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& x) {
  return cross_covariance(spec, x, x);
}

}  // namespace tailrisk
