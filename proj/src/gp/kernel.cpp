#include "tailrisk/gp/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tailrisk {

void KernelSpec::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("kernel: sigma2 must be positive");
  if (lengthscales.empty()) throw std::invalid_argument("kernel: no lengthscales");
  for (double t : lengthscales) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("kernel: lengthscales must be positive");
  }
}

const char* family_name(KernelFamily family) noexcept {
  return family == KernelFamily::Matern52 ? "matern52" : "gaussian";
}

KernelFamily parse_family(std::string_view name) {
  if (name == "matern52") return KernelFamily::Matern52;
  if (name == "gaussian") return KernelFamily::Gaussian;
  throw std::invalid_argument("unknown kernel family '" + std::string(name) + "'");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> z, std::span<const double> zp) {
  spec.validate();
  if (z.size() != spec.dim() || zp.size() != spec.dim()) {
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  }
  double poly = 1.0;
  double expo = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double h = (z[j] - zp[j]) / spec.lengthscales[j];
    if (spec.family == KernelFamily::Matern52) {
      const double t = std::sqrt(5.0) * std::abs(h);
      poly *= 1.0 + t + t * t / 3.0;
      expo += t;
    } else {
      expo += 0.5 * h * h;
    }
  }
  return spec.sigma2 * poly * std::exp(-expo);
}

Eigen::MatrixXd cross_covariance(const KernelSpec& spec, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (static_cast<std::size_t>(a.cols()) != spec.dim() || static_cast<std::size_t>(b.cols()) != spec.dim()) {
    throw std::invalid_argument("cross_covariance: dimension mismatch");
  }
  const std::size_t d = spec.dim();
  std::vector<double> inv(d);
  for (std::size_t j = 0; j < d; ++j) inv[j] = 1.0 / spec.lengthscales[j];

  Eigen::MatrixXd out(a.rows(), b.rows());
  const simd::ColumnPoints pts{a.data(), static_cast<std::size_t>(a.rows()), d,
                               static_cast<std::size_t>(a.rows())};
  std::vector<double> x(d);
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) x[j] = b(i, static_cast<Eigen::Index>(j));
    simd::kernel_row(spec.family, spec.sigma2, inv, x,
                     pts, std::span<double>(out.col(i).data(), static_cast<std::size_t>(a.rows())));
  }
  return out;
}

}  // namespace tailrisk
