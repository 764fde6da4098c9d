#include "tailrisk/gp/likelihood.hpp"

#include <cmath>
#include <numbers>

#include "tailrisk/gp/surrogate.hpp"
#include "tailrisk/util/errors.hpp"

namespace tailrisk {

LikelihoodValue log_likelihood(const KernelSpec& kernel, const Eigen::MatrixXd& x, const Eigen::VectorXd& resid,
                               const Eigen::VectorXd& noise, bool profile_level, double fixed_beta0) {
  LikelihoodValue out;
  const Eigen::Index n = resid.size();
  Eigen::MatrixXd a = gram(kernel, x);
  a.diagonal() += noise;
  Eigen::MatrixXd lower;
  try {
    jittered_cholesky(a, kernel.sigma2, lower);
  } catch (const NumericalError&) {
    return out;
  }
  const auto tri = lower.triangularView<Eigen::Lower>();
  double beta = fixed_beta0;
  if (profile_level) {
    const Eigen::VectorXd ones_w = tri.solve(Eigen::VectorXd::Ones(n));
    const Eigen::VectorXd y_w = tri.solve(resid);
    beta = ones_w.dot(y_w) / ones_w.squaredNorm();
  }
  const Eigen::VectorXd e = tri.solve((resid.array() - beta).matrix());
  const double logdet = 2.0 * lower.diagonal().array().log().sum();
  out.loglik = -0.5 * e.squaredNorm() - 0.5 * logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  out.beta0 = beta;
  out.ok = std::isfinite(out.loglik);
  if (!out.ok) out.loglik = -std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace tailrisk
