#include "tailrisk/gp/trend.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tailrisk {

Eigen::VectorXd trend_offsets(const TrendSpec& trend, const Eigen::MatrixXd& raw_points) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(raw_points.rows());
  if (trend.kind == TrendSpec::Kind::Constant) return out;
  if (!trend.fn) throw std::invalid_argument("trend: user function missing");
  std::vector<double> z(static_cast<std::size_t>(raw_points.cols()));
  for (Eigen::Index i = 0; i < raw_points.rows(); ++i) {
    for (Eigen::Index j = 0; j < raw_points.cols(); ++j) z[static_cast<std::size_t>(j)] = raw_points(i, j);
    out(i) = trend.fn(z);
    if (!std::isfinite(out(i))) throw std::invalid_argument("trend: user function returned non-finite value");
  }
  return out;
}

}  // namespace tailrisk
