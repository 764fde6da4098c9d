#include "tailrisk/sim/scenario_set.hpp"

#include <cmath>
#include <stdexcept>

namespace tailrisk {

Standardization standardize(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  if (n < 1) throw std::invalid_argument("standardize: empty point set");
  Standardization out;
  out.mean = points.colwise().mean().transpose();
  out.sd = Eigen::VectorXd::Zero(d);
  out.constant.assign(static_cast<std::size_t>(d), true);
  out.values = Eigen::MatrixXd::Zero(n, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (n < 2) continue;
    const double ss = (points.col(j).array() - out.mean(j)).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    out.sd(j) = sd;
    if (sd > 0.0 && std::isfinite(sd)) {
      out.constant[static_cast<std::size_t>(j)] = false;
      out.values.col(j) = (points.col(j).array() - out.mean(j)) / sd;
    }
  }
  return out;
}

Eigen::VectorXd Standardization::apply(std::span<const double> raw) const {
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index j = 0; j < mean.size(); ++j) {
    z(j) = constant[static_cast<std::size_t>(j)] ? 0.0 : (raw[static_cast<std::size_t>(j)] - mean(j)) / sd(j);
  }
  return z;
}

ScenarioSet ScenarioSet::from_points(Eigen::MatrixXd points, std::string model, std::uint64_t seed) {
  ScenarioSet s;
  s.standard = standardize(points);
  s.points = std::move(points);
  s.model = std::move(model);
  s.seed = seed;
  return s;
}

std::vector<double> ScenarioSet::point(std::size_t n) const {
  std::vector<double> z(dim());
  for (std::size_t j = 0; j < dim(); ++j) z[j] = points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j));
  return z;
}

}  // namespace tailrisk
