#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tailrisk {

/// Coordinate-wise z-scores of a point cloud. Coordinates whose sample
/// standard deviation is zero (or undefined for a single point) are flagged
/// constant and map to 0.
struct Standardization {
  Eigen::MatrixXd values;  // N x d, column-major so each coordinate is contiguous
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  std::vector<bool> constant;

  Eigen::VectorXd apply(std::span<const double> raw) const;
};

Standardization standardize(const Eigen::MatrixXd& points);

/// The fixed outer scenarios z^1..z^N plus their standardization.
struct ScenarioSet {
  Eigen::MatrixXd points;  // N x d raw coordinates
  Standardization standard;
  std::string model;
  std::uint64_t seed = 0;

  static ScenarioSet from_points(Eigen::MatrixXd points, std::string model, std::uint64_t seed);

  std::size_t size() const noexcept { return static_cast<std::size_t>(points.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points.cols()); }
  std::vector<double> point(std::size_t n) const;
};

}  // namespace tailrisk
