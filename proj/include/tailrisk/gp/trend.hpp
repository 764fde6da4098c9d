#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>

namespace tailrisk {

/// Prior mean of the value surface. Constant trends have their level fitted
/// by generalized least squares; a user function is evaluated on raw
/// (unstandardized) scenario coordinates and used as-is.
struct TrendSpec {
  enum class Kind { Constant, UserFunction };
  Kind kind = Kind::Constant;
  double beta0 = 0.0;
  std::function<double(std::span<const double>)> fn;

  static TrendSpec constant(double beta0 = 0.0) { return {Kind::Constant, beta0, {}}; }
  static TrendSpec user(std::function<double(std::span<const double>)> f) {
    return {Kind::UserFunction, 0.0, std::move(f)};
  }
  bool fits_level() const noexcept { return kind == Kind::Constant; }
};

/// Known part of the trend at each row of `raw_points` (zero for Constant).
Eigen::VectorXd trend_offsets(const TrendSpec& trend, const Eigen::MatrixXd& raw_points);

}  // namespace tailrisk
