#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "tailrisk/gp/kernel.hpp"

namespace tailrisk {

/// Training inputs of a surrogate. Rows of `x` are standardized coordinates;
/// `offset` is the known part of the trend, `noise` the diagonal of Delta.
struct TrainingSet {
  std::vector<std::size_t> ids;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd offset;
  Eigen::VectorXd noise;

  std::size_t size() const noexcept { return ids.size(); }
};

struct Posterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
};

/// Stochastic-kriging surrogate. Immutable: every update returns a new object,
/// so concurrent readers never observe a half-updated factorization.
class GpSurrogate {
 public:
  static constexpr double kJitterStart = 1e-8;
  static constexpr double kJitterMax = 1e-4;

  GpSurrogate() = default;
  static GpSurrogate build(KernelSpec kernel, double beta0, TrainingSet data);

  const KernelSpec& kernel() const noexcept { return kernel_; }
  double beta0() const noexcept { return beta0_; }
  const TrainingSet& data() const noexcept { return data_; }
  std::size_t size() const noexcept { return data_.size(); }
  /// Absolute jitter currently on the diagonal.
  double jitter() const noexcept { return jitter_; }
  /// Lower Cholesky factor of C + Delta + jitter*I.
  const Eigen::MatrixXd& factor() const noexcept { return chol_; }
  /// (C + Delta)^{-1} (y - mu)
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  std::optional<std::size_t> position_of(std::size_t id) const;
  /// True when the most recent update had to fall back to a full factorization.
  bool refactored() const noexcept { return refactored_; }

  Posterior posterior(const Eigen::MatrixXd& xq, const Eigen::VectorXd& offset_q) const;
  Eigen::MatrixXd posterior_covariance(const Eigen::MatrixXd& xq) const;
  Eigen::MatrixXd posterior_covariance(const Eigen::MatrixXd& xa, const Eigen::MatrixXd& xb) const;
  /// L^{-1} c(X, xq): one column per query point.
  Eigen::MatrixXd whitened_cross(const Eigen::MatrixXd& xq) const;
  /// (C + Delta)^{-1} b
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;
  Eigen::VectorXd solve_lower(const Eigen::VectorXd& b) const;

  /// Add a scenario that was not in the training set (grows the factor by a row).
  GpSurrogate with_new_point(std::size_t id, const Eigen::RowVectorXd& x, double y, double offset,
                             double noise) const;
  /// Replace the mean and noise entry of an existing training scenario.
  GpSurrogate with_observation(std::size_t position, double y, double noise) const;

 private:
  void factorize();
  void refresh_alpha();

  KernelSpec kernel_;
  double beta0_ = 0.0;
  TrainingSet data_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
  bool refactored_ = false;
};

/// Cholesky factor of a + jitter*I with the escalation policy above.
/// Returns the jitter used; throws NumericalError when escalation is exhausted.
double jittered_cholesky(const Eigen::MatrixXd& a, double scale, Eigen::MatrixXd& lower);

}  // namespace tailrisk
