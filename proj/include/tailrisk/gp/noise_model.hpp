#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "tailrisk/gp/design_state.hpp"
#include "tailrisk/gp/kernel.hpp"

namespace tailrisk {

enum class NoiseKind { EmpiricalSK, SmoothedVariance };

const char* noise_kind_name(NoiseKind kind) noexcept;
NoiseKind parse_noise_kind(std::string_view name);

struct NoiseModel {
  NoiseKind kind = NoiseKind::SmoothedVariance;
  KernelFamily family = KernelFamily::Matern52;  // secondary GP for SmoothedVariance
  double floor_factor = 1e-8;                    // tau2_min = floor_factor * var(ybar)
  std::size_t min_variance_scenarios = 3;        // below this, estimate a homoskedastic nugget
};

/// Per-scenario noise variance tau^2(z^n) frozen between refits.
struct NoiseSurface {
  enum class Mode { Empirical, Smoothed, Nugget };
  Mode mode = Mode::Empirical;
  double tau2_min = 0.0;
  double pooled = 0.0;          // fallback for scenarios without a sample variance
  double nugget = 0.0;          // Mode::Nugget, set by the hyperparameter fit
  Eigen::VectorXd smoothed;     // Mode::Smoothed, one entry per scenario
  std::optional<KernelSpec> secondary;

  /// Variance of a single replication at scenario n (also defined for r^n = 0).
  double tau2(std::size_t n, const DesignState& design) const;
};

/// `x_std` holds standardized coordinates of every scenario (rows), `subset`
/// the scenarios whose statistics may be used (empty means all).
NoiseSurface fit_noise_surface(const NoiseModel& model, const DesignState& design, const Eigen::MatrixXd& x_std,
                               const std::vector<std::size_t>& subset = {});

/// Bias of log sample variance with nu degrees of freedom under Gaussian noise.
double log_variance_bias(double nu);

}  // namespace tailrisk
