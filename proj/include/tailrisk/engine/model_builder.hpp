#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "tailrisk/gp/design_state.hpp"
#include "tailrisk/gp/hyperfit.hpp"
#include "tailrisk/gp/noise_model.hpp"
#include "tailrisk/gp/surrogate.hpp"

namespace tailrisk {

/// Fixed per-run inputs to every surrogate fit.
struct ModelContext {
  const Eigen::MatrixXd* x = nullptr;  // standardized scenarios (N x d)
  Eigen::VectorXd offset;              // known trend part per scenario
  KernelFamily family = KernelFamily::Matern52;
  NoiseModel noise_model;
  bool fit_level = true;
  HyperfitOptions hyperfit;
};

struct FittedModel {
  GpSurrogate gp;
  NoiseSurface noise;
  HyperfitResult fit;
};

/// Noise surface, maximum-likelihood hyperparameters and surrogate for the
/// scenarios in `train` (all sampled scenarios when empty).
FittedModel fit_model(const ModelContext& ctx, const DesignState& design, std::vector<std::size_t> train = {},
                      const std::optional<KernelSpec>& warm_start = std::nullopt);

/// Surrogate for `train` with given hyperparameters (no likelihood search).
GpSurrogate build_surrogate(const ModelContext& ctx, const DesignState& design, const std::vector<std::size_t>& train,
                            const KernelSpec& kernel, double beta0, const NoiseSurface& noise);

/// Frozen-hyperparameter update after new replications at `changed` scenarios.
GpSurrogate update_surrogate(const ModelContext& ctx, const GpSurrogate& gp, const NoiseSurface& noise,
                             const DesignState& design, const std::vector<std::size_t>& changed);

/// tau^2 for every scenario.
Eigen::VectorXd noise_per_scenario(const NoiseSurface& noise, const DesignState& design);

}  // namespace tailrisk
