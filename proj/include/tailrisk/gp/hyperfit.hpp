#pragma once

#include <Eigen/Dense>
#include <optional>

#include "tailrisk/gp/kernel.hpp"

namespace tailrisk {

struct HyperfitOptions {
  int extra_starts = 4;       // grid starts in addition to the initial spec
  int max_iterations = 200;   // per start
  double theta_min = 1e-2;
  double theta_max = 1e2;
  double start_fraction_min = 0.1;
  double start_fraction_max = 2.0;
};

/// Data for a maximum-likelihood fit. With `reps` set, a homoskedastic
/// per-replication noise g is estimated jointly and the noise diagonal
/// becomes noise + g / reps.
struct HyperfitProblem {
  Eigen::MatrixXd x;        // standardized training inputs
  Eigen::VectorXd resid;    // outputs minus known trend offsets
  Eigen::VectorXd noise;    // fixed noise diagonal
  std::optional<Eigen::VectorXd> reps;
  std::optional<double> nugget_start;  // defaults to a tenth of the output spread
  bool profile_level = true;
  double fixed_beta0 = 0.0;
};

struct HyperfitResult {
  KernelSpec kernel;
  double beta0 = 0.0;
  double nugget = 0.0;  // per-replication variance when estimated
  double loglik = 0.0;
  double initial_loglik = 0.0;
  int evaluations = 0;
  bool warning = false;  // no start converged; best point returned
};

HyperfitResult fit_hyperparameters(const HyperfitProblem& problem, const KernelSpec& spec_init,
                                   const HyperfitOptions& options = {});

}  // namespace tailrisk
