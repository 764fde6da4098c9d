#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tailrisk/engine/run_config.hpp"
#include "tailrisk/risk/risk_measures.hpp"
#include "tailrisk/sim/scenario_set.hpp"
#include "tailrisk/sim/simulator.hpp"

namespace tailrisk {

struct StageRecord {
  std::size_t stage = 0;
  double estimate = 0.0;
  double sd = 0.0;
  std::size_t design_size = 0;
  std::size_t candidates = 0;
  std::int64_t stage_budget = 0;
  std::int64_t cumulative_budget = 0;
  std::size_t quantile_scenario = 0;
  bool refit = false;
  bool provisional = false;
  double wall_seconds = 0.0;  // not part of the deterministic trajectory
};

struct RunRecord {
  Method method = Method::ST_GP;
  Measure measure = Measure::VaR;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<StageRecord> stages;
  std::vector<std::int64_t> reps;       // final r^n
  std::vector<std::int64_t> init_reps;  // r^n after stage 0
  std::vector<double> ybar;
  Eigen::VectorXd post_mean;
  Eigen::VectorXd post_sd;
  std::optional<KernelSpec> kernel;
  double beta0 = 0.0;
  double nugget = 0.0;
  std::string noise_mode;
  RiskEstimate final_estimate;
  bool aborted = false;
  std::string abort_reason;

  std::int64_t budget_used() const;
  std::size_t design_size() const;
};

struct RunInputs {
  const RunConfig* config = nullptr;
  const ScenarioSet* scenarios = nullptr;
  const Simulator* simulator = nullptr;
  const Eigen::VectorXd* true_values = nullptr;  // exact f over the scenarios, when known
  std::uint64_t seed = 0;                        // inner-simulation seed of this run
};

/// Dispatches on the configured method.
RunRecord run_method(const RunInputs& in);

/// ST-GP, SE-GP, SV-GP, SR-GP and BR-SA.
RunRecord run_sequential(const RunInputs& in);

/// LB, A3-GP, U2-GP, U1-GP and U1-SA.
RunRecord run_benchmark(const RunInputs& in);

/// Exact values over the scenario set from the simulator oracle.
std::optional<Eigen::VectorXd> true_values(const Simulator& sim, const ScenarioSet& scenarios);

}  // namespace tailrisk
