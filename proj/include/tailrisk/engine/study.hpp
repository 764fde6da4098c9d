#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tailrisk/engine/sequential.hpp"

namespace tailrisk {

struct ReferenceValue {
  double value = 0.0;           // the target R used for bias and RMSE (HD value for VaR)
  double order_statistic = 0.0; // f^(tail) (VaR) or the exact tail average (TVaR)
  double hd = 0.0;              // HD-smoothed value of the exact f
  double sd = 0.0;              // Monte Carlo error of a simulated benchmark, 0 when exact
  std::string source;           // "analytic" or "simulated"
};

/// Exact reference from f over the scenario set.
ReferenceValue exact_reference(const Eigen::VectorXd& truth, const RiskSpec& risk);

/// High-budget SR-GP benchmark run for models without an oracle.
ReferenceValue simulated_reference(const RunConfig& config, const ScenarioSet& scenarios, const Simulator& sim,
                                   std::uint64_t seed);

struct StudyRow {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double sd = 0.0;
  std::size_t design_size = 0;
  bool aborted = false;
  std::vector<double> stage_estimates;
};

struct StudySummary {
  Method method = Method::ST_GP;
  Measure measure = Measure::VaR;
  double reference = 0.0;
  std::size_t reps = 0;
  double mean = 0.0;
  double sd = std::numeric_limits<double>::quiet_NaN();  // undefined for a single replication
  double mean_reported_sd = 0.0;
  double rmse = 0.0;
  double mean_design_size = 0.0;
  std::vector<double> bias_by_stage;
  std::vector<StudyRow> rows;
};

/// Per-replication seeds, checked to be pairwise distinct.
std::vector<std::uint64_t> replication_seeds(std::uint64_t master, std::size_t reps);

/// Independent full runs on the fixed scenario set; `on_run` sees every record.
StudySummary macro_replicate(const RunConfig& config, const ScenarioSet& scenarios, const Simulator& sim,
                             const Eigen::VectorXd* truth, double reference, std::size_t reps,
                             const std::function<void(const RunRecord&)>& on_run = {});

/// Same with explicit per-replication seeds; duplicates raise ConfigError.
StudySummary macro_replicate(const RunConfig& config, const ScenarioSet& scenarios, const Simulator& sim,
                             const Eigen::VectorXd* truth, double reference, const std::vector<std::uint64_t>& seeds,
                             const std::function<void(const RunRecord&)>& on_run = {});

/// Summary columns recomputed from stored rows.
StudySummary summarize(std::vector<StudyRow> rows, double reference, Method method, Measure measure);

}  // namespace tailrisk
