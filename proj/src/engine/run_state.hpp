#pragma once
// Shared machinery of the sequential and benchmark pipelines.

#include <chrono>
#include <optional>
#include <vector>

#include "tailrisk/acquisition/allocation.hpp"
#include "tailrisk/engine/model_builder.hpp"
#include "tailrisk/engine/sequential.hpp"
#include "tailrisk/engine/stage_estimate.hpp"

namespace tailrisk::detail {

class RunState {
 public:
  explicit RunState(const RunInputs& in);

  const RunConfig& cfg;
  const ScenarioSet& scenarios;
  const Simulator& sim;
  const Eigen::VectorXd* truth;
  std::uint64_t seed;
  std::size_t n;
  DesignState design;
  ModelContext ctx;
  std::vector<double> hd;
  RunRecord rec;
  std::optional<FittedModel> model;

  std::size_t tail_count() const { return cfg.risk.tail_count(n); }

  /// Draws the planned replications and merges them into the design.
  void simulate(const AllocationPlan& plan);
  /// Space-filling pilots sharing `budget` replications (floor each, remainder first).
  std::vector<std::size_t> run_pilots(std::int64_t budget);
  /// Full refit on `train` (all sampled scenarios when empty).
  void refit(const std::vector<std::size_t>& train = {});
  /// Frozen-hyperparameter update; falls back to one refit on numerical failure.
  void update(const std::vector<std::size_t>& changed);
  StageView view() const;

  void start_stage() { stage_start_ = std::chrono::steady_clock::now(); }
  void record(std::size_t stage, std::int64_t stage_budget, const RiskEstimate& est, std::size_t candidates,
              bool refit);
  void finish_gp(const StageView& v, const RiskEstimate& est);
  void finish_samples(const RiskEstimate& est);

 private:
  std::chrono::steady_clock::time_point stage_start_;
};

std::vector<std::int64_t> split_budget(std::int64_t total, std::size_t parts);

}  // namespace tailrisk::detail
