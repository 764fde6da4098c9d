#include "tailrisk/engine/study.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tailrisk/sim/rng.hpp"
#include "tailrisk/util/errors.hpp"

namespace tailrisk {

ReferenceValue exact_reference(const Eigen::VectorXd& truth, const RiskSpec& risk) {
  const auto n = static_cast<std::size_t>(truth.size());
  const std::size_t tail = risk.tail_count(n);
  const auto order = ascending_order(truth);
  ReferenceValue ref;
  ref.source = "analytic";
  if (risk.measure == Measure::VaR) {
    ref.order_statistic = truth(static_cast<Eigen::Index>(order[tail - 1]));
    ref.hd = estimate_var(truth, hd_weights(n, risk.alpha), risk.alpha).point;
  } else {
    ref.order_statistic = estimate_tvar(truth, tail).point;
    ref.hd = ref.order_statistic;
  }
  // The smoothed VaR estimators converge to the HD value of f, so that is the target.
  ref.value = risk.measure == Measure::VaR ? ref.hd : ref.order_statistic;
  return ref;
}

ReferenceValue simulated_reference(const RunConfig& config, const ScenarioSet& scenarios, const Simulator& sim,
                                   std::uint64_t seed) {
  RunConfig c = config;
  const OracleConfig oc = config.oracle.value_or(OracleConfig{});
  c.method.method = Method::SR_GP;
  c.method.lower = oc.lower;
  c.method.upper = oc.upper;
  c.budget.stages = oc.stages;
  if (oc.budget > 0) c.budget.total = oc.budget;
  c.validate();
  RunInputs in;
  in.config = &c;
  in.scenarios = &scenarios;
  in.simulator = &sim;
  in.seed = seed;
  const RunRecord rec = run_sequential(in);
  if (rec.aborted) throw NumericalError("benchmark run aborted: " + rec.abort_reason);
  ReferenceValue ref;
  ref.source = "simulated";
  ref.value = rec.final_estimate.point;
  ref.hd = ref.value;
  ref.order_statistic = ref.value;
  ref.sd = rec.final_estimate.sd;
  return ref;
}

std::vector<std::uint64_t> replication_seeds(std::uint64_t master, std::size_t reps) {
  std::vector<std::uint64_t> seeds;
  std::set<std::uint64_t> seen;
  for (std::size_t r = 0; r < reps; ++r) {
    const std::uint64_t s = replication_seed(master, r);
    if (!seen.insert(s).second) throw ConfigError("scenario.inner_seed: replication seeds collide");
    seeds.push_back(s);
  }
  return seeds;
}

StudySummary summarize(std::vector<StudyRow> rows, double reference, Method method, Measure measure) {
  StudySummary s;
  s.method = method;
  s.measure = measure;
  s.reference = reference;
  s.reps = rows.size();
  if (rows.empty()) return s;
  const double m = static_cast<double>(rows.size());
  double sum = 0.0, sq_err = 0.0, rep_sd = 0.0, design = 0.0;
  for (const auto& r : rows) {
    sum += r.estimate;
    sq_err += (r.estimate - reference) * (r.estimate - reference);
    rep_sd += r.sd;
    design += static_cast<double>(r.design_size);
  }
  s.mean = sum / m;
  s.rmse = std::sqrt(sq_err / m);
  s.mean_reported_sd = rep_sd / m;
  s.mean_design_size = design / m;
  if (rows.size() > 1) {
    double ss = 0.0;
    for (const auto& r : rows) ss += (r.estimate - s.mean) * (r.estimate - s.mean);
    s.sd = std::sqrt(ss / (m - 1.0));
  }
  std::size_t stages = rows.front().stage_estimates.size();
  for (const auto& r : rows) stages = std::min(stages, r.stage_estimates.size());
  s.bias_by_stage.assign(stages, 0.0);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < stages; ++k) s.bias_by_stage[k] += (r.stage_estimates[k] - reference) / m;
  }
  s.rows = std::move(rows);
  return s;
}

StudySummary macro_replicate(const RunConfig& config, const ScenarioSet& scenarios, const Simulator& sim,
                             const Eigen::VectorXd* truth, double reference, std::size_t reps,
                             const std::function<void(const RunRecord&)>& on_run) {
  return macro_replicate(config, scenarios, sim, truth, reference, replication_seeds(config.scenario.inner_seed, reps),
                         on_run);
}

StudySummary macro_replicate(const RunConfig& config, const ScenarioSet& scenarios, const Simulator& sim,
                             const Eigen::VectorXd* truth, double reference, const std::vector<std::uint64_t>& seeds,
                             const std::function<void(const RunRecord&)>& on_run) {
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds: replication seeds must be distinct");
  }
  std::vector<StudyRow> rows;
  for (std::size_t r = 0; r < seeds.size(); ++r) {
    RunInputs in;
    in.config = &config;
    in.scenarios = &scenarios;
    in.simulator = &sim;
    in.true_values = truth;
    in.seed = seeds[r];
    const RunRecord rec = run_method(in);
    StudyRow row;
    row.rep = r;
    row.seed = seeds[r];
    row.estimate = rec.final_estimate.point;
    row.sd = rec.final_estimate.sd;
    row.design_size = rec.design_size();
    row.aborted = rec.aborted;
    for (const auto& st : rec.stages) row.stage_estimates.push_back(st.estimate);
    rows.push_back(std::move(row));
    if (on_run) on_run(rec);
  }
  return summarize(std::move(rows), reference, config.method.method, config.risk.measure);
}

}  // namespace tailrisk
