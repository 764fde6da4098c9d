#include "tailrisk/engine/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "run_state.hpp"
#include "tailrisk/acquisition/screening.hpp"
#include "tailrisk/util/errors.hpp"

namespace tailrisk {

using detail::RunState;
using detail::split_budget;

std::int64_t RunRecord::budget_used() const {
  return std::accumulate(reps.begin(), reps.end(), std::int64_t{0});
}

std::size_t RunRecord::design_size() const {
  return static_cast<std::size_t>(std::count_if(reps.begin(), reps.end(), [](std::int64_t r) { return r > 0; }));
}

std::optional<Eigen::VectorXd> true_values(const Simulator& sim, const ScenarioSet& scenarios) {
  if (!sim.oracle_capable()) return std::nullopt;
  Eigen::VectorXd f(static_cast<Eigen::Index>(scenarios.size()));
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto v = sim.true_value(scenarios.point(i));
    if (!v) return std::nullopt;
    f(static_cast<Eigen::Index>(i)) = *v;
  }
  return f;
}

namespace {

double smoothing_eps(const RiskEstimate& est) {
  const double floor = 1e-10 * (std::abs(est.point) + 1.0);
  return std::isfinite(est.sd) ? std::max(est.sd, floor) : floor;
}

bool in_schedule(const std::vector<std::size_t>& schedule, std::size_t k) {
  return std::find(schedule.begin(), schedule.end(), k) != schedule.end();
}

std::pair<std::size_t, std::size_t> sr_ranks(const RunConfig& cfg, std::size_t tail) {
  std::size_t lower = cfg.method.lower;
  std::size_t upper = cfg.method.upper;
  if (lower == 0) lower = cfg.risk.measure == Measure::VaR ? tail : 1;
  if (upper == 0) upper = tail;
  return {lower, upper};
}

AllocationPlan plan_stage(RunState& st, const StageView& view, const RiskEstimate& est, std::int64_t dr,
                          std::size_t& n_candidates) {
  const auto& cfg = st.cfg;
  const Method method = cfg.method.method;
  const Measure measure = cfg.risk.measure;
  const std::size_t tail = st.tail_count();
  AllocationPlan plan;
  plan.budget = dr;
  if (dr <= 0) return plan;

  if (method == Method::SR_GP) {
    const auto [lower, upper] = sr_ranks(cfg, tail);
    plan = allocate_sr_gp(view.mean, lower, upper, dr);
    n_candidates = plan.entries.size();
    return plan;
  }

  const double eps = smoothing_eps(est);
  ScreeningOptions opts;
  opts.mixing = cfg.method.mixing_alpha;
  const CandidateSet cands = screen_candidates(view, est.point, eps, measure, est.quantile_scenario, tail, opts);
  n_candidates = cands.indices.size();

  switch (method) {
    case Method::ST_GP: {
      const auto scores =
          score_st_gp(view, cands.indices, cands.indices, est.point, eps, dr, measure, cfg.method.mixing_alpha);
      plan.add(select_argmin(scores, cands.indices), dr);
      break;
    }
    case Method::SE_GP: {
      const auto scores = score_se_gp(view, cands.indices, cands.indices, est.point, dr, measure);
      plan.add(select_argmin(scores, cands.indices), dr);
      break;
    }
    case Method::SV_GP:
      plan = allocate_sv_gp(view, st.ctx.offset, cands.indices, est.support, est.weights, dr);
      break;
    default:
      throw ConfigError("method.name: not a sequential GP method");
  }
  return plan;
}

std::vector<std::size_t> keys_of(const AllocationPlan& plan) {
  std::vector<std::size_t> out;
  for (const auto& [n, r] : plan.entries) out.push_back(n);
  return out;
}

RunRecord run_gp_sequential(const RunInputs& in) {
  RunState st(in);
  const auto& cfg = st.cfg;
  const std::int64_t total = cfg.budget.total;
  const std::size_t stages = cfg.budget.stages;
  const auto dr0 = std::clamp<std::int64_t>(
      std::llround(cfg.budget.init_fraction * static_cast<double>(total)), 1, total);
  const auto budgets = split_budget(total - dr0, stages);
  const auto schedule = cfg.refit_schedule();

  st.start_stage();
  st.run_pilots(dr0);
  st.refit();
  StageView view = st.view();
  RiskEstimate est = estimate_from_view(view, cfg.risk, st.hd);
  st.record(0, dr0, est, 0, true);

  for (std::size_t k = 1; k <= stages; ++k) {
    st.start_stage();
    const std::int64_t dr = budgets[k - 1];
    try {
      std::size_t n_candidates = 0;
      const AllocationPlan plan = plan_stage(st, view, est, dr, n_candidates);
      if (plan.total() != dr) throw NumericalError("allocation does not conserve the stage budget");
      st.simulate(plan);
      const bool refit = in_schedule(schedule, k);
      if (refit) {
        st.refit();
      } else {
        st.update(keys_of(plan));
      }
      view = st.view();
      est = estimate_from_view(view, cfg.risk, st.hd);
      est.stage = k;
      st.record(k, dr, est, n_candidates, refit);
    } catch (const NumericalError& e) {
      st.rec.aborted = true;
      st.rec.abort_reason = "stage " + std::to_string(k) + ": " + e.what();
      break;
    }
  }
  st.finish_gp(view, est);
  return std::move(st.rec);
}

// Sample-average sequential rule: every stage sends its whole batch to the
// sampled scenario whose mean is closest to the current quantile estimate in
// standard-error units.
RunRecord run_br_sa(const RunInputs& in) {
  RunState st(in);
  const auto& cfg = st.cfg;
  const std::int64_t total = cfg.budget.total;
  const std::size_t stages = cfg.budget.stages;
  // Two replications everywhere before the adaptive phase; with no more
  // budget than that the method is plain uniform nested simulation.
  const std::int64_t dr0 = std::min<std::int64_t>(2 * static_cast<std::int64_t>(st.n), total);
  const auto budgets = split_budget(total - dr0, stages);

  auto sample_estimate = [&]() {
    Eigen::VectorXd ybar = Eigen::Map<const Eigen::VectorXd>(st.design.mean.data(), static_cast<Eigen::Index>(st.n));
    Eigen::VectorXd tau2(static_cast<Eigen::Index>(st.n));
    for (std::size_t i = 0; i < st.n; ++i) tau2(static_cast<Eigen::Index>(i)) = st.design.tau2_hat(i);
    return estimate_from_samples(ybar, tau2, st.design.reps, cfg.risk, st.hd);
  };

  st.start_stage();
  std::vector<std::size_t> all(st.n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  st.simulate(allocate_uniform(all, dr0));
  RiskEstimate est = sample_estimate();
  st.record(0, dr0, est, st.n, false);

  const RiskSpec var_spec{Measure::VaR, cfg.risk.alpha};
  for (std::size_t k = 1; k <= stages; ++k) {
    st.start_stage();
    const std::int64_t dr = budgets[k - 1];
    AllocationPlan plan;
    plan.budget = dr;
    if (dr > 0) {
      Eigen::VectorXd ybar =
          Eigen::Map<const Eigen::VectorXd>(st.design.mean.data(), static_cast<Eigen::Index>(st.n));
      const double level = estimate_risk(ybar, var_spec, st.hd).point;
      const auto scores = score_br_sa(st.design, level, cfg.method.r_smooth);
      plan.add(select_argmin(scores, all), dr);
    }
    st.simulate(plan);
    est = sample_estimate();
    est.stage = k;
    st.record(k, dr, est, st.n, false);
  }
  st.finish_samples(est);
  return std::move(st.rec);
}

}  // namespace

RunRecord run_sequential(const RunInputs& in) {
  switch (in.config->method.method) {
    case Method::ST_GP:
    case Method::SE_GP:
    case Method::SV_GP:
    case Method::SR_GP:
      return run_gp_sequential(in);
    case Method::BR_SA:
      return run_br_sa(in);
    default:
      throw ConfigError("method.name: not a sequential method");
  }
}

RunRecord run_method(const RunInputs& in) {
  if (!in.config || !in.scenarios || !in.simulator) throw std::invalid_argument("run_method: missing inputs");
  return is_sequential(in.config->method.method) ? run_sequential(in) : run_benchmark(in);
}

}  // namespace tailrisk
