#include <algorithm>
#include <cmath>
#include <numeric>

#include "run_state.hpp"
#include "tailrisk/acquisition/screening.hpp"
#include "tailrisk/util/errors.hpp"

namespace tailrisk {

using detail::RunState;
using detail::split_budget;

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

std::vector<std::size_t> lowest(const Eigen::VectorXd& values, std::size_t count) {
  auto order = ascending_order(values);
  order.resize(std::min(count, order.size()));
  return order;
}

Eigen::VectorXd ybar_vector(const DesignState& d) {
  return Eigen::Map<const Eigen::VectorXd>(d.mean.data(), static_cast<Eigen::Index>(d.size()));
}

Eigen::VectorXd tau2_vector(const DesignState& d) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) t(static_cast<Eigen::Index>(i)) = d.tau2_hat(i);
  return t;
}

RiskEstimate estimate_with(const StageView& view, std::vector<std::size_t> support, std::vector<double> weights) {
  RiskEstimate est;
  est.point = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) est.point += weights[i] * view.mean(static_cast<Eigen::Index>(support[i]));
  est.sd = estimator_sd(*view.gp, rows_of(*view.x, support), weights);
  est.quantile_scenario = support.back();
  est.support = std::move(support);
  est.weights = std::move(weights);
  return est;
}

// Perfect-information lower bound. VaR: all replications at the true
// quantile scenario, estimated by its sample average. TVaR: uniform over the
// true tail, estimated from a surrogate fitted on that tail alone.
RunRecord run_lb(const RunInputs& in) {
  if (!in.true_values) throw ConfigError("method.name: LB requires a simulator with an exact oracle");
  RunState st(in);
  const auto& cfg = st.cfg;
  const std::size_t tail = st.tail_count();
  const auto order = ascending_order(*st.truth);
  const std::size_t q = order[tail - 1];
  const std::vector<std::size_t> tail_set(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(tail));
  const std::int64_t total = cfg.budget.total;
  const auto dr0 = std::clamp<std::int64_t>(
      std::llround(cfg.budget.init_fraction * static_cast<double>(total)), 1, total);
  std::vector<std::int64_t> budgets{dr0};
  for (auto b : split_budget(total - dr0, cfg.budget.stages)) budgets.push_back(b);
  const auto schedule = cfg.refit_schedule();
  const bool var = cfg.risk.measure == Measure::VaR;

  RiskEstimate est;
  std::optional<StageView> view;
  for (std::size_t k = 0; k < budgets.size(); ++k) {
    st.start_stage();
    AllocationPlan plan = var ? AllocationPlan{} : allocate_uniform(tail_set, budgets[k]);
    if (var) plan.add(q, budgets[k]);
    plan.budget = budgets[k];
    st.simulate(plan);
    bool refit = false;
    if (var) {
      est = RiskEstimate{};
      est.point = st.design.mean[q];
      const double t = st.design.tau2_hat(q);
      est.sd = std::sqrt(t / static_cast<double>(st.design.reps[q]));
      est.support = {q};
      est.weights = {1.0};
      est.quantile_scenario = q;
    } else {
      refit = k == 0 || std::find(schedule.begin(), schedule.end(), k) != schedule.end() || !st.model;
      if (refit) {
        st.refit(st.design.sampled_indices());
      } else {
        st.update(plan.entries.empty() ? std::vector<std::size_t>{} : [&] {
          std::vector<std::size_t> keys;
          for (const auto& e : plan.entries) keys.push_back(e.first);
          return keys;
        }());
      }
      view = st.view();
      est = estimate_with(*view, tail_set, std::vector<double>(tail, 1.0 / static_cast<double>(tail)));
    }
    est.stage = k;
    st.record(k, budgets[k], est, var ? 1 : tail, refit);
  }
  if (var) {
    st.finish_samples(est);
  } else {
    st.finish_gp(*view, est);
  }
  return std::move(st.rec);
}

// Pilots, a fixed tail screen at r = 10, then one estimator-variance allocation.
RunRecord run_a3(const RunInputs& in) {
  RunState st(in);
  const auto& cfg = st.cfg;
  const std::int64_t total = cfg.budget.total;
  const auto dr0 = std::clamp<std::int64_t>(
      std::llround(cfg.budget.init_fraction * static_cast<double>(total)), 1, total);

  st.start_stage();
  st.run_pilots(dr0);
  st.refit();
  StageView view = st.view();
  RiskEstimate est = estimate_from_view(view, cfg.risk, st.hd);
  st.record(0, dr0, est, 0, true);

  const std::int64_t rest = total - dr0;
  const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.02 * static_cast<double>(st.n))));
  std::int64_t r1 = 10;
  if (r1 * static_cast<std::int64_t>(m) > rest / 2) r1 = std::max<std::int64_t>(rest / 2 / static_cast<std::int64_t>(m), 0);
  const auto screened = lowest(view.mean, m);

  st.start_stage();
  AllocationPlan plan;
  plan.budget = r1 * static_cast<std::int64_t>(m);
  for (std::size_t n : screened) plan.add(n, r1);
  st.simulate(plan);
  st.refit();
  view = st.view();
  est = estimate_from_view(view, cfg.risk, st.hd);
  est.stage = 1;
  st.record(1, plan.budget, est, screened.size(), true);

  st.start_stage();
  const std::int64_t dr2 = total - st.design.total_reps();
  ScreeningOptions opts;
  opts.mixing = cfg.method.mixing_alpha;
  const double eps = std::max(est.sd, 1e-10 * (std::abs(est.point) + 1.0));
  const CandidateSet cands =
      screen_candidates(view, est.point, eps, cfg.risk.measure, est.quantile_scenario, st.tail_count(), opts);
  plan = allocate_sv_gp(view, st.ctx.offset, cands.indices, est.support, est.weights, dr2);
  st.simulate(plan);
  st.refit();
  view = st.view();
  est = estimate_from_view(view, cfg.risk, st.hd);
  est.stage = 2;
  st.record(2, dr2, est, cands.indices.size(), true);
  st.finish_gp(view, est);
  return std::move(st.rec);
}

// Pilots, then the rest spread uniformly over the 2*alpha*N lowest stage-0 means.
RunRecord run_u2(const RunInputs& in) {
  RunState st(in);
  const auto& cfg = st.cfg;
  const std::int64_t total = cfg.budget.total;
  const auto dr0 = std::clamp<std::int64_t>(
      std::llround(cfg.budget.init_fraction * static_cast<double>(total)), 1, total);

  st.start_stage();
  st.run_pilots(dr0);
  st.refit();
  StageView view = st.view();
  RiskEstimate est = estimate_from_view(view, cfg.risk, st.hd);
  st.record(0, dr0, est, 0, true);

  st.start_stage();
  const auto members = lowest(view.mean, std::min(st.n, 2 * st.tail_count()));
  const AllocationPlan plan = allocate_uniform(members, total - dr0);
  st.simulate(plan);
  st.refit();
  view = st.view();
  est = estimate_from_view(view, cfg.risk, st.hd);
  est.stage = 1;
  st.record(1, total - dr0, est, members.size(), true);
  st.finish_gp(view, est);
  return std::move(st.rec);
}

// Uniform allocation over every scenario; with a surrogate fitted to the
// lowest 20% of the sample averages or with the sample averages alone.
RunRecord run_u1(const RunInputs& in, bool with_gp) {
  RunState st(in);
  const auto& cfg = st.cfg;
  st.start_stage();
  st.simulate(allocate_uniform(all_indices(st.n), cfg.budget.total));
  const Eigen::VectorXd ybar = ybar_vector(st.design);
  if (!with_gp) {
    const RiskEstimate est = estimate_from_samples(ybar, tau2_vector(st.design), st.design.reps, cfg.risk, st.hd);
    st.record(0, cfg.budget.total, est, st.n, false);
    st.finish_samples(est);
    return std::move(st.rec);
  }
  const auto count = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(st.n))));
  auto train = lowest(ybar, std::min(count, st.n));
  std::sort(train.begin(), train.end());
  st.refit(train);
  // The surrogate predicts over every scenario, not only the fitted subset.
  const StageView view = st.view();
  const RiskEstimate est = estimate_from_view(view, cfg.risk, st.hd);
  st.record(0, cfg.budget.total, est, train.size(), true);
  st.finish_gp(view, est);
  return std::move(st.rec);
}

}  // namespace

RunRecord run_benchmark(const RunInputs& in) {
  switch (in.config->method.method) {
    case Method::LB:
      return run_lb(in);
    case Method::A3_GP:
      return run_a3(in);
    case Method::U2_GP:
      return run_u2(in);
    case Method::U1_GP:
      return run_u1(in, true);
    case Method::U1_SA:
      return run_u1(in, false);
    default:
      throw ConfigError("method.name: not a benchmark method");
  }
}

}  // namespace tailrisk
