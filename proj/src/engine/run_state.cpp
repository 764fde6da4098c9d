#include "run_state.hpp"

#include <algorithm>
#include <cmath>

#include "tailrisk/gp/trend.hpp"
#include "tailrisk/sim/pilots.hpp"
#include "tailrisk/sim/rng.hpp"
#include "tailrisk/util/errors.hpp"
#include "tailrisk/util/hash.hpp"
#include "tailrisk/util/parallel.hpp"

namespace tailrisk::detail {

std::vector<std::int64_t> split_budget(std::int64_t total, std::size_t parts) {
  std::vector<std::int64_t> out(parts, 0);
  if (parts == 0) return out;
  const auto each = total / static_cast<std::int64_t>(parts);
  std::fill(out.begin(), out.end(), each);
  out.back() += total - each * static_cast<std::int64_t>(parts);
  return out;
}

RunState::RunState(const RunInputs& in)
    : cfg(*in.config),
      scenarios(*in.scenarios),
      sim(*in.simulator),
      truth(in.true_values),
      seed(in.seed),
      n(in.scenarios->size()),
      design(in.scenarios->size(), in.config->budget.total) {
  if (sim.dim() != scenarios.dim()) {
    throw ConfigError("scenario: simulator dimension does not match the scenario set");
  }
  ctx.x = &scenarios.standard.values;
  ctx.family = cfg.gp.family;
  ctx.noise_model.kind = cfg.gp.noise;
  ctx.noise_model.family = cfg.gp.family;
  if (cfg.gp.trend == "intrinsic") {
    auto fn = sim.intrinsic_trend();
    if (!fn) throw ConfigError("gp.trend: simulator has no intrinsic trend");
    ctx.offset = trend_offsets(TrendSpec::user(std::move(fn)), scenarios.points);
    ctx.fit_level = true;
  } else {
    ctx.offset = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    ctx.fit_level = true;
  }
  hd = hd_weights(n, cfg.risk.alpha);
  rec.method = cfg.method.method;
  rec.measure = cfg.risk.measure;
  rec.alpha = cfg.risk.alpha;
  rec.seed = seed;
}

void RunState::simulate(const AllocationPlan& plan) {
  std::vector<std::pair<std::size_t, std::int64_t>> jobs(plan.entries.begin(), plan.entries.end());
  std::vector<std::vector<double>> outputs(jobs.size());
  const double sign = sim.value_sign();
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto [idx, r] = jobs[j];
    outputs[j].resize(static_cast<std::size_t>(r));
    const auto z = scenarios.point(idx);
    sim.sample(z, scenario_stream(seed, idx), static_cast<std::uint64_t>(design.reps[idx]), outputs[j]);
    for (double& y : outputs[j]) y *= sign;
  });
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    for (double y : outputs[j]) {
      if (!std::isfinite(y)) throw NumericalError("simulator returned a non-finite output at scenario " +
                                                  std::to_string(jobs[j].first));
    }
    add_outputs(design, jobs[j].first, outputs[j]);
  }
  design.remaining -= plan.total();
}

std::vector<std::size_t> RunState::run_pilots(std::int64_t budget) {
  auto n_init = static_cast<std::size_t>(std::llround(cfg.budget.pilot_fraction * static_cast<double>(n)));
  // A floor of 2d+1 keeps the stage-0 fit identifiable on small scenario sets.
  n_init = std::clamp<std::size_t>(n_init, 2 * scenarios.dim() + 1, std::max<std::size_t>(n, 1));
  n_init = std::min(n_init, n);
  n_init = std::min<std::size_t>(n_init, static_cast<std::size_t>(std::max<std::int64_t>(budget, 1)));
  const double d0 = default_pilot_radius(scenarios.dim(), n_init);
  const PilotResult pilots = initialize_pilots(scenarios.standard.values, n_init, d0, hash_combine(seed, 0x9170));
  AllocationPlan plan;
  plan.budget = budget;
  const auto count = static_cast<std::int64_t>(pilots.indices.size());
  const std::int64_t r0 = budget / count;
  const std::int64_t extra = budget - r0 * count;
  for (std::int64_t i = 0; i < count; ++i) {
    plan.add(pilots.indices[static_cast<std::size_t>(i)], r0 + (i < extra ? 1 : 0));
  }
  simulate(plan);
  return pilots.indices;
}

void RunState::refit(const std::vector<std::size_t>& train) {
  std::optional<KernelSpec> warm;
  if (model) warm = model->gp.kernel();
  model = fit_model(ctx, design, train, warm);
}

void RunState::update(const std::vector<std::size_t>& changed) {
  try {
    model->gp = update_surrogate(ctx, model->gp, model->noise, design, changed);
  } catch (const NumericalError&) {
    refit();
  }
}

StageView RunState::view() const {
  return make_stage_view(model->gp, *ctx.x, ctx.offset, noise_per_scenario(model->noise, design), design.reps);
}

void RunState::record(std::size_t stage, std::int64_t stage_budget, const RiskEstimate& est, std::size_t candidates,
                      bool refit) {
  StageRecord s;
  s.stage = stage;
  s.estimate = est.point;
  s.sd = est.sd;
  s.design_size = design.sampled_indices().size();
  s.candidates = candidates;
  s.stage_budget = stage_budget;
  s.cumulative_budget = design.total_reps();
  s.quantile_scenario = est.quantile_scenario;
  s.refit = refit;
  s.provisional = est.provisional;
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - stage_start_).count();
  rec.stages.push_back(s);
  if (stage == 0) rec.init_reps = design.reps;
}

namespace {

const char* noise_mode_name(NoiseSurface::Mode m) {
  switch (m) {
    case NoiseSurface::Mode::Empirical:
      return "empirical";
    case NoiseSurface::Mode::Smoothed:
      return "smoothed";
    case NoiseSurface::Mode::Nugget:
      return "nugget";
  }
  return "unknown";
}

}  // namespace

void RunState::finish_gp(const StageView& v, const RiskEstimate& est) {
  rec.final_estimate = est;
  rec.reps = design.reps;
  rec.ybar = design.mean;
  rec.post_mean = v.mean;
  rec.post_sd = v.var.cwiseMax(0.0).cwiseSqrt();
  rec.kernel = model->gp.kernel();
  rec.beta0 = model->gp.beta0();
  rec.nugget = model->noise.nugget;
  rec.noise_mode = noise_mode_name(model->noise.mode);
}

void RunState::finish_samples(const RiskEstimate& est) {
  rec.final_estimate = est;
  rec.reps = design.reps;
  rec.ybar = design.mean;
  rec.post_mean = Eigen::Map<const Eigen::VectorXd>(design.mean.data(), static_cast<Eigen::Index>(n));
  rec.post_sd.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = design.tau2_hat(i);
    rec.post_sd(static_cast<Eigen::Index>(i)) =
        design.reps[i] > 0 ? std::sqrt(t / static_cast<double>(design.reps[i])) : std::nan("");
  }
  rec.noise_mode = "none";
}

}  // namespace tailrisk::detail
