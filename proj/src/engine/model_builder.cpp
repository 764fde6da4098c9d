#include "tailrisk/engine/model_builder.hpp"

#include <algorithm>
#include <stdexcept>

namespace tailrisk {

namespace {

double replication_noise(const NoiseSurface& noise, const DesignState& design, std::size_t n) {
  return noise.tau2(n, design) / static_cast<double>(design.reps[n]);
}

}  // namespace

Eigen::VectorXd noise_per_scenario(const NoiseSurface& noise, const DesignState& design) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(design.size()));
  for (std::size_t n = 0; n < design.size(); ++n) t(static_cast<Eigen::Index>(n)) = noise.tau2(n, design);
  return t;
}

GpSurrogate build_surrogate(const ModelContext& ctx, const DesignState& design, const std::vector<std::size_t>& train,
                            const KernelSpec& kernel, double beta0, const NoiseSurface& noise) {
  TrainingSet ts;
  const auto m = static_cast<Eigen::Index>(train.size());
  ts.ids = train;
  ts.x.resize(m, ctx.x->cols());
  ts.y.resize(m);
  ts.offset.resize(m);
  ts.noise.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::size_t n = train[static_cast<std::size_t>(i)];
    if (!design.sampled(n)) throw std::invalid_argument("build_surrogate: training scenario without replications");
    ts.x.row(i) = ctx.x->row(static_cast<Eigen::Index>(n));
    ts.y(i) = design.mean[n];
    ts.offset(i) = ctx.offset(static_cast<Eigen::Index>(n));
    ts.noise(i) = replication_noise(noise, design, n);
  }
  return GpSurrogate::build(kernel, beta0, std::move(ts));
}

FittedModel fit_model(const ModelContext& ctx, const DesignState& design, std::vector<std::size_t> train,
                      const std::optional<KernelSpec>& warm_start) {
  if (train.empty()) train = design.sampled_indices();
  std::sort(train.begin(), train.end());
  if (train.empty()) throw std::invalid_argument("fit_model: no sampled scenarios");

  FittedModel out;
  out.noise = fit_noise_surface(ctx.noise_model, design, *ctx.x, train);
  const bool nugget = out.noise.mode == NoiseSurface::Mode::Nugget;

  const auto m = static_cast<Eigen::Index>(train.size());
  HyperfitProblem prob;
  prob.x.resize(m, ctx.x->cols());
  prob.resid.resize(m);
  prob.noise.resize(m);
  Eigen::VectorXd reps(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::size_t n = train[static_cast<std::size_t>(i)];
    prob.x.row(i) = ctx.x->row(static_cast<Eigen::Index>(n));
    prob.resid(i) = design.mean[n] - ctx.offset(static_cast<Eigen::Index>(n));
    prob.noise(i) = nugget ? 0.0 : replication_noise(out.noise, design, n);
    reps(i) = static_cast<double>(design.reps[n]);
  }
  if (nugget) prob.reps = reps;
  prob.profile_level = ctx.fit_level;

  KernelSpec init;
  if (warm_start) {
    init = *warm_start;
  } else {
    init.family = ctx.family;
    const double mean = prob.resid.mean();
    const double var = m > 1 ? (prob.resid.array() - mean).square().sum() / static_cast<double>(m - 1) : 0.0;
    init.sigma2 = var > 0.0 ? var : 1.0;
    init.lengthscales.assign(static_cast<std::size_t>(ctx.x->cols()), 1.0);
  }

  double beta0 = ctx.fit_level ? prob.resid.mean() : 0.0;
  out.fit.kernel = init;
  out.fit.beta0 = beta0;
  const Eigen::VectorXd range = m > 0 ? Eigen::VectorXd(prob.x.colwise().maxCoeff() - prob.x.colwise().minCoeff())
                                      : Eigen::VectorXd();
  if (m >= 2 && range.maxCoeff() > 0.0) {
    out.fit = fit_hyperparameters(prob, init, ctx.hyperfit);
  } else if (nugget) {
    out.fit.nugget = out.noise.pooled;
  }
  if (nugget) out.noise.nugget = std::max(out.fit.nugget, out.noise.tau2_min);
  out.gp = build_surrogate(ctx, design, train, out.fit.kernel, out.fit.beta0, out.noise);
  return out;
}

GpSurrogate update_surrogate(const ModelContext& ctx, const GpSurrogate& gp, const NoiseSurface& noise,
                             const DesignState& design, const std::vector<std::size_t>& changed) {
  GpSurrogate out = gp;
  for (std::size_t n : changed) {
    if (!design.sampled(n)) continue;
    const double y = design.mean[n];
    const double nz = replication_noise(noise, design, n);
    if (const auto pos = out.position_of(n)) {
      out = out.with_observation(*pos, y, nz);
    } else {
      const auto row = static_cast<Eigen::Index>(n);
      out = out.with_new_point(n, ctx.x->row(row), y, ctx.offset(row), nz);
    }
  }
  return out;
}

}  // namespace tailrisk
