#include "tailrisk/gp/noise_model.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tailrisk/gp/hyperfit.hpp"
#include "tailrisk/gp/surrogate.hpp"

namespace tailrisk {

const char* noise_kind_name(NoiseKind kind) noexcept {
  return kind == NoiseKind::EmpiricalSK ? "empirical" : "smoothed";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "empirical") return NoiseKind::EmpiricalSK;
  if (name == "smoothed") return NoiseKind::SmoothedVariance;
  throw std::invalid_argument("unknown noise model '" + std::string(name) + "'");
}

double log_variance_bias(double nu) {
  return boost::math::digamma(nu / 2.0) - std::log(nu / 2.0);
}

double NoiseSurface::tau2(std::size_t n, const DesignState& design) const {
  switch (mode) {
    case Mode::Nugget:
      return std::max(nugget, tau2_min);
    case Mode::Smoothed:
      return std::max(smoothed(static_cast<Eigen::Index>(n)), tau2_min);
    case Mode::Empirical:
      break;
  }
  const double t = design.has_variance(n) ? design.tau2_hat(n) : pooled;
  return std::max(t, tau2_min);
}

NoiseSurface fit_noise_surface(const NoiseModel& model, const DesignState& design, const Eigen::MatrixXd& x_std,
                               const std::vector<std::size_t>& subset) {
  std::vector<std::size_t> pool = subset.empty() ? design.sampled_indices() : subset;
  std::vector<std::size_t> with_var;
  double ysum = 0.0, ysq = 0.0, tsum = 0.0;
  std::size_t ycount = 0;
  for (std::size_t n : pool) {
    if (!design.sampled(n)) continue;
    ysum += design.mean[n];
    ysq += design.mean[n] * design.mean[n];
    ++ycount;
    if (design.has_variance(n)) {
      with_var.push_back(n);
      tsum += design.tau2_hat(n);
    }
  }

  NoiseSurface out;
  double yvar = 0.0;
  if (ycount >= 2) {
    const double m = ysum / static_cast<double>(ycount);
    yvar = std::max(ysq / static_cast<double>(ycount) - m * m, 0.0) * static_cast<double>(ycount) /
           static_cast<double>(ycount - 1);
  }
  out.tau2_min = model.floor_factor * (yvar > 0.0 ? yvar : 1.0);
  out.pooled = with_var.empty() ? out.tau2_min : tsum / static_cast<double>(with_var.size());

  if (with_var.size() < model.min_variance_scenarios) {
    out.mode = NoiseSurface::Mode::Nugget;
    return out;
  }
  if (model.kind == NoiseKind::EmpiricalSK) {
    out.mode = NoiseSurface::Mode::Empirical;
    return out;
  }

  // Secondary GP on bias-corrected log sample variances.
  const auto m = static_cast<Eigen::Index>(with_var.size());
  HyperfitProblem prob;
  prob.x.resize(m, x_std.cols());
  prob.resid.resize(m);
  prob.noise.resize(m);
  Eigen::VectorXd half_dof(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::size_t n = with_var[static_cast<std::size_t>(i)];
    const double nu = static_cast<double>(design.reps[n] - 1);
    prob.x.row(i) = x_std.row(static_cast<Eigen::Index>(n));
    prob.resid(i) = std::log(std::max(design.tau2_hat(n), out.tau2_min)) - log_variance_bias(nu);
    half_dof(i) = nu / 2.0;
  }
  // Observation noise of the log variances is g * 2/nu; g = 1 under Gaussian
  // outputs and is estimated jointly so heavy-tailed payoffs get more smoothing.
  prob.noise.setZero();
  prob.reps = half_dof;
  prob.nugget_start = 1.0;
  const double rmean = prob.resid.mean();
  double rvar = (prob.resid.array() - rmean).square().sum() / static_cast<double>(std::max<Eigen::Index>(m - 1, 1));
  KernelSpec init{model.family, std::max(rvar, 1e-2), std::vector<double>(static_cast<std::size_t>(x_std.cols()), 1.0)};

  const Eigen::VectorXd range = prob.x.colwise().maxCoeff() - prob.x.colwise().minCoeff();
  TrainingSet ts;
  ts.ids.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) ts.ids[static_cast<std::size_t>(i)] = with_var[static_cast<std::size_t>(i)];
  ts.x = prob.x;
  ts.y = prob.resid;
  ts.offset = Eigen::VectorXd::Zero(m);

  KernelSpec kernel = init;
  double beta0 = rmean;
  double g = 1.0;
  if (range.maxCoeff() > 0.0) {
    HyperfitOptions opts;
    opts.extra_starts = 2;
    const HyperfitResult fit = fit_hyperparameters(prob, init, opts);
    kernel = fit.kernel;
    beta0 = fit.beta0;
    g = fit.nugget;
  }
  ts.noise = g * half_dof.cwiseInverse();
  const GpSurrogate gp = GpSurrogate::build(kernel, beta0, std::move(ts));
  const Posterior post = gp.posterior(x_std, Eigen::VectorXd::Zero(x_std.rows()));
  out.mode = NoiseSurface::Mode::Smoothed;
  out.smoothed = post.mean.array().exp().cwiseMax(out.tau2_min);
  out.secondary = kernel;
  return out;
}

}  // namespace tailrisk
