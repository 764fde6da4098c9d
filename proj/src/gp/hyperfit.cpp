#include "tailrisk/gp/hyperfit.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tailrisk/gp/likelihood.hpp"
#include "tailrisk/util/errors.hpp"

namespace tailrisk {

namespace {

// Parameter vector layout: [log sigma2, log theta_1..d, (log g)].
struct Objective {
  const HyperfitProblem* problem;
  KernelFamily family;
  std::size_t dim;
  std::vector<double> lo, hi;
  int evaluations = 0;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> best_params;
  double best_beta = 0.0;

  bool has_nugget() const { return problem->reps.has_value(); }

  LikelihoodValue evaluate(const std::vector<double>& p) {
    KernelSpec k{family, std::exp(p[0]), std::vector<double>(dim)};
    for (std::size_t j = 0; j < dim; ++j) k.lengthscales[j] = std::exp(p[1 + j]);
    Eigen::VectorXd noise = problem->noise;
    if (has_nugget()) noise += std::exp(p[1 + dim]) * problem->reps->cwiseInverse();
    ++evaluations;
    LikelihoodValue v = log_likelihood(k, problem->x, problem->resid, noise, problem->profile_level,
                                       problem->fixed_beta0);
    if (v.ok && v.loglik > best) {
      best = v.loglik;
      best_params = p;
      best_beta = v.beta0;
    }
    return v;
  }

  // Negative log-likelihood at the box-clamped point plus a quadratic
  // penalty for the distance outside the box.
  double penalized(const gsl_vector* v) {
    std::vector<double> p(lo.size());
    double penalty = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double raw = gsl_vector_get(v, i);
      p[i] = std::clamp(raw, lo[i], hi[i]);
      penalty += (raw - p[i]) * (raw - p[i]);
    }
    const LikelihoodValue val = evaluate(p);
    if (!val.ok) return 1e300;
    return -val.loglik + 1e3 * penalty * (1.0 + std::abs(val.loglik));
  }
};

double gsl_objective(const gsl_vector* v, void* params) {
  return static_cast<Objective*>(params)->penalized(v);
}

bool run_simplex(Objective& obj, const std::vector<double>& start, int max_iterations) {
  const std::size_t n = start.size();
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, std::clamp(start[i], obj.lo[i], obj.hi[i]));
    gsl_vector_set(step, i, 0.7);
  }
  gsl_multimin_function f{&gsl_objective, n, &obj};
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &f, x, step);
  bool converged = false;
  for (int iter = 0; iter < max_iterations; ++iter) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-4) == GSL_SUCCESS) {
      converged = true;
      break;
    }
  }
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return converged;
}

}  // namespace

HyperfitResult fit_hyperparameters(const HyperfitProblem& problem, const KernelSpec& spec_init,
                                   const HyperfitOptions& options) {
  spec_init.validate();
  const Eigen::Index n = problem.resid.size();
  const std::size_t d = spec_init.dim();
  if (n < 2) throw std::invalid_argument("fit_hyperparameters: need at least 2 training scenarios");
  if (problem.x.rows() != n || problem.noise.size() != n || static_cast<std::size_t>(problem.x.cols()) != d) {
    throw std::invalid_argument("fit_hyperparameters: inconsistent problem dimensions");
  }
  Eigen::VectorXd range = problem.x.colwise().maxCoeff() - problem.x.colwise().minCoeff();
  if (range.maxCoeff() <= 0.0) throw std::invalid_argument("fit_hyperparameters: degenerate design");

  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;

  // Reference scale for the variance bounds: spread of the outputs, else the
  // noise level, else 1.
  const double mean = problem.resid.mean();
  double s_ref = (problem.resid.array() - mean).square().sum() / static_cast<double>(n - 1);
  if (!(s_ref > 0.0)) s_ref = problem.noise.mean();
  if (!(s_ref > 0.0)) s_ref = 1.0;

  Objective obj{&problem, spec_init.family, d, {}, {}};
  obj.lo.push_back(std::log(1e-6 * s_ref));
  obj.hi.push_back(std::log(1e4 * s_ref));
  for (std::size_t j = 0; j < d; ++j) {
    obj.lo.push_back(std::log(options.theta_min));
    obj.hi.push_back(std::log(options.theta_max));
  }
  double g_start = 0.0;
  if (problem.reps) {
    const double rbar = problem.reps->mean();
    g_start = problem.nugget_start ? *problem.nugget_start : std::max(0.1 * s_ref * rbar, 1e-12);
    obj.lo.push_back(std::log(1e-8 * s_ref * rbar));
    obj.hi.push_back(std::log(1e4 * s_ref * rbar));
  }

  std::vector<double> init{std::log(spec_init.sigma2)};
  for (double t : spec_init.lengthscales) init.push_back(std::log(t));
  if (problem.reps) init.push_back(std::log(g_start));

  HyperfitResult result;
  result.initial_loglik = obj.evaluate(init).loglik;

  std::vector<std::vector<double>> starts{init};
  const int grid = std::max(options.extra_starts, 0);
  for (int s = 0; s < grid; ++s) {
    std::vector<double> p{std::log(s_ref)};
    for (std::size_t j = 0; j < d; ++j) {
      // Latin-style grid: coordinate j uses a shifted slot so starts differ in every dimension.
      const int slot = static_cast<int>((static_cast<std::size_t>(s) + j) % static_cast<std::size_t>(grid));
      const double u = grid > 1 ? static_cast<double>(slot) / (grid - 1) : 0.5;
      const double frac = options.start_fraction_min *
                          std::pow(options.start_fraction_max / options.start_fraction_min, u);
      const double r = range(static_cast<Eigen::Index>(j)) > 0.0 ? range(static_cast<Eigen::Index>(j)) : 1.0;
      p.push_back(std::log(std::clamp(frac * r, options.theta_min, options.theta_max)));
    }
    if (problem.reps) p.push_back(std::log(g_start));
    starts.push_back(std::move(p));
  }

  bool any_converged = false;
  for (const auto& start : starts) any_converged = run_simplex(obj, start, options.max_iterations) || any_converged;

  if (obj.best_params.empty()) {
    throw NumericalError("fit_hyperparameters: likelihood could not be evaluated at any start");
  }
  result.kernel = KernelSpec{spec_init.family, std::exp(obj.best_params[0]), std::vector<double>(d)};
  for (std::size_t j = 0; j < d; ++j) result.kernel.lengthscales[j] = std::exp(obj.best_params[1 + j]);
  if (problem.reps) result.nugget = std::exp(obj.best_params[1 + d]);
  result.beta0 = obj.best_beta;
  result.loglik = obj.best;
  result.evaluations = obj.evaluations;
  result.warning = !any_converged;
  return result;
}

}  // namespace tailrisk
