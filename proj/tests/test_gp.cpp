#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "tailrisk/engine/model_builder.hpp"
#include "tailrisk/gp/design_state.hpp"
#include "tailrisk/gp/hyperfit.hpp"
#include "tailrisk/gp/kernel.hpp"
#include "tailrisk/gp/likelihood.hpp"
#include "tailrisk/gp/noise_model.hpp"
#include "tailrisk/gp/surrogate.hpp"
#include "tailrisk/sim/rng.hpp"

using namespace tailrisk;

namespace {

double max_abs(const Eigen::MatrixXd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

TrainingSet one_d(std::vector<double> xs, std::vector<double> ys, double noise) {
  TrainingSet t;
  const auto n = static_cast<Eigen::Index>(xs.size());
  t.x.resize(n, 1);
  t.y.resize(n);
  t.offset = Eigen::VectorXd::Zero(n);
  t.noise = Eigen::VectorXd::Constant(n, noise);
  for (Eigen::Index i = 0; i < n; ++i) {
    t.ids.push_back(static_cast<std::size_t>(i));
    t.x(i, 0) = xs[static_cast<std::size_t>(i)];
    t.y(i) = ys[static_cast<std::size_t>(i)];
  }
  return t;
}

}  // namespace

TEST_CASE("kernel at zero lag is sigma2") {
  for (auto fam : {KernelFamily::Matern52, KernelFamily::Gaussian}) {
    KernelSpec k{fam, 2.5, {0.3, 1.7, 4.0}};
    std::vector<double> z{0.1, -2.0, 3.3};
    CHECK(kernel_eval(k, z, z) == doctest::Approx(2.5).epsilon(1e-15));
  }
}

TEST_CASE("Matern 5/2 at unit lag") {
  KernelSpec k{KernelFamily::Matern52, 1.0, {1.0}};
  std::vector<double> a{0.0}, b{1.0};
  const double s5 = std::sqrt(5.0);
  const double expected = (1.0 + s5 + 5.0 / 3.0) * std::exp(-s5);  // 0.5239941088...
  CHECK(std::abs(kernel_eval(k, a, b) - expected) < 1e-14);
  CHECK(std::abs(kernel_eval(k, a, b) - 0.5239941088318203) < 1e-12);
}

TEST_CASE("Gaussian kernel at unit lag") {
  KernelSpec k{KernelFamily::Gaussian, 1.0, {1.0}};
  std::vector<double> a{0.0}, b{1.0};
  CHECK(std::abs(kernel_eval(k, a, b) - std::exp(-0.5)) < 1e-15);
}

TEST_CASE("cross covariance matches direct evaluation") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = oracle::random_instance(rng, 13, 1 + rep % 6, 7);
    const Eigen::MatrixXd c = cross_covariance(g.kernel, g.data.x, g.xq);
    CHECK(max_abs(c - oracle::cov_direct(g.kernel, g.data.x, g.xq)) < 1e-13);
  }
}

TEST_CASE("noiseless interpolation at a single training point") {
  KernelSpec k{KernelFamily::Matern52, 1.0, {1.0}};
  auto gp = GpSurrogate::build(k, 0.0, one_d({0.5}, {3.0}, 0.0));
  Eigen::MatrixXd q(1, 1);
  q << 0.5;
  const Posterior p = gp.posterior(q, Eigen::VectorXd::Zero(1));
  CHECK(p.mean(0) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(p.var(0) < 1e-7);
}

TEST_CASE("far queries revert to the prior") {
  KernelSpec k{KernelFamily::Gaussian, 2.0, {0.5}};
  auto gp = GpSurrogate::build(k, 1.5, one_d({0.0, 0.3}, {4.0, -1.0}, 0.1));
  Eigen::MatrixXd q(1, 1);
  q << 100.0;
  Eigen::VectorXd off(1);
  off << 0.25;
  const Posterior p = gp.posterior(q, off);
  CHECK(p.mean(0) == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(p.var(0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("two-point posterior against an explicit 2x2 inverse") {
  KernelSpec k{KernelFamily::Matern52, 1.3, {0.8}};
  auto data = one_d({0.0, 0.6}, {1.0, 2.0}, 0.2);
  auto gp = GpSurrogate::build(k, 0.4, data);
  const double j = gp.jitter();
  const double a = 1.3 + 0.2 + j, b = kernel_eval(k, std::vector<double>{0.0}, std::vector<double>{0.6});
  const double det = a * a - b * b;
  Eigen::Matrix2d inv;
  inv << a / det, -b / det, -b / det, a / det;
  Eigen::MatrixXd q(1, 1);
  q << 0.25;
  Eigen::Vector2d kq(kernel_eval(k, std::vector<double>{0.0}, std::vector<double>{0.25}),
                     kernel_eval(k, std::vector<double>{0.6}, std::vector<double>{0.25}));
  const Eigen::Vector2d r(1.0 - 0.4, 2.0 - 0.4);
  const Posterior p = gp.posterior(q, Eigen::VectorXd::Zero(1));
  CHECK(std::abs(p.mean(0) - (0.4 + kq.dot(inv * r))) < 1e-10);
  CHECK(std::abs(p.var(0) - (1.3 - kq.dot(inv * kq))) < 1e-10);
}

TEST_CASE("posterior covariance: diagonal, dense oracle, uncorrelated queries") {
  std::mt19937_64 rng(5);
  auto g = oracle::random_instance(rng, 3, 2, 3);
  auto gp = GpSurrogate::build(g.kernel, g.beta0, g.data);
  const Eigen::MatrixXd c = gp.posterior_covariance(g.xq);
  const Posterior p = gp.posterior(g.xq, g.offset_q);
  CHECK(max_abs(c.diagonal() - p.var) < 1e-12);
  const auto d = oracle::condition(g.kernel, g.beta0, g.data, gp.jitter(), g.xq, g.offset_q);
  CHECK(max_abs(c - d.cov) < 1e-10);
  CHECK(max_abs(p.mean - d.mean) < 1e-10);

  KernelSpec k{KernelFamily::Gaussian, 1.0, {0.1}};
  auto far = GpSurrogate::build(k, 0.0, one_d({0.0}, {1.0}, 0.1));
  Eigen::MatrixXd q(3, 1);
  q << 10.0, 20.0, 30.0;
  const Eigen::MatrixXd cf = far.posterior_covariance(q);
  CHECK(max_abs(cf - Eigen::MatrixXd(cf.diagonal().asDiagonal())) < 1e-300);
}

TEST_CASE("property: posterior matches dense MVN conditioning") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rep % 25, d = 1 + rep % 6;
    auto g = oracle::random_instance(rng, n, d, 8);
    auto gp = GpSurrogate::build(g.kernel, g.beta0, g.data);
    const auto ref = oracle::condition(g.kernel, g.beta0, g.data, gp.jitter(), g.xq, g.offset_q);
    const Posterior p = gp.posterior(g.xq, g.offset_q);
    CHECK(max_abs(p.mean - ref.mean) < 1e-8);
    CHECK(max_abs(p.var - ref.cov.diagonal()) < 1e-8);
    CHECK(max_abs(gp.posterior_covariance(g.xq) - ref.cov) < 1e-8);
    CHECK((p.var.array() >= 0.0).all());
  }
}

TEST_CASE("jitter escalates until the factorization succeeds") {
  KernelSpec k{KernelFamily::Gaussian, 1.0, {1.0}};
  // Two coincident noiseless points: singular without jitter.
  auto gp = GpSurrogate::build(k, 0.0, one_d({0.0, 0.0}, {1.0, 1.0}, 0.0));
  CHECK(gp.jitter() >= 1e-8);
  CHECK(gp.jitter() <= 1e-4);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(0, 0) = -1.0;
  Eigen::MatrixXd l;
  CHECK_THROWS(jittered_cholesky(bad, 1.0, l));
}

TEST_CASE("streaming statistics: worked examples") {
  DesignState d(1, 10);
  d = update_observations(d, 0, std::vector<double>{0.0, 2.0});
  CHECK(d.tau2_hat(0) == doctest::Approx(2.0));
  auto d2 = update_observations(d, 0, std::vector<double>{2.0, 4.0});
  CHECK(d2.mean[0] == doctest::Approx(2.0));
  CHECK(d2.tau2_hat(0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));

  DesignState e(1, 10);
  e = update_observations(e, 0, std::vector<double>{1.0, 1.0});
  e = update_observations(e, 0, std::vector<double>{3.0, 3.0});
  CHECK(e.mean[0] == doctest::Approx(2.0));

  DesignState f(1, 10);
  f = update_observations(f, 0, std::vector<double>{5.5});
  CHECK(f.mean[0] == 5.5);
  CHECK_FALSE(f.has_variance(0));
  CHECK(std::isnan(f.tau2_hat(0)));
}

TEST_CASE("property: streaming statistics equal batch recomputation") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> len(1, 8), parts(1, 5);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double mu = 10.0 * z(rng), sd = std::exp(z(rng));
    DesignState d(1, 1000);
    std::vector<double> all;
    for (int p = parts(rng); p > 0; --p) {
      std::vector<double> batch(static_cast<std::size_t>(len(rng)));
      for (double& v : batch) v = mu + sd * z(rng);
      all.insert(all.end(), batch.begin(), batch.end());
      add_outputs(d, 0, batch);
    }
    const auto [m, v] = oracle::batch_stats(all);
    CHECK(d.reps[0] == static_cast<std::int64_t>(all.size()));
    CHECK(std::abs(d.mean[0] - m) <= 1e-10 * std::max(1.0, std::abs(m)));
    if (all.size() > 1) CHECK(std::abs(d.tau2_hat(0) - v) <= 1e-10 * std::max(1.0, v));
  }
}

TEST_CASE("incremental updates match a full rebuild") {
  std::mt19937_64 rng(9);
  auto g = oracle::random_instance(rng, 10, 3, 6);
  TrainingSet first = g.data;
  first.ids.resize(9);
  first.x.conservativeResize(9, 3);
  first.y.conservativeResize(9);
  first.offset.conservativeResize(9);
  first.noise.conservativeResize(9);
  auto gp = GpSurrogate::build(g.kernel, g.beta0, first);
  auto grown = gp.with_new_point(9, g.data.x.row(9), g.data.y(9), g.data.offset(9), g.data.noise(9));
  auto full = GpSurrogate::build(g.kernel, g.beta0, g.data);
  const Posterior a = grown.posterior(g.xq, g.offset_q), b = full.posterior(g.xq, g.offset_q);
  CHECK(max_abs(a.mean - b.mean) < 1e-8);
  CHECK(max_abs(a.var - b.var) < 1e-8);

  SUBCASE("more replications shrink the variance at that scenario") {
    const double tau2 = 4.0;
    auto data = one_d({0.0, 1.0, 2.0}, {1.0, 2.0, 0.5}, tau2 / 10.0);
    auto s10 = GpSurrogate::build(KernelSpec{KernelFamily::Matern52, 1.0, {1.0}}, 0.0, data);
    auto s20 = s10.with_observation(1, 2.0, tau2 / 20.0);
    Eigen::MatrixXd q(1, 1);
    q << 1.0;
    CHECK(s20.posterior(q, Eigen::VectorXd::Zero(1)).var(0) < s10.posterior(q, Eigen::VectorXd::Zero(1)).var(0));
  }

  SUBCASE("no-op change leaves the posterior bitwise unchanged") {
    auto same = full.with_observation(4, g.data.y(4), g.data.noise(4));
    const Posterior c = same.posterior(g.xq, g.offset_q);
    CHECK((c.mean.array() == b.mean.array()).all());
    CHECK((c.var.array() == b.var.array()).all());
  }
}

TEST_CASE("engine update path equals a refit-free rebuild") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z(0.0, 1.0);
  const std::size_t n = 30;
  Eigen::MatrixXd x(n, 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) << z(rng), z(rng);
  DesignState design(n, 10000);
  auto sample = [&](std::size_t i, int r) {
    std::vector<double> y(static_cast<std::size_t>(r));
    for (double& v : y) v = std::sin(x(static_cast<Eigen::Index>(i), 0)) + 0.3 * z(rng);
    add_outputs(design, i, y);
  };
  for (std::size_t i = 0; i < 8; ++i) sample(i, 5);
  ModelContext ctx;
  ctx.x = &x;
  ctx.offset = Eigen::VectorXd::Zero(n);
  ctx.noise_model.kind = NoiseKind::EmpiricalSK;
  FittedModel fm = fit_model(ctx, design);
  sample(3, 7);   // existing scenario
  sample(12, 4);  // new scenario
  const GpSurrogate upd = update_surrogate(ctx, fm.gp, fm.noise, design, {3, 12});
  std::vector<std::size_t> train = design.sampled_indices();
  const GpSurrogate reb = build_surrogate(ctx, design, train, fm.gp.kernel(), fm.gp.beta0(), fm.noise);
  const Posterior a = upd.posterior(x, ctx.offset), b = reb.posterior(x, ctx.offset);
  CHECK(max_abs(a.mean - b.mean) < 1e-8);
  CHECK(max_abs(a.var - b.var) < 1e-8);
}

TEST_CASE("maximum likelihood recovers a known lengthscale") {
  // Sample f from a 1-D Matern GP (theta = 0.5, sigma2 = 1) at 50 points with
  // 200 replications of unit-variance noise each.
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> z(0.0, 1.0);
  const int n = 50;
  KernelSpec truth{KernelFamily::Matern52, 1.0, {0.5}};
  Eigen::MatrixXd x(n, 1);
  for (int i = 0; i < n; ++i) x(i, 0) = 5.0 * i / (n - 1);
  Eigen::MatrixXd c = oracle::cov_direct(truth, x, x);
  c.diagonal().array() += 1e-10;
  const Eigen::MatrixXd l = c.llt().matrixL();
  Eigen::VectorXd e(n);
  for (int i = 0; i < n; ++i) e(i) = z(rng);
  Eigen::VectorXd f = l * e;
  HyperfitProblem prob;
  prob.x = x;
  prob.noise = Eigen::VectorXd::Constant(n, 1.0 / 200.0);
  prob.resid = f;
  for (int i = 0; i < n; ++i) prob.resid(i) += std::sqrt(1.0 / 200.0) * z(rng);
  const auto res = fit_hyperparameters(prob, KernelSpec{KernelFamily::Matern52, 0.3, {2.0}});
  CHECK(res.kernel.lengthscales[0] >= 0.25);
  CHECK(res.kernel.lengthscales[0] <= 1.0);
  CHECK(res.loglik >= res.initial_loglik);
}

TEST_CASE("constant outputs drive sigma2 to its lower bound") {
  const int n = 20;
  HyperfitProblem prob;
  prob.x.resize(n, 1);
  for (int i = 0; i < n; ++i) prob.x(i, 0) = i;
  prob.resid = Eigen::VectorXd::Constant(n, 7.0);
  prob.noise = Eigen::VectorXd::Constant(n, 0.5);
  const auto res = fit_hyperparameters(prob, KernelSpec{KernelFamily::Matern52, 1.0, {1.0}});
  CHECK(res.kernel.sigma2 <= 1e-4 * 0.5);
  CHECK(res.beta0 == doctest::Approx(7.0).epsilon(1e-6));
}

TEST_CASE("property: the optimizer never lowers the likelihood") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    auto g = oracle::random_instance(rng, 15, 1 + rep % 3, 1);
    HyperfitProblem prob;
    prob.x = g.data.x;
    prob.resid = g.data.y;
    prob.noise = g.data.noise;
    if (rep % 2) prob.reps = Eigen::VectorXd::Constant(15, 3.0);
    const auto res = fit_hyperparameters(prob, g.kernel);
    CHECK(res.loglik >= res.initial_loglik);
    const auto v = log_likelihood(res.kernel, prob.x, prob.resid,
                                  prob.reps ? Eigen::VectorXd(prob.noise.array() + res.nugget / 3.0) : prob.noise, true);
    CHECK(v.ok);
    CHECK(v.loglik == doctest::Approx(res.loglik).epsilon(1e-9));
  }
}

TEST_CASE("log-likelihood against the dense Gaussian density") {
  std::mt19937_64 rng(8);
  auto g = oracle::random_instance(rng, 6, 2, 1);
  const auto v = log_likelihood(g.kernel, g.data.x, g.data.y, g.data.noise, false, 0.7);
  Eigen::MatrixXd a = oracle::cov_direct(g.kernel, g.data.x, g.data.x);
  a.diagonal() += g.data.noise;
  const Eigen::VectorXd r = g.data.y.array() - 0.7;
  const double expected = -0.5 * r.dot(a.inverse() * r) - 0.5 * std::log(a.determinant()) -
                          0.5 * 6.0 * std::log(2.0 * M_PI);
  CHECK(v.ok);
  CHECK(v.loglik == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("log sample-variance bias") {
  // psi(1/2) - log(1/2) = -gamma - log 2
  CHECK(log_variance_bias(1.0) == doctest::Approx(-0.5772156649015329 - std::log(2.0)).epsilon(1e-12));
  // psi(1) - log 1 = -gamma
  CHECK(log_variance_bias(2.0) == doctest::Approx(-0.5772156649015329).epsilon(1e-12));
  CHECK(std::abs(log_variance_bias(1e6)) < 1e-5);
}

TEST_CASE("noise surfaces") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z(0.0, 1.0);
  const std::size_t n = 40;
  Eigen::MatrixXd x(n, 1);
  DesignState d(n, 100000);
  for (std::size_t i = 0; i < n; ++i) {
    x(static_cast<Eigen::Index>(i), 0) = static_cast<double>(i) / 10.0;
    const double sd = 0.5 + x(static_cast<Eigen::Index>(i), 0);
    std::vector<double> y(20);
    for (double& v : y) v = sd * z(rng);
    add_outputs(d, i, y);
  }
  NoiseModel emp{NoiseKind::EmpiricalSK};
  const auto se = fit_noise_surface(emp, d, x);
  CHECK(se.mode == NoiseSurface::Mode::Empirical);
  for (std::size_t i = 0; i < n; ++i) CHECK(se.tau2(i, d) == doctest::Approx(d.tau2_hat(i)));

  NoiseModel sm{NoiseKind::SmoothedVariance};
  const auto ss = fit_noise_surface(sm, d, x);
  CHECK(ss.mode == NoiseSurface::Mode::Smoothed);
  CHECK(ss.tau2(0, d) < ss.tau2(n - 1, d));
  // Smoothing should track the true variance trend better than the raw estimates.
  double err_s = 0.0, err_e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::pow(0.5 + x(static_cast<Eigen::Index>(i), 0), 2);
    err_s += std::pow(std::log(ss.tau2(i, d) / t), 2);
    err_e += std::pow(std::log(d.tau2_hat(i) / t), 2);
  }
  CHECK(err_s < err_e);

  DesignState sparse(n, 100);
  add_outputs(sparse, 0, std::vector<double>{1.0, 2.0});
  add_outputs(sparse, 1, std::vector<double>{1.0});
  CHECK(fit_noise_surface(sm, sparse, x).mode == NoiseSurface::Mode::Nugget);
}
