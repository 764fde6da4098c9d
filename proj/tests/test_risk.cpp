#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "support/oracles.hpp"
#include "tailrisk/risk/risk_measures.hpp"

using namespace tailrisk;

TEST_CASE("HD weights sum to one") {
  for (auto [n, a] : std::vector<std::pair<std::size_t, double>>{{2, 0.3}, {100, 0.05}, {1000, 0.01}, {10000, 0.005}, {37, 0.9}}) {
    const auto w = hd_weights(n, a);
    CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) < 1e-12);
    CHECK(*std::min_element(w.begin(), w.end()) >= 0.0);
  }
}

TEST_CASE("HD weights are symmetric at the median") {
  const auto w = hd_weights(100, 0.5);
  for (std::size_t i = 0; i < 100; ++i) CHECK(std::abs(w[i] - w[99 - i]) < 1e-14);
}

TEST_CASE("HD weights concentrate around rank alpha*N") {
  const auto w = hd_weights(10000, 0.005);
  const auto arg = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin()) + 1;
  CHECK((arg == 50 || arg == 51));
  double mass = 0.0;
  for (std::size_t r = 26; r <= 75; ++r) mass += w[r - 1];
  CHECK(mass >= 0.95);
}

TEST_CASE("HD weights match an independent incomplete-Beta oracle") {
  for (auto [n, a] : std::vector<std::pair<std::size_t, double>>{{100, 0.05}, {1000, 0.01}, {2000, 0.01}}) {
    const auto w = hd_weights(n, a);
    const auto o = oracle::hd_weights_ibeta(n, a);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(w[i] - o[i]) < 1e-12);
  }
}

TEST_CASE("VaR estimator") {
  SUBCASE("constant means") {
    const Eigen::VectorXd m = Eigen::VectorXd::Constant(50, -3.25);
    CHECK(estimate_var(m, hd_weights(50, 0.1), 0.1).point == doctest::Approx(-3.25).epsilon(1e-14));
  }
  SUBCASE("symmetric values at the median") {
    Eigen::VectorXd m(100);
    for (int i = 0; i < 100; ++i) m(i) = 100 - i;  // order must not matter
    CHECK(estimate_var(m, hd_weights(100, 0.5), 0.5).point == doctest::Approx(50.5).epsilon(1e-12));
  }
  SUBCASE("direct summation oracle") {
    Eigen::VectorXd m(20);
    m << 3.1, -2.0, 0.5, 7.7, -9.1, 4.4, 1.0, -0.3, 2.2, 8.8, -5.5, 6.0, 0.0, -1.1, 3.3, 9.9, -7.2, 5.1, -4.0, 2.9;
    const auto w = oracle::hd_weights_ibeta(20, 0.1);
    std::vector<double> sorted(m.data(), m.data() + 20);
    std::sort(sorted.begin(), sorted.end());
    double expected = 0.0;
    for (int i = 0; i < 20; ++i) expected += w[static_cast<std::size_t>(i)] * sorted[static_cast<std::size_t>(i)];
    CHECK(estimate_var(m, hd_weights(20, 0.1), 0.1).point == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("quantile scenario is the ceil(alpha N)-th smallest") {
    Eigen::VectorXd m(10);
    m << 5, 3, 9, 1, 7, 2, 8, 6, 4, 0;
    const auto est = estimate_var(m, hd_weights(10, 0.25), 0.25);
    CHECK(m(static_cast<Eigen::Index>(est.quantile_scenario)) == 2.0);
    CHECK(std::abs(std::accumulate(est.weights.begin(), est.weights.end(), 0.0) - 1.0) < 1e-12);
  }
}

TEST_CASE("TVaR estimator") {
  Eigen::VectorXd c = Eigen::VectorXd::Constant(8, 1.5);
  CHECK(estimate_tvar(c, 3).point == 1.5);
  Eigen::VectorXd m(4);
  m << -3, -1, 0, 2;
  CHECK(estimate_tvar(m, 2).point == -2.0);

  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd r(1000);
  for (auto& v : r) v = z(rng);
  std::vector<double> s(r.data(), r.data() + 1000);
  std::sort(s.begin(), s.end());
  const double expected = (s[0] + s[1] + s[2] + s[3] + s[4]) / 5.0;
  CHECK(estimate_tvar(r, 5).point == doctest::Approx(expected).epsilon(1e-15));
  CHECK_THROWS(estimate_tvar(r, 0));
}

TEST_CASE("tail count") {
  CHECK(RiskSpec{Measure::VaR, 0.01}.tail_count(2000) == 20);
  CHECK(RiskSpec{Measure::VaR, 0.005}.tail_count(10000) == 50);
  CHECK(RiskSpec{Measure::VaR, 0.013}.tail_count(100) == 2);
  CHECK(RiskSpec{Measure::VaR, 1e-6}.tail_count(100) == 1);
}

TEST_CASE("estimator sd") {
  KernelSpec k{KernelFamily::Matern52, 2.0, {0.7, 1.3}};
  std::mt19937_64 rng(10);
  auto g = oracle::random_instance(rng, 6, 2, 5);
  g.kernel = k;
  auto gp = GpSurrogate::build(g.kernel, 0.0, g.data);
  const Eigen::MatrixXd cov = gp.posterior_covariance(g.xq);

  SUBCASE("indicator weight gives the pointwise sd") {
    Eigen::MatrixXd one = g.xq.topRows(1);
    CHECK(estimator_sd(gp, one, {1.0}) == doctest::Approx(std::sqrt(cov(0, 0))).epsilon(1e-10));
  }
  SUBCASE("uncorrelated pair") {
    Eigen::MatrixXd two(2, 2);
    two << 50.0, 50.0, -50.0, -50.0;
    const double sd = estimator_sd(gp, two, {0.5, 0.5});
    CHECK(sd * sd == doctest::Approx((2.0 + 2.0) / 4.0).epsilon(1e-12));
  }
  SUBCASE("dense quadratic form") {
    std::vector<double> w{0.1, 0.3, 0.2, 0.25, 0.15};
    const auto d = oracle::condition(gp.kernel(), 0.0, g.data, gp.jitter(), g.xq, Eigen::VectorXd::Zero(5));
    const Eigen::Map<Eigen::VectorXd> wv(w.data(), 5);
    CHECK(estimator_sd(gp, g.xq, w) == doctest::Approx(std::sqrt(wv.dot(d.cov * wv))).epsilon(1e-10));
  }
}
