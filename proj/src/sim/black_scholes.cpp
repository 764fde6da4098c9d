#include "tailrisk/sim/black_scholes.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "tailrisk/sim/rng.hpp"
#include "tailrisk/simd/kernels.hpp"
#include "tailrisk/util/errors.hpp"

namespace tailrisk {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

simd::BsPayoffCoeffs coeffs_for(const BsPortfolioParams& p, double z1, double z2) {
  const double t1 = p.maturity[0] - p.horizon;
  const double t2 = p.maturity[1] - p.horizon;
  simd::BsPayoffCoeffs c;
  c.spot1 = z1;
  c.spot2 = z2;
  c.drift1 = (p.rate - 0.5 * p.vol[0] * p.vol[0]) * t1;
  c.vol1 = p.vol[0] * std::sqrt(t1);
  // Asset 2 shares the Brownian increment over [T, T1] (correlation rho) and
  // carries an independent increment over [T1, T2].
  c.drift2 = (p.rate - 0.5 * p.vol[1] * p.vol[1]) * t2;
  c.vol2a = p.vol[1] * p.rho * std::sqrt(t1);
  c.vol2b = p.vol[1] * std::sqrt(1.0 - p.rho * p.rho) * std::sqrt(t1);
  c.vol2c = p.vol[1] * std::sqrt(t2 - t1);
  c.strike1 = p.strike[0];
  c.strike2 = p.strike[1];
  c.weight1 = p.position[0] * std::exp(-p.rate * t1);
  c.weight2 = p.position[1] * std::exp(-p.rate * t2);
  return c;
}

}  // namespace

void BsPortfolioParams::validate() const {
  for (int i = 0; i < 2; ++i) {
    if (vol[i] < 0.0) throw ConfigError("black_scholes: volatility must be non-negative");
    if (spot[i] <= 0.0) throw ConfigError("black_scholes: spot must be positive");
    if (strike[i] < 0.0) throw ConfigError("black_scholes: strike must be non-negative");
  }
  if (!(std::abs(rho) < 1.0)) throw ConfigError("black_scholes: |rho| must be below 1");
  if (!(horizon > 0.0 && horizon < maturity[0] && maturity[0] <= maturity[1])) {
    throw ConfigError("black_scholes: need 0 < horizon < maturity[0] <= maturity[1]");
  }
}

double bs_call(double spot, double strike, double vol, double tau, double rate) {
  if (strike <= 0.0) return spot;
  const double disc = strike * std::exp(-rate * tau);
  if (vol <= 0.0 || tau <= 0.0) return std::max(spot - disc, 0.0);
  const double sd = vol * std::sqrt(tau);
  const double d1 = (std::log(spot / strike) + (rate + 0.5 * vol * vol) * tau) / sd;
  return spot * normal_cdf(d1) - disc * normal_cdf(d1 - sd);
}

ScenarioSet bs_generate_scenarios(const BsPortfolioParams& p, std::size_t n, std::uint64_t seed) {
  p.validate();
  if (n < 1) throw ConfigError("black_scholes: need at least one scenario");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), 2);
  const double t = p.horizon;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = normal(gen);
    const double b = normal(gen);
    const double w1 = a;
    const double w2 = p.rho * a + std::sqrt(1.0 - p.rho * p.rho) * b;
    const auto r = static_cast<Eigen::Index>(i);
    pts(r, 0) = p.spot[0] * std::exp((p.rate - 0.5 * p.vol[0] * p.vol[0]) * t + p.vol[0] * std::sqrt(t) * w1);
    pts(r, 1) = p.spot[1] * std::exp((p.rate - 0.5 * p.vol[1] * p.vol[1]) * t + p.vol[1] * std::sqrt(t) * w2);
  }
  return ScenarioSet::from_points(std::move(pts), "black_scholes", seed);
}

void bs_sample_payoff(const BsPortfolioParams& p, std::span<const double> z, std::uint64_t stream,
                      std::uint64_t first_draw, std::span<double> out) {
  if (z.size() != 2 || !(z[0] > 0.0) || !(z[1] > 0.0)) throw std::invalid_argument("black_scholes: scenario must be in R^2_+");
  const std::size_t count = out.size();
  std::vector<double> za(count), zb(count), zc(count);
  for (std::size_t i = 0; i < count; ++i) {
    Xoshiro256 rng = draw_rng(stream, first_draw + i);
    za[i] = rng.normal();
    zb[i] = rng.normal();
    zc[i] = rng.normal();
  }
  simd::bs_payoff_batch(coeffs_for(p, z[0], z[1]), za, zb, zc, out);
}

double bs_true_value(const BsPortfolioParams& p, std::span<const double> z) {
  if (z.size() != 2) throw std::invalid_argument("black_scholes: scenario must be 2-D");
  return p.position[0] * bs_call(z[0], p.strike[0], p.vol[0], p.maturity[0] - p.horizon, p.rate) +
         p.position[1] * bs_call(z[1], p.strike[1], p.vol[1], p.maturity[1] - p.horizon, p.rate);
}

double bs_intrinsic_value(const BsPortfolioParams& p, std::span<const double> z) {
  double v = 0.0;
  for (int i = 0; i < 2; ++i) {
    v += p.position[i] * std::exp(-p.rate * (p.maturity[i] - p.horizon)) * std::max(z[static_cast<std::size_t>(i)] - p.strike[i], 0.0);
  }
  return v;
}

BlackScholesSimulator::BlackScholesSimulator(BsPortfolioParams params) : params_(params) { params_.validate(); }

ScenarioSet BlackScholesSimulator::generate_scenarios(std::size_t n, std::uint64_t seed) const {
  return bs_generate_scenarios(params_, n, seed);
}

void BlackScholesSimulator::sample(std::span<const double> z, std::uint64_t stream, std::uint64_t first_draw,
                                   std::span<double> out) const {
  bs_sample_payoff(params_, z, stream, first_draw, out);
}

std::optional<double> BlackScholesSimulator::true_value(std::span<const double> z) const {
  if (z.size() != 2) return std::nullopt;
  return bs_true_value(params_, z);
}

std::function<double(std::span<const double>)> BlackScholesSimulator::intrinsic_trend() const {
  return [p = params_](std::span<const double> z) { return bs_intrinsic_value(p, z); };
}

}  // namespace tailrisk
