#pragma once

#include "tailrisk/sim/simulator.hpp"

namespace tailrisk {

struct BsPortfolioParams {
  double position[2] = {100.0, -50.0};
  double spot[2] = {50.0, 80.0};
  double strike[2] = {40.0, 85.0};
  double maturity[2] = {2.0, 3.0};
  double vol[2] = {0.25, 0.35};
  double rho = 0.3;
  double rate = 0.04;
  double horizon = 1.0;

  void validate() const;  // throws ConfigError
  bool operator==(const BsPortfolioParams&) const = default;
};

/// Black-Scholes call price with time to maturity tau.
double bs_call(double spot, double strike, double vol, double tau, double rate);

ScenarioSet bs_generate_scenarios(const BsPortfolioParams& p, std::size_t n, std::uint64_t seed);
void bs_sample_payoff(const BsPortfolioParams& p, std::span<const double> z, std::uint64_t stream,
                      std::uint64_t first_draw, std::span<double> out);
double bs_true_value(const BsPortfolioParams& p, std::span<const double> z);
/// Discounted intrinsic value at the horizon.
double bs_intrinsic_value(const BsPortfolioParams& p, std::span<const double> z);

class BlackScholesSimulator final : public Simulator {
 public:
  explicit BlackScholesSimulator(BsPortfolioParams params);
  const BsPortfolioParams& params() const noexcept { return params_; }

  std::string name() const override { return "black_scholes"; }
  std::size_t dim() const override { return 2; }
  ScenarioSet generate_scenarios(std::size_t n, std::uint64_t seed) const override;
  void sample(std::span<const double> z, std::uint64_t stream, std::uint64_t first_draw,
              std::span<double> out) const override;
  std::optional<double> true_value(std::span<const double> z) const override;
  bool oracle_capable() const override { return true; }
  std::function<double(std::span<const double>)> intrinsic_trend() const override;

 private:
  BsPortfolioParams params_;
};

}  // namespace tailrisk
