#pragma once

#include <array>
#include <optional>
#include <vector>

#include "tailrisk/sim/simulator.hpp"

namespace tailrisk {

/// Three-factor CIR short rate with stochastic drift and volatility, M7
/// mortality with random-walk period factors, and a deferred life annuity.
/// Scenario coordinates: (beta, alpha, zeta, kappa1, kappa2, kappa3) at the horizon.
struct AnnuityParams {
  // Rate model.
  double beta_bar = 0.04, alpha_bar = 0.04, zeta_bar = 0.02, phi = 0.05;
  double dt = 0.1;
  std::array<double, 3> rate0 = {0.04, 0.04, 0.02};  // (beta, alpha, zeta) today

  // M7 period factors: kappa_{t+1} = kappa_t + drift + chol * N(0, I).
  std::array<double, 3> kappa0 = {-3.9, 0.1, 5e-4};
  std::array<double, 3> kappa_drift = {-0.02, 5e-4, 0.0};
  std::array<double, 9> kappa_cov = {4e-4, 0.0, 0.0,
                                     0.0, 1e-6, 0.0,
                                     0.0, 0.0, 1e-8};  // row-major 3x3
  double cohort = 0.0;  // gamma for the annuitant's cohort
  double age_mean = 72.0;
  double age_var = 102.0;  // mean of (x - age_mean)^2 over the fitted ages
  std::optional<double> constant_q;  // test override for every mortality rate

  // Contract.
  int age = 55;
  int start = 10;
  int max_age = 89;
  double horizon = 1.0;

  void validate() const;  // throws ConfigError
  std::array<double, 9> kappa_chol() const;
  bool operator==(const AnnuityParams&) const = default;
};

double mortality_rate(const AnnuityParams& p, const std::array<double, 3>& kappa, int age);

ScenarioSet annuity_generate_scenarios(const AnnuityParams& p, std::size_t n, std::uint64_t seed);

/// Summed discounted survival-weighted payments (positive; the engine applies the sign).
void annuity_sample_payoff(const AnnuityParams& p, std::span<const double> z, std::uint64_t stream,
                           std::uint64_t first_draw, std::span<double> out);

/// One payoff with its survival path (P at t = 0..x_u - x) for inspection.
double annuity_payoff_path(const AnnuityParams& p, std::span<const double> z, std::uint64_t stream,
                           std::uint64_t draw, std::vector<double>* survival);

class AnnuitySimulator final : public Simulator {
 public:
  explicit AnnuitySimulator(AnnuityParams params);
  const AnnuityParams& params() const noexcept { return params_; }

  std::string name() const override { return "annuity"; }
  std::size_t dim() const override { return 6; }
  ScenarioSet generate_scenarios(std::size_t n, std::uint64_t seed) const override;
  void sample(std::span<const double> z, std::uint64_t stream, std::uint64_t first_draw,
              std::span<double> out) const override;
  double value_sign() const override { return -1.0; }

 private:
  AnnuityParams params_;
};

}  // namespace tailrisk
