#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tailrisk/gp/kernel.hpp"
#include "tailrisk/gp/noise_model.hpp"
#include "tailrisk/risk/risk_measures.hpp"
#include "tailrisk/sim/annuity.hpp"
#include "tailrisk/sim/black_scholes.hpp"

namespace tailrisk {

enum class Method { ST_GP, SE_GP, SV_GP, SR_GP, LB, A3_GP, U2_GP, U1_GP, U1_SA, BR_SA };

const char* method_name(Method m) noexcept;
Method parse_method(std::string_view name);
bool is_sequential(Method m) noexcept;

struct ScenarioConfig {
  std::string simulator = "black_scholes";  // black_scholes | annuity
  std::size_t count = 2000;
  std::uint64_t seed = 1;         // outer scenario draw
  std::uint64_t inner_seed = 1;   // master seed for inner simulations
  std::string file;               // optional delimited scenario file; overrides generation
  BsPortfolioParams black_scholes;
  AnnuityParams annuity;

  bool operator==(const ScenarioConfig&) const = default;
};

struct BudgetConfig {
  std::int64_t total = 2000;
  std::size_t stages = 50;
  double init_fraction = 0.1;   // Delta r_0 / budget
  double pilot_fraction = 0.01; // N_init / N

  bool operator==(const BudgetConfig&) const = default;
};

struct MethodConfig {
  Method method = Method::ST_GP;
  std::size_t lower = 0;       // SR-GP ranks; 0 selects the defaults for the measure
  std::size_t upper = 0;
  double r_smooth = 5.0;       // BR-SA smoothing count
  double mixing_alpha = -1.0;  // tMSE VaR/TVaR blend, negative = measure default

  bool operator==(const MethodConfig&) const = default;
};

struct GpConfig {
  KernelFamily family = KernelFamily::Matern52;
  NoiseKind noise = NoiseKind::SmoothedVariance;
  std::string trend = "constant";  // constant | intrinsic
  std::vector<std::size_t> refit_stages;  // empty = 10, 20, ... up to K

  bool operator==(const GpConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats = {"csv", "json"};

  bool operator==(const OutputConfig&) const = default;
};

struct OracleConfig {
  std::int64_t budget = 0;
  std::size_t stages = 200;
  std::size_t lower = 1;
  std::size_t upper = 200;

  bool operator==(const OracleConfig&) const = default;
};

struct RunConfig {
  ScenarioConfig scenario;
  BudgetConfig budget;
  MethodConfig method;
  RiskSpec risk;
  GpConfig gp;
  OutputConfig output;
  std::optional<OracleConfig> oracle;

  /// Schema-level checks; throws ConfigError with the offending key.
  void validate() const;
  std::vector<std::size_t> refit_schedule() const;

  bool operator==(const RunConfig&) const = default;
};

class Simulator;
std::unique_ptr<Simulator> make_simulator(const ScenarioConfig& cfg);

}  // namespace tailrisk
