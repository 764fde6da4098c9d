#include "tailrisk/engine/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "tailrisk/util/errors.hpp"

namespace tailrisk {

namespace {
constexpr std::pair<Method, const char*> kMethodNames[] = {
    {Method::ST_GP, "ST-GP"}, {Method::SE_GP, "SE-GP"}, {Method::SV_GP, "SV-GP"}, {Method::SR_GP, "SR-GP"},
    {Method::LB, "LB"},       {Method::A3_GP, "A3-GP"}, {Method::U2_GP, "U2-GP"}, {Method::U1_GP, "U1-GP"},
    {Method::U1_SA, "U1-SA"}, {Method::BR_SA, "BR-SA"},
};
}  // namespace

const char* method_name(Method m) noexcept {
  for (const auto& [k, v] : kMethodNames) {
    if (k == m) return v;
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string norm(name);
  std::replace(norm.begin(), norm.end(), '_', '-');
  std::transform(norm.begin(), norm.end(), norm.begin(), [](unsigned char c) { return std::toupper(c); });
  for (const auto& [k, v] : kMethodNames) {
    if (norm == v) return k;
  }
  throw ConfigError("method.name: unknown method '" + std::string(name) + "'");
}

bool is_sequential(Method m) noexcept {
  return m == Method::ST_GP || m == Method::SE_GP || m == Method::SV_GP || m == Method::SR_GP || m == Method::BR_SA;
}

std::vector<std::size_t> RunConfig::refit_schedule() const {
  if (!gp.refit_stages.empty()) return gp.refit_stages;
  std::vector<std::size_t> out;
  for (std::size_t k = 10; k <= budget.stages; k += 10) out.push_back(k);
  return out;
}

void RunConfig::validate() const {
  if (scenario.simulator != "black_scholes" && scenario.simulator != "annuity") {
    throw ConfigError("scenario.simulator: expected black_scholes or annuity");
  }
  if (scenario.count < 2 && scenario.file.empty()) throw ConfigError("scenario.count: need at least 2 scenarios");
  if (budget.total < 1) throw ConfigError("budget.total: must be positive");
  if (budget.stages < 1) throw ConfigError("budget.stages: must be at least 1");
  if (!(budget.init_fraction > 0.0 && budget.init_fraction < 1.0)) {
    throw ConfigError("budget.init_fraction: must lie in (0,1)");
  }
  if (!(budget.pilot_fraction > 0.0 && budget.pilot_fraction < 1.0)) {
    throw ConfigError("budget.pilot_fraction: must lie in (0,1)");
  }
  if (!(risk.alpha > 0.0 && risk.alpha < 1.0)) throw ConfigError("risk.alpha: must lie in (0,1)");
  // With a scenario file N is only known after loading; load_scenarios repeats the N checks.
  if (scenario.file.empty()) {
    const auto n = scenario.count;
    if (risk.alpha * static_cast<double>(n) < 1.0 - 1e-9) throw ConfigError("risk.alpha: alpha * N must be at least 1");
    if (method.method == Method::SR_GP && method.lower != 0 && method.upper > n) {
      throw ConfigError("method.lower/method.upper: need 1 <= L <= U <= N");
    }
  }
  if (method.method == Method::SR_GP && method.lower != 0 && method.lower > method.upper) {
    throw ConfigError("method.lower/method.upper: need 1 <= L <= U <= N");
  }
  if (method.mixing_alpha > 1.0) throw ConfigError("method.mixing_alpha: must be at most 1");
  if (gp.trend != "constant" && gp.trend != "intrinsic") throw ConfigError("gp.trend: expected constant or intrinsic");
  if (gp.trend == "intrinsic" && scenario.simulator != "black_scholes") {
    throw ConfigError("gp.trend: intrinsic trend is only defined for black_scholes");
  }
  for (std::size_t k : gp.refit_stages) {
    if (k < 1 || k > budget.stages) throw ConfigError("gp.refit_stages: stage outside 1..K");
  }
  if (scenario.simulator == "black_scholes") scenario.black_scholes.validate();
  if (scenario.simulator == "annuity") scenario.annuity.validate();
  if (method.method == Method::LB && scenario.simulator != "black_scholes") {
    throw ConfigError("method.name: LB needs a simulator with an exact value oracle");
  }
  if (oracle) {
    if (oracle->stages < 1) throw ConfigError("oracle.stages: must be at least 1");
    if (oracle->lower < 1 || oracle->lower > oracle->upper) throw ConfigError("oracle.lower/oracle.upper: need 1 <= L <= U");
  }
}

}  // namespace tailrisk

namespace tailrisk {

std::unique_ptr<Simulator> make_simulator(const ScenarioConfig& cfg) {
  if (cfg.simulator == "black_scholes") return std::make_unique<BlackScholesSimulator>(cfg.black_scholes);
  if (cfg.simulator == "annuity") return std::make_unique<AnnuitySimulator>(cfg.annuity);
  throw ConfigError("scenario.simulator: unknown simulator '" + cfg.simulator + "'");
}

}  // namespace tailrisk
