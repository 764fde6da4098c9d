#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "tailrisk/sim/scenario_set.hpp"

namespace tailrisk {

/// Inner-simulation model Y(z) = f(z) + noise plus outer scenario generation.
/// Inner draw i at a scenario is produced from draw_rng(stream, i), so any
/// split of draws into batches or threads yields the same outputs.
class Simulator {
 public:
  virtual ~Simulator() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual ScenarioSet generate_scenarios(std::size_t n, std::uint64_t seed) const = 0;
  /// Writes out.size() draws with indices first_draw, first_draw + 1, ...
  virtual void sample(std::span<const double> z, std::uint64_t stream, std::uint64_t first_draw,
                      std::span<double> out) const = 0;
  /// Multiplier turning sampled cashflows into portfolio values.
  virtual double value_sign() const { return 1.0; }
  virtual std::optional<double> true_value(std::span<const double>) const { return std::nullopt; }
  virtual bool oracle_capable() const { return false; }
  /// Known trend on raw coordinates, if the model suggests one.
  virtual std::function<double(std::span<const double>)> intrinsic_trend() const { return {}; }
};

}  // namespace tailrisk
