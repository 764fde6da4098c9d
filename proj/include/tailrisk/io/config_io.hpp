#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "tailrisk/engine/run_config.hpp"
#include "tailrisk/sim/scenario_set.hpp"
#include "tailrisk/sim/simulator.hpp"

namespace tailrisk {

/// Parses and validates a JSON experiment config. Unknown keys, missing
/// required keys and type mismatches raise ConfigError naming the key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Canonical JSON form with every field spelled out.
std::string emit_config(const RunConfig& config);

/// Fingerprint of the canonical form (output settings excluded).
std::uint64_t config_hash(const RunConfig& config);
std::string hash_hex(std::uint64_t h);

/// Scenario file: one scenario per row, columns separated by commas,
/// semicolons or whitespace; lines starting with '#' and a non-numeric first
/// row are skipped.
ScenarioSet read_scenario_file(const std::string& path, const std::string& model);

/// The configured scenario set: from the file when given, else generated.
ScenarioSet load_scenarios(const RunConfig& config, const Simulator& sim);

}  // namespace tailrisk
