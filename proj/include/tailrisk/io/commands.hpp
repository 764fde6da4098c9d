#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tailrisk {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitNumerical = 3 };

struct CommandOptions {
  std::string config_path;
  std::string out_dir;                // overrides output.directory when set
  std::size_t reps = 0;               // study: macro-replication count
  std::vector<std::uint64_t> seeds;   // study: explicit replication seeds
  std::string reference_path;         // study: reference file written by `oracle`
};

int cmd_run(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_study(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_oracle(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_validate(const CommandOptions& opt, std::ostream& out, std::ostream& err);

/// Benchmark values for the Black-Scholes example as printed in the source
/// study; kept for documentation, never used as acceptance targets.
inline constexpr double kPublishedBsQuantile = -4052.02;
inline constexpr double kPublishedBsHd = -4032.21;

}  // namespace tailrisk
