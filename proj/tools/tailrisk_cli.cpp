#include <CLI11.hpp>
#include <iostream>

#include "tailrisk/io/commands.hpp"
#include "tailrisk/simd/kernels.hpp"
#include "tailrisk/util/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Tail risk estimation with sequential nested simulation"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  std::string simd;
  app.add_option("--threads", threads, "Worker threads (default: TAILRISK_THREADS or all cores)");
  app.add_option("--simd", simd, "Kernel variant (scalar or avx2; default: TAILRISK_SIMD or auto)")
      ->check(CLI::IsMember({"scalar", "avx2"}));

  tailrisk::CommandOptions opt;
  auto* run = app.add_subcommand("run", "Single run; writes the results bundle");
  run->add_option("--config", opt.config_path)->required();
  run->add_option("--out", opt.out_dir, "Output directory (overrides output.directory)");

  auto* study = app.add_subcommand("study", "Macro-replication study");
  study->add_option("--config", opt.config_path)->required();
  study->add_option("--reps", opt.reps, "Number of macro-replications");
  study->add_option("--seeds", opt.seeds, "Explicit replication seeds");
  study->add_option("--reference", opt.reference_path, "Reference file from `oracle`");
  study->add_option("--out", opt.out_dir);

  auto* oracle = app.add_subcommand("oracle", "Reference value: exact, or a high-budget benchmark run");
  oracle->add_option("--config", opt.config_path)->required();
  oracle->add_option("--out", opt.out_dir);

  auto* validate = app.add_subcommand("validate", "Check a config without running anything");
  validate->add_option("--config", opt.config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tailrisk::kExitConfig;
  }

  if (threads > 0) tailrisk::set_thread_count(threads);
  if (!simd.empty()) {
    try {
      tailrisk::simd::set_active_level(simd == "avx2" ? tailrisk::simd::Level::Avx2 : tailrisk::simd::Level::Scalar);
    } catch (const std::exception& e) {
      std::cerr << e.what() << '\n';
      return tailrisk::kExitConfig;
    }
  }

  if (run->parsed()) return tailrisk::cmd_run(opt, std::cout, std::cerr);
  if (study->parsed()) return tailrisk::cmd_study(opt, std::cout, std::cerr);
  if (oracle->parsed()) return tailrisk::cmd_oracle(opt, std::cout, std::cerr);
  return tailrisk::cmd_validate(opt, std::cout, std::cerr);
}
