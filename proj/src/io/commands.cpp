#include "tailrisk/io/commands.hpp"

#include <functional>
#include <set>
#include <iostream>

#include "tailrisk/engine/study.hpp"
#include "tailrisk/io/bundle.hpp"
#include "tailrisk/io/config_io.hpp"
#include "tailrisk/sim/rng.hpp"
#include "tailrisk/util/errors.hpp"
#include "tailrisk/util/hash.hpp"

namespace tailrisk {

namespace {

// Everything a command needs, loaded and validated before any file is written.
struct Prepared {
  RunConfig config;
  std::unique_ptr<Simulator> sim;
  ScenarioSet scenarios;
  std::optional<Eigen::VectorXd> truth;
  std::uint64_t hash = 0;
  std::string out_dir;
};

Prepared prepare(const CommandOptions& opt) {
  Prepared p;
  p.config = load_config(opt.config_path);
  p.sim = make_simulator(p.config.scenario);
  p.scenarios = load_scenarios(p.config, *p.sim);
  p.truth = true_values(*p.sim, p.scenarios);
  p.hash = config_hash(p.config);
  p.out_dir = opt.out_dir.empty() ? p.config.output.directory : opt.out_dir;
  return p;
}

int guarded(const char* name, std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << name << ": config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << name << ": numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << name << ": " << e.what() << '\n';
    return kExitFailure;
  }
}

std::uint64_t oracle_seed(const RunConfig& c) { return hash_combine(c.scenario.inner_seed, 0x0AC1Eull); }

ReferenceValue reference_for(const Prepared& p, const CommandOptions& opt, std::ostream& out) {
  if (!opt.reference_path.empty()) {
    const CsvTable t = read_csv(opt.reference_path);
    ReferenceValue ref;
    ref.value = t.number(0, "value");
    ref.order_statistic = t.number(0, "order_statistic");
    ref.hd = t.number(0, "hd");
    ref.sd = t.number(0, "sd");
    ref.source = t.rows.at(0).at(t.column("source"));
    return ref;
  }
  if (p.truth) return exact_reference(*p.truth, p.config.risk);
  out << "computing simulated reference (no --reference given)\n";
  return simulated_reference(p.config, p.scenarios, *p.sim, oracle_seed(p.config));
}

}  // namespace

int cmd_validate(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded("validate", err, [&] {
    const Prepared p = prepare(opt);
    out << "ok: " << p.config.scenario.simulator << ", N=" << p.scenarios.size() << ", "
        << method_name(p.config.method.method) << ' ' << measure_name(p.config.risk.measure)
        << " alpha=" << fmt_double(p.config.risk.alpha) << ", budget=" << p.config.budget.total
        << ", K=" << p.config.budget.stages << ", config_hash=" << hash_hex(p.hash) << '\n';
    return kExitOk;
  });
}

int cmd_run(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded("run", err, [&] {
    const Prepared p = prepare(opt);
    RunInputs in;
    in.config = &p.config;
    in.scenarios = &p.scenarios;
    in.simulator = p.sim.get();
    in.true_values = p.truth ? &*p.truth : nullptr;
    in.seed = replication_seed(p.config.scenario.inner_seed, 0);
    RunRecord rec = run_method(in);
    rec.config_hash = p.hash;
    write_run_bundle(p.out_dir, p.config, rec, in.true_values);
    if (rec.aborted) {
      err << "run: aborted after " << rec.stages.size() << " stages: " << rec.abort_reason << '\n';
      return kExitNumerical;
    }
    out << method_name(rec.method) << ' ' << measure_name(rec.measure) << " estimate=" << fmt_double(rec.final_estimate.point)
        << " sd=" << fmt_double(rec.final_estimate.sd) << " design=" << rec.design_size() << " -> " << p.out_dir << '\n';
    return kExitOk;
  });
}

int cmd_study(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded("study", err, [&] {
    if (opt.seeds.empty() && opt.reps < 1) throw ConfigError("--reps: need at least one replication");
    if (!opt.seeds.empty() && opt.reps != 0 && opt.reps != opt.seeds.size()) {
      throw ConfigError("--reps: does not match the number of --seeds");
    }
    const Prepared p = prepare(opt);
    const std::vector<std::uint64_t> seeds =
        opt.seeds.empty() ? replication_seeds(p.config.scenario.inner_seed, opt.reps) : opt.seeds;
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
      throw ConfigError("--seeds: replication seeds must be distinct");
    }
    const ReferenceValue ref = reference_for(p, opt, out);
    const Eigen::VectorXd* truth = p.truth ? &*p.truth : nullptr;
    std::size_t done = 0;
    const StudySummary s = macro_replicate(p.config, p.scenarios, *p.sim, truth, ref.value, seeds,
                                           [&](const RunRecord& rec) {
                                             ++done;
                                             out << "rep " << done << '/' << seeds.size()
                                                 << " estimate=" << fmt_double(rec.final_estimate.point) << '\n';
                                           });
    const std::uint64_t master = p.config.scenario.inner_seed;
    write_text(p.out_dir, "study_summary.csv", study_summary_csv(s, p.hash, master));
    write_text(p.out_dir, "study_runs.csv", study_runs_csv(s, p.hash, master));
    write_text(p.out_dir, "bias_by_stage.csv", bias_by_stage_csv(s, p.hash, master));
    write_text(p.out_dir, "reference.csv", reference_csv(ref, p.config, master));
    out << method_name(s.method) << ' ' << measure_name(s.measure) << " reps=" << s.reps
        << " reference=" << fmt_double(s.reference) << " SD=" << fmt_double(s.sd)
        << " s_bar=" << fmt_double(s.mean_reported_sd) << " RMSE=" << fmt_double(s.rmse)
        << " D_K=" << fmt_double(s.mean_design_size) << '\n';
    for (const auto& r : s.rows) {
      if (r.aborted) return kExitNumerical;
    }
    return kExitOk;
  });
}

int cmd_oracle(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded("oracle", err, [&] {
    const Prepared p = prepare(opt);
    const std::uint64_t seed = p.truth ? 0 : oracle_seed(p.config);
    const ReferenceValue ref = p.truth ? exact_reference(*p.truth, p.config.risk)
                                       : simulated_reference(p.config, p.scenarios, *p.sim, seed);
    std::string text = reference_csv(ref, p.config, seed);
    if (p.config.scenario.simulator == "black_scholes") {
      // Published values for the source study's own scenario draw, for comparison only.
      write_text(p.out_dir, "published_reference.csv",
                 "# documentation constants, not targets\nquantity,value\norder_statistic," +
                     fmt_double(kPublishedBsQuantile) + "\nhd," + fmt_double(kPublishedBsHd) + "\n");
    }
    write_text(p.out_dir, "reference.csv", text);
    out << measure_name(p.config.risk.measure) << " reference (" << ref.source << "): value=" << fmt_double(ref.value)
        << " order_statistic=" << fmt_double(ref.order_statistic) << " hd=" << fmt_double(ref.hd)
        << " sd=" << fmt_double(ref.sd) << '\n';
    return kExitOk;
  });
}

}  // namespace tailrisk
