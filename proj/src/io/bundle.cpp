#include "tailrisk/io/bundle.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "tailrisk/io/config_io.hpp"
#include "tailrisk/util/errors.hpp"

namespace tailrisk {

using nlohmann::json;

namespace {

std::string provenance(std::uint64_t hash, std::uint64_t seed) {
  return "# config_hash=" + hash_hex(hash) + " seed=" + std::to_string(seed) + "\n";
}

std::string provenance(const RunRecord& rec) { return provenance(rec.config_hash, rec.seed); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

// True ranks (1 = smallest f) of every scenario, ties broken by index.
std::vector<std::size_t> true_ranks(const Eigen::VectorXd& truth) {
  const auto order = ascending_order(truth);
  std::vector<std::size_t> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
  return rank;
}

}  // namespace

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("no column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  return std::stod(rows.at(row).at(column(name)));
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string kv;
      while (ls >> kv) {
        const auto eq = kv.find('=');
        if (eq != std::string::npos) t.meta[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      continue;
    }
    auto fields = split(line, ',');
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != t.header.size()) throw std::runtime_error("csv: row width does not match header");
      t.rows.push_back(std::move(fields));
    }
  }
  if (!have_header) throw std::runtime_error("csv: missing header");
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string trajectory_csv(const RunRecord& rec) {
  std::ostringstream o;
  o << provenance(rec);
  o << "stage,estimate,sd,design_size,candidates,stage_budget,cumulative_budget,quantile_scenario,refit,provisional\n";
  for (const auto& s : rec.stages) {
    o << s.stage << ',' << fmt_double(s.estimate) << ',' << fmt_double(s.sd) << ',' << s.design_size << ','
      << s.candidates << ',' << s.stage_budget << ',' << s.cumulative_budget << ',' << s.quantile_scenario << ','
      << (s.refit ? 1 : 0) << ',' << (s.provisional ? 1 : 0) << '\n';
  }
  return o.str();
}

std::string allocation_csv(const RunRecord& rec, const Eigen::VectorXd* truth) {
  std::ostringstream o;
  o << provenance(rec);
  o << "scenario,reps,init_reps,ybar";
  if (truth) o << ",true_value,true_rank";
  o << '\n';
  std::vector<std::size_t> rank;
  if (truth) rank = true_ranks(*truth);
  for (std::size_t n = 0; n < rec.reps.size(); ++n) {
    const std::int64_t init = n < rec.init_reps.size() ? rec.init_reps[n] : 0;
    const double yb = n < rec.ybar.size() ? rec.ybar[n] : std::nan("");
    o << n << ',' << rec.reps[n] << ',' << init << ',' << fmt_double(yb);
    if (truth) o << ',' << fmt_double((*truth)(static_cast<Eigen::Index>(n))) << ',' << rank[n];
    o << '\n';
  }
  return o.str();
}

std::string posterior_csv(const RunRecord& rec) {
  std::ostringstream o;
  o << provenance(rec);
  o << "scenario,mean,sd\n";
  for (Eigen::Index n = 0; n < rec.post_mean.size(); ++n) {
    const double sd = n < rec.post_sd.size() ? rec.post_sd(n) : std::nan("");
    o << n << ',' << fmt_double(rec.post_mean(n)) << ',' << fmt_double(sd) << '\n';
  }
  return o.str();
}

std::string run_summary_csv(const RunRecord& rec) {
  std::ostringstream o;
  o << provenance(rec);
  o << "method,measure,alpha,estimate,sd,design_size,budget_used,stages,aborted\n";
  o << method_name(rec.method) << ',' << measure_name(rec.measure) << ',' << fmt_double(rec.alpha) << ','
    << fmt_double(rec.final_estimate.point) << ',' << fmt_double(rec.final_estimate.sd) << ','
    << rec.design_size() << ',' << rec.budget_used() << ',' << rec.stages.size() << ',' << (rec.aborted ? 1 : 0)
    << '\n';
  return o.str();
}

std::string record_json(const RunRecord& rec, const RunConfig& config) {
  json j;
  j["config_hash"] = hash_hex(rec.config_hash);
  j["seed"] = rec.seed;
  j["method"] = method_name(rec.method);
  j["measure"] = measure_name(rec.measure);
  j["alpha"] = rec.alpha;
  j["estimate"] = rec.final_estimate.point;
  j["sd"] = rec.final_estimate.sd;
  j["aborted"] = rec.aborted;
  j["abort_reason"] = rec.abort_reason;
  j["budget_used"] = rec.budget_used();
  j["design_size"] = rec.design_size();
  j["noise_mode"] = rec.noise_mode;
  if (rec.kernel) {
    j["kernel"] = {{"family", family_name(rec.kernel->family)},
                   {"sigma2", rec.kernel->sigma2},
                   {"lengthscales", rec.kernel->lengthscales}};
    j["beta0"] = rec.beta0;
    j["nugget"] = rec.nugget;
  }
  json support = json::array();
  for (std::size_t i = 0; i < rec.final_estimate.support.size(); ++i) {
    support.push_back({{"scenario", rec.final_estimate.support[i]}, {"weight", rec.final_estimate.weights[i]}});
  }
  j["support"] = support;
  json stages = json::array();
  for (const auto& s : rec.stages) {
    stages.push_back({{"stage", s.stage},
                      {"estimate", s.estimate},
                      {"sd", s.sd},
                      {"design_size", s.design_size},
                      {"cumulative_budget", s.cumulative_budget},
                      {"refit", s.refit},
                      {"wall_seconds", s.wall_seconds}});
  }
  j["stages"] = stages;
  j["config"] = json::parse(emit_config(config));
  // NaN is not representable in JSON; nlohmann writes it as null.
  return j.dump(2) + "\n";
}

void write_text(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output.directory: cannot write '" + path.string() + "'");
  out << text;
}

void write_run_bundle(const std::string& dir, const RunConfig& config, const RunRecord& rec,
                      const Eigen::VectorXd* truth) {
  const auto& f = config.output.formats;
  const bool csv = std::find(f.begin(), f.end(), "csv") != f.end();
  const bool js = std::find(f.begin(), f.end(), "json") != f.end();
  if (csv) {
    write_text(dir, "trajectory.csv", trajectory_csv(rec));
    write_text(dir, "allocation.csv", allocation_csv(rec, truth));
    write_text(dir, "posterior.csv", posterior_csv(rec));
    write_text(dir, "summary.csv", run_summary_csv(rec));
  }
  if (js) write_text(dir, "record.json", record_json(rec, config));
}

std::string study_summary_csv(const StudySummary& s, std::uint64_t config_hash, std::uint64_t seed) {
  std::ostringstream o;
  o << provenance(config_hash, seed);
  o << "method,measure,reps,reference,SD,s_bar,RMSE,D_K\n";
  o << method_name(s.method) << ',' << measure_name(s.measure) << ',' << s.reps << ',' << fmt_double(s.reference)
    << ',' << fmt_double(s.sd) << ',' << fmt_double(s.mean_reported_sd) << ',' << fmt_double(s.rmse) << ','
    << fmt_double(s.mean_design_size) << '\n';
  return o.str();
}

std::string study_runs_csv(const StudySummary& s, std::uint64_t config_hash, std::uint64_t seed) {
  std::ostringstream o;
  o << provenance(config_hash, seed);
  o << "rep,seed,estimate,sd,design_size,aborted\n";
  for (const auto& r : s.rows) {
    o << r.rep << ',' << r.seed << ',' << fmt_double(r.estimate) << ',' << fmt_double(r.sd) << ','
      << r.design_size << ',' << (r.aborted ? 1 : 0) << '\n';
  }
  return o.str();
}

std::string bias_by_stage_csv(const StudySummary& s, std::uint64_t config_hash, std::uint64_t seed) {
  std::ostringstream o;
  o << provenance(config_hash, seed);
  o << "stage,bias\n";
  for (std::size_t k = 0; k < s.bias_by_stage.size(); ++k) o << k << ',' << fmt_double(s.bias_by_stage[k]) << '\n';
  return o.str();
}

std::string reference_csv(const ReferenceValue& ref, const RunConfig& config, std::uint64_t seed) {
  std::ostringstream o;
  o << provenance(config_hash(config), seed);
  o << "measure,alpha,source,value,order_statistic,hd,sd\n";
  o << measure_name(config.risk.measure) << ',' << fmt_double(config.risk.alpha) << ',' << ref.source << ','
    << fmt_double(ref.value) << ',' << fmt_double(ref.order_statistic) << ',' << fmt_double(ref.hd) << ','
    << fmt_double(ref.sd) << '\n';
  return o.str();
}

}  // namespace tailrisk
