#include "tailrisk/io/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "tailrisk/util/errors.hpp"
#include "tailrisk/util/hash.hpp"

namespace tailrisk {

using nlohmann::json;

namespace {

// Walks one JSON object, handing out typed fields and rejecting anything left over.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  std::string key(const char* k) const { return path_.empty() ? k : path_ + "." + k; }

  template <class T>
  void get(const char* k, T& out, bool required = false) {
    seen_.insert(k);
    if (!j_.contains(k)) {
      if (required) throw ConfigError(key(k) + ": missing required key");
      return;
    }
    try {
      out = j_.at(k).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(key(k) + ": wrong type");
    }
  }

  void get_optional(const char* k, std::optional<double>& out) {
    seen_.insert(k);
    if (!j_.contains(k)) return;
    const json& v = j_.at(k);
    if (v.is_null()) {
      out.reset();
    } else if (v.is_number()) {
      out = v.get<double>();
    } else {
      throw ConfigError(key(k) + ": wrong type");
    }
  }

  template <class T, std::size_t N>
  void get_array(const char* k, T (&out)[N]) {
    std::vector<T> v;
    get(k, v);
    if (!j_.contains(k)) return;
    if (v.size() != N) throw ConfigError(key(k) + ": expected " + std::to_string(N) + " values");
    for (std::size_t i = 0; i < N; ++i) out[i] = v[i];
  }

  template <class T, std::size_t N>
  void get_array(const char* k, std::array<T, N>& out) {
    std::vector<T> v;
    get(k, v);
    if (!j_.contains(k)) return;
    if (v.size() != N) throw ConfigError(key(k) + ": expected " + std::to_string(N) + " values");
    std::copy(v.begin(), v.end(), out.begin());
  }

  Section child(const char* k, bool required = false) {
    seen_.insert(k);
    if (!j_.contains(k)) {
      if (required) throw ConfigError(key(k) + ": missing required section");
      return Section(empty(), key(k));
    }
    return Section(j_.at(k), key(k));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(key(k.c_str()) + ": unknown key");
    }
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class E, class F>
void get_enum(Section& s, const char* k, E& out, F parse, bool required = false) {
  std::string name;
  s.get(k, name, required);
  if (name.empty()) return;
  try {
    out = parse(name);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(s.key(k) + ": " + e.what());
  }
}

void read_bs(Section s, BsPortfolioParams& p) {
  s.get_array("position", p.position);
  s.get_array("spot", p.spot);
  s.get_array("strike", p.strike);
  s.get_array("maturity", p.maturity);
  s.get_array("vol", p.vol);
  s.get("rho", p.rho);
  s.get("rate", p.rate);
  s.get("horizon", p.horizon);
  s.finish();
}

void read_annuity(Section s, AnnuityParams& p) {
  s.get("beta_bar", p.beta_bar);
  s.get("alpha_bar", p.alpha_bar);
  s.get("zeta_bar", p.zeta_bar);
  s.get("phi", p.phi);
  s.get("dt", p.dt);
  s.get_array("rate0", p.rate0);
  s.get_array("kappa0", p.kappa0);
  s.get_array("kappa_drift", p.kappa_drift);
  s.get_array("kappa_cov", p.kappa_cov);
  s.get("cohort", p.cohort);
  s.get("age_mean", p.age_mean);
  s.get("age_var", p.age_var);
  s.get_optional("constant_q", p.constant_q);
  s.get("age", p.age);
  s.get("start", p.start);
  s.get("max_age", p.max_age);
  s.get("horizon", p.horizon);
  s.finish();
}

RunConfig from_json(const json& root) {
  RunConfig c;
  Section top(root, "");

  Section sc = top.child("scenario", true);
  sc.get("simulator", c.scenario.simulator, true);
  sc.get("count", c.scenario.count);
  sc.get("seed", c.scenario.seed);
  sc.get("inner_seed", c.scenario.inner_seed);
  sc.get("file", c.scenario.file);
  read_bs(sc.child("black_scholes"), c.scenario.black_scholes);
  read_annuity(sc.child("annuity"), c.scenario.annuity);
  sc.finish();

  Section b = top.child("budget", true);
  b.get("total", c.budget.total, true);
  b.get("stages", c.budget.stages, true);
  b.get("init_fraction", c.budget.init_fraction);
  b.get("pilot_fraction", c.budget.pilot_fraction);
  b.finish();

  Section m = top.child("method", true);
  get_enum(m, "name", c.method.method, parse_method, true);
  m.get("lower", c.method.lower);
  m.get("upper", c.method.upper);
  m.get("r_smooth", c.method.r_smooth);
  m.get("mixing_alpha", c.method.mixing_alpha);
  m.finish();

  Section r = top.child("risk", true);
  get_enum(r, "measure", c.risk.measure, parse_measure, true);
  r.get("alpha", c.risk.alpha, true);
  r.finish();

  Section g = top.child("gp");
  get_enum(g, "kernel", c.gp.family, parse_family);
  get_enum(g, "noise", c.gp.noise, parse_noise_kind);
  g.get("trend", c.gp.trend);
  g.get("refit_stages", c.gp.refit_stages);
  g.finish();

  Section o = top.child("output");
  o.get("directory", c.output.directory);
  o.get("formats", c.output.formats);
  o.finish();

  if (top.has("oracle")) {
    OracleConfig oc;
    Section q = top.child("oracle");
    q.get("budget", oc.budget);
    q.get("stages", oc.stages);
    q.get("lower", oc.lower);
    q.get("upper", oc.upper);
    q.finish();
    c.oracle = oc;
  }
  top.finish();
  return c;
}

json to_json(const RunConfig& c) {
  const auto& bs = c.scenario.black_scholes;
  const auto& an = c.scenario.annuity;
  auto pair = [](const double (&a)[2]) { return json::array({a[0], a[1]}); };
  json j;
  j["scenario"] = {
      {"simulator", c.scenario.simulator},
      {"count", c.scenario.count},
      {"seed", c.scenario.seed},
      {"inner_seed", c.scenario.inner_seed},
      {"file", c.scenario.file},
      {"black_scholes",
       {{"position", pair(bs.position)},
        {"spot", pair(bs.spot)},
        {"strike", pair(bs.strike)},
        {"maturity", pair(bs.maturity)},
        {"vol", pair(bs.vol)},
        {"rho", bs.rho},
        {"rate", bs.rate},
        {"horizon", bs.horizon}}},
      {"annuity",
       {{"beta_bar", an.beta_bar},
        {"alpha_bar", an.alpha_bar},
        {"zeta_bar", an.zeta_bar},
        {"phi", an.phi},
        {"dt", an.dt},
        {"rate0", an.rate0},
        {"kappa0", an.kappa0},
        {"kappa_drift", an.kappa_drift},
        {"kappa_cov", an.kappa_cov},
        {"cohort", an.cohort},
        {"age_mean", an.age_mean},
        {"age_var", an.age_var},
        {"constant_q", an.constant_q ? json(*an.constant_q) : json(nullptr)},
        {"age", an.age},
        {"start", an.start},
        {"max_age", an.max_age},
        {"horizon", an.horizon}}}};
  j["budget"] = {{"total", c.budget.total},
                 {"stages", c.budget.stages},
                 {"init_fraction", c.budget.init_fraction},
                 {"pilot_fraction", c.budget.pilot_fraction}};
  j["method"] = {{"name", method_name(c.method.method)},
                 {"lower", c.method.lower},
                 {"upper", c.method.upper},
                 {"r_smooth", c.method.r_smooth},
                 {"mixing_alpha", c.method.mixing_alpha}};
  j["risk"] = {{"measure", measure_name(c.risk.measure)}, {"alpha", c.risk.alpha}};
  j["gp"] = {{"kernel", family_name(c.gp.family)},
             {"noise", noise_kind_name(c.gp.noise)},
             {"trend", c.gp.trend},
             {"refit_stages", c.gp.refit_stages}};
  j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
  if (c.oracle) {
    j["oracle"] = {{"budget", c.oracle->budget},
                   {"stages", c.oracle->stages},
                   {"lower", c.oracle->lower},
                   {"upper", c.oracle->upper}};
  }
  return j;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON (") + e.what() + ")");
  }
  RunConfig c = from_json(root);
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

std::uint64_t config_hash(const RunConfig& config) {
  json j = to_json(config);
  j.erase("output");
  return fnv1a64(j.dump());
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScenarioSet read_scenario_file(const std::string& path, const std::string& model) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario.file: cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    for (char& ch : line) {
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    }
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    bool numeric = true;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (row.empty() && numeric) continue;
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw ConfigError("scenario.file: non-numeric value on line " + std::to_string(lineno));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError("scenario.file: inconsistent column count on line " + std::to_string(lineno));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("scenario.file: no scenarios found");
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      pts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return ScenarioSet::from_points(std::move(pts), model, 0);
}

ScenarioSet load_scenarios(const RunConfig& config, const Simulator& sim) {
  if (config.scenario.file.empty()) return sim.generate_scenarios(config.scenario.count, config.scenario.seed);
  ScenarioSet s = read_scenario_file(config.scenario.file, sim.name());
  if (s.dim() != sim.dim()) throw ConfigError("scenario.file: column count does not match the simulator dimension");
  if (config.risk.alpha * static_cast<double>(s.size()) < 1.0 - 1e-9) {
    throw ConfigError("risk.alpha: alpha * N must be at least 1");
  }
  if (config.method.method == Method::SR_GP && config.method.upper > s.size()) {
    throw ConfigError("method.lower/method.upper: need 1 <= L <= U <= N");
  }
  return s;
}

}  // namespace tailrisk
