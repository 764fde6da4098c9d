// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>

#include "support/oracles.hpp"
#include "tailrisk/acquisition/allocation.hpp"
#include "tailrisk/acquisition/lookahead.hpp"
#include "tailrisk/engine/model_builder.hpp"
#include "tailrisk/engine/run_config.hpp"
#include "tailrisk/engine/sequential.hpp"
#include "tailrisk/engine/study.hpp"
#include "tailrisk/gp/design_state.hpp"
#include "tailrisk/gp/surrogate.hpp"
#include "tailrisk/io/bundle.hpp"
#include "tailrisk/risk/risk_measures.hpp"
#include "tailrisk/util/parallel.hpp"

using namespace tailrisk;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double max_abs(const Eigen::MatrixXd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

// ---------------------------------------------------------------- 1

Outcome gp_oracle() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 25);
    const std::size_t d = 1 + static_cast<std::size_t>(rng() % 6);
    auto g = oracle::random_instance(rng, n, d, 10);
    const auto gp = GpSurrogate::build(g.kernel, g.beta0, g.data);
    const auto ref = oracle::condition(g.kernel, g.beta0, g.data, gp.jitter(), g.xq, g.offset_q);
    const Posterior p = gp.posterior(g.xq, g.offset_q);
    worst = std::max({worst, max_abs(p.mean - ref.mean), max_abs(p.var - ref.cov.diagonal()),
                      max_abs(gp.posterior_covariance(g.xq) - ref.cov)});
  }
  return {worst <= 1e-8, "max abs error " + fmt("%.2e", worst) + " over 200 instances"};
}

// ---------------------------------------------------------------- 2

TrainingSet take(const TrainingSet& t, std::size_t m) {
  TrainingSet s;
  const auto k = static_cast<Eigen::Index>(m);
  s.ids.assign(t.ids.begin(), t.ids.begin() + static_cast<std::ptrdiff_t>(m));
  s.x = t.x.topRows(k);
  s.y = t.y.head(k);
  s.offset = t.offset.head(k);
  s.noise = t.noise.head(k);
  return s;
}

double surrogate_sequence(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 6 + static_cast<std::size_t>(rng() % 15);
  const std::size_t d = 1 + static_cast<std::size_t>(rng() % 4);
  auto g = oracle::random_instance(rng, n, d, 8);
  std::size_t have = 2 + static_cast<std::size_t>(rng() % 3);
  TrainingSet cur = take(g.data, have);
  GpSurrogate gp = GpSurrogate::build(g.kernel, g.beta0, cur);
  double worst = 0.0;
  for (int step = 0; step < 8; ++step) {
    if (have < n && u(rng) < 0.5) {
      const auto i = static_cast<Eigen::Index>(have);
      gp = gp.with_new_point(g.data.ids[have], g.data.x.row(i), g.data.y(i), g.data.offset(i), g.data.noise(i));
      cur = take(g.data, ++have);
    } else {
      const auto pos = static_cast<Eigen::Index>(rng() % have);
      const double y = cur.y(pos) + (u(rng) - 0.5);
      const double noise = cur.noise(pos) * (0.2 + u(rng));
      gp = gp.with_observation(static_cast<std::size_t>(pos), y, noise);
      cur.y(pos) = g.data.y(pos) = y;
      cur.noise(pos) = g.data.noise(pos) = noise;
    }
    const GpSurrogate full = GpSurrogate::build(g.kernel, g.beta0, cur);
    const Posterior a = gp.posterior(g.xq, g.offset_q), b = full.posterior(g.xq, g.offset_q);
    worst = std::max({worst, max_abs(a.mean - b.mean), max_abs(a.var - b.var)});
  }
  return worst;
}

double engine_sequence(std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  const std::size_t n = 40;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
  for (auto& v : x.reshaped()) v = z(rng);
  DesignState design(n, 1000000);
  auto sample = [&](std::size_t i, int r) {
    std::vector<double> y(static_cast<std::size_t>(r));
    for (double& v : y) v = std::sin(x(static_cast<Eigen::Index>(i), 0)) + x(static_cast<Eigen::Index>(i), 1) + 0.3 * z(rng);
    add_outputs(design, i, y);
  };
  for (std::size_t i = 0; i < 8; ++i) sample(i, 4);
  ModelContext ctx;
  ctx.x = &x;
  ctx.offset = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  ctx.noise_model.kind = NoiseKind::EmpiricalSK;
  const FittedModel fm = fit_model(ctx, design);
  GpSurrogate gp = fm.gp;
  double worst = 0.0;
  for (int step = 0; step < 5; ++step) {
    const std::size_t old = rng() % 8, fresh = 8 + rng() % (n - 8);
    sample(old, 3);
    sample(fresh, 2 + static_cast<int>(rng() % 3));
    gp = update_surrogate(ctx, gp, fm.noise, design, {old, fresh});
    const GpSurrogate reb =
        build_surrogate(ctx, design, design.sampled_indices(), fm.gp.kernel(), fm.gp.beta0(), fm.noise);
    const Posterior a = gp.posterior(x, ctx.offset), b = reb.posterior(x, ctx.offset);
    worst = std::max({worst, max_abs(a.mean - b.mean), max_abs(a.var - b.var)});
  }
  return worst;
}

Outcome update_equivalence() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) worst = std::max(worst, surrogate_sequence(rng));
  for (int s = 0; s < 50; ++s) worst = std::max(worst, engine_sequence(rng));
  return {worst <= 1e-8, "max abs error " + fmt("%.2e", worst) + " over 100 sequences"};
}

// ---------------------------------------------------------------- 3

Outcome streaming() {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> z(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const double mu = 100.0 * z(rng), sd = std::exp(2.0 * z(rng));
    DesignState d(1, 1000000);
    std::vector<double> all;
    const int parts = 1 + static_cast<int>(rng() % 6);
    for (int p = 0; p < parts; ++p) {
      std::vector<double> batch(1 + rng() % 20);
      for (double& v : batch) v = mu + sd * z(rng);
      all.insert(all.end(), batch.begin(), batch.end());
      add_outputs(d, 0, batch);
    }
    const auto [m, v] = oracle::batch_stats(all);
    worst = std::max(worst, std::abs(d.mean[0] - m) / std::max(1.0, std::abs(m)));
    if (all.size() > 1) worst = std::max(worst, std::abs(d.tau2_hat(0) - v) / std::max(1.0, v));
  }
  return {worst <= 1e-10, "max scaled error " + fmt("%.2e", worst) + " over 1000 cases"};
}

// ---------------------------------------------------------------- 4

Outcome woodbury() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int improved = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 3 + static_cast<std::size_t>(rng() % 10);
    auto g = oracle::random_instance(rng, n, 1 + rng() % 4, 1);
    const Eigen::MatrixXd c = oracle::cov_direct(g.kernel, g.data.x, g.data.x);
    Eigen::VectorXd tau2(static_cast<Eigen::Index>(n));
    for (auto& t : tau2) t = g.kernel.sigma2 * (0.2 + u(rng));
    // One perturbation pattern per instance, reused at every r-scale.
    std::vector<double> base(n), extra(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      base[i] = 1.0 + static_cast<double>(rng() % 3);
      if (i == 0 || u(rng) < 0.5) extra[i] = 1.0 + std::floor(10.0 * u(rng));
    }
    std::vector<double> errs;
    for (double scale : {10.0, 1000.0}) {
      Eigen::VectorXd delta(tau2.size()), cand(tau2.size());
      for (Eigen::Index i = 0; i < tau2.size(); ++i) {
        const double r = scale * base[static_cast<std::size_t>(i)];
        delta(i) = tau2(i) / r;
        cand(i) = tau2(i) / (r + extra[static_cast<std::size_t>(i)]);
      }
      Eigen::MatrixXd a = c, b = c;
      a.diagonal() += delta;
      b.diagonal() += cand;
      const Eigen::MatrixXd exact = b.inverse();
      const Eigen::MatrixXd a_inv = a.inverse();
      const Eigen::MatrixXd w = woodbury_inverse(a_inv, delta, cand);
      worst = std::max(worst, max_abs(w - exact) / std::max(1.0, max_abs(exact)));
      errs.push_back(max_abs(approximate_inverse(a_inv, delta, cand) - exact));
    }
    if (errs[1] <= errs[0]) ++improved;
  }
  return {worst <= 1e-8 && improved == 50,
          "exact-form error " + fmt("%.2e", worst) + ", approximation improved on " + std::to_string(improved) + "/50"};
}

// ---------------------------------------------------------------- 5

Outcome separable() {
  // Full sweep: every candidate count up to 5 and every budget up to 20,
  // several random weight and replication draws each.
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int cases = 0, bad = 0;
  for (std::size_t m = 1; m <= 5; ++m) {
    for (std::int64_t dr = 0; dr <= 20; ++dr) {
      for (int draw = 0; draw < 12; ++draw) {
        std::vector<double> a(m), r(m);
        for (std::size_t i = 0; i < m; ++i) {
          a[i] = u(rng) < 0.1 ? 0.0 : std::exp(4.0 * u(rng) - 2.0);
          r[i] = 1.0 + static_cast<double>(rng() % 10);
        }
        const auto x = allocate_separable(a, r, dr);
        std::int64_t sum = 0;
        bool ok = x.size() == m;
        for (auto v : x) {
          ok = ok && v >= 0;
          sum += v;
        }
        const double best = oracle::enumerate_separable(a, r, dr);
        ok = ok && sum == dr && separable_objective(a, r, x) <= best * (1.0 + 1e-12) + 1e-300;
        ++cases;
        if (!ok) ++bad;
      }
    }
  }
  return {bad == 0, std::to_string(cases - bad) + "/" + std::to_string(cases) + " instances optimal"};
}

// ---------------------------------------------------------------- 6

Outcome hd() {
  const std::pair<std::size_t, double> cases[] = {{100, 0.05}, {1000, 0.01}, {10000, 0.005}};
  bool ok = true;
  std::string detail;
  for (const auto& [n, a] : cases) {
    const auto w = hd_weights(n, a);
    const auto ref = oracle::hd_weights_ibeta(n, a);
    double sum = 0.0, diff = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += w[i];
      diff = std::max(diff, std::abs(w[i] - ref[i]));
      if (w[i] > w[arg]) arg = i;
    }
    const std::size_t rank = arg + 1;
    const double an = a * static_cast<double>(n);
    const auto lo = static_cast<std::size_t>(std::floor(an + 1e-9));
    const auto hi = static_cast<std::size_t>(std::ceil(an - 1e-9)) + 1;
    const bool this_ok = std::abs(sum - 1.0) <= 1e-12 && (rank == lo || rank == hi) && diff <= 1e-12;
    ok = ok && this_ok;
    detail += "(" + std::to_string(n) + "," + fmt("%g", a) + "): argmax rank " + std::to_string(rank) + ", |sum-1| " +
              fmt("%.1e", std::abs(sum - 1.0)) + ", oracle diff " + fmt("%.1e", diff) + "; ";
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// ---------------------------------------------------------------- desk-scale Black-Scholes studies

struct Study {
  StudySummary summary;
  double concentration = 0.0;  // share of post-init replications in the target rank set
};

RunConfig desk_config(Method m, Measure measure) {
  RunConfig c;
  c.scenario.simulator = "black_scholes";
  c.scenario.count = 2000;
  c.scenario.seed = 1;
  c.scenario.inner_seed = 1;
  c.budget.total = 2000;
  c.budget.stages = 50;
  c.method.method = m;
  c.risk = {measure, 0.01};
  c.gp.trend = "intrinsic";
  c.validate();
  return c;
}

struct Desk {
  std::unique_ptr<Simulator> sim;
  ScenarioSet scen;
  Eigen::VectorXd truth;
  std::vector<std::size_t> rank;  // 1-based true rank of each scenario
  std::map<std::string, Study> cache;

  Desk() {
    const RunConfig c = desk_config(Method::ST_GP, Measure::VaR);
    sim = make_simulator(c.scenario);
    scen = sim->generate_scenarios(c.scenario.count, c.scenario.seed);
    truth = *true_values(*sim, scen);
    rank.resize(scen.size());
    const auto order = ascending_order(truth);
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i + 1;
  }

  const Study& get(Method m, Measure measure, NoiseKind noise = NoiseKind::SmoothedVariance, std::int64_t budget = 2000) {
    const std::string key = std::string(method_name(m)) + measure_name(measure) + std::to_string(static_cast<int>(noise)) +
                            "/" + std::to_string(budget);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    RunConfig c = desk_config(m, measure);
    c.gp.noise = noise;
    c.budget.total = budget;
    const double ref = exact_reference(truth, c.risk).value;
    const std::size_t tail = c.risk.tail_count(scen.size());
    const double an = c.risk.alpha * static_cast<double>(scen.size());
    double hit = 0.0, post = 0.0;
    auto on_run = [&](const RunRecord& rec) {
      for (std::size_t i = 0; i < rec.reps.size(); ++i) {
        const double extra = static_cast<double>(rec.reps[i] - rec.init_reps[i]);
        post += extra;
        const bool target = measure == Measure::VaR
                                ? rank[i] >= 0.5 * an && rank[i] <= 1.5 * an
                                : rank[i] <= tail;
        if (target) hit += extra;
      }
    };
    Study s;
    s.summary = macro_replicate(c, scen, *sim, &truth, ref, std::size_t{20}, on_run);
    s.concentration = post > 0.0 ? hit / post : 0.0;
    std::printf("    %s %s%s budget %lld: RMSE %.4g  SD %.4g  s_bar %.4g  mean %.6g  ref %.6g\n", method_name(m),
                measure_name(measure), noise == NoiseKind::EmpiricalSK ? " (empirical noise)" : "",
                static_cast<long long>(budget), s.summary.rmse, s.summary.sd, s.summary.mean_reported_sd,
                s.summary.mean, ref);
    std::fflush(stdout);
    return cache.emplace(key, std::move(s)).first->second;
  }
};

Desk& desk() {
  static Desk d;
  return d;
}

Outcome rmse_ratio() {
  bool ok = true;
  std::string detail;
  for (Measure m : {Measure::VaR, Measure::TVaR}) {
    const double u1 = desk().get(Method::U1_GP, m).summary.rmse;
    for (Method method : {Method::ST_GP, Method::SV_GP}) {
      const double r = desk().get(method, m).summary.rmse / u1;
      ok = ok && r <= 0.2;
      detail += std::string(method_name(method)) + " " + measure_name(m) + " ratio " + fmt("%.3f", r) + "; ";
    }
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome smoothing_gain() {
  const double gp = desk().get(Method::U1_GP, Measure::VaR, NoiseKind::SmoothedVariance, 40000).summary.rmse;
  const double sa = desk().get(Method::U1_SA, Measure::VaR, NoiseKind::SmoothedVariance, 40000).summary.rmse;
  return {gp <= 0.5 * sa, "RMSE U1-GP " + fmt("%.4g", gp) + " vs U1-SA " + fmt("%.4g", sa) + ", ratio " +
                              fmt("%.3f", gp / sa)};
}

Outcome calibration() {
  bool ok = true;
  std::string detail;
  for (Measure m : {Measure::VaR, Measure::TVaR}) {
    for (Method method : {Method::ST_GP, Method::SV_GP}) {
      const auto& s = desk().get(method, m).summary;
      const double r = s.mean_reported_sd / s.sd;
      ok = ok && r >= 0.5 && r <= 2.0;
      detail += std::string(method_name(method)) + " " + measure_name(m) + " s_bar/SD " + fmt("%.2f", r) + "; ";
    }
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome concentration() {
  const double var_st = desk().get(Method::ST_GP, Measure::VaR).concentration;
  const double tvar_st = desk().get(Method::ST_GP, Measure::TVaR).concentration;
  const double tvar_sv = desk().get(Method::SV_GP, Measure::TVaR).concentration;
  const bool ok = var_st >= 0.6 && tvar_st >= 0.7 && tvar_sv >= 0.7;
  return {ok, "ST-GP VaR " + fmt("%.1f%%", 100.0 * var_st) + " on ranks [10,30]; TVaR tail share ST-GP " +
                  fmt("%.1f%%", 100.0 * tvar_st) + ", SV-GP " + fmt("%.1f%%", 100.0 * tvar_sv)};
}

Outcome noise_bias() {
  const auto& sm = desk().get(Method::ST_GP, Measure::VaR, NoiseKind::SmoothedVariance).summary;
  const auto& em = desk().get(Method::ST_GP, Measure::VaR, NoiseKind::EmpiricalSK).summary;
  const double a = std::abs(sm.bias_by_stage.at(1)), b = std::abs(em.bias_by_stage.at(1));
  return {a <= b, "|bias| at stage 1: smoothed " + fmt("%.4g", a) + ", empirical " + fmt("%.4g", b)};
}

// ---------------------------------------------------------------- 12

Outcome determinism() {
  bool ok = true;
  std::string detail;
  const std::size_t before = thread_count();
  for (auto [m, measure] : {std::pair{Method::ST_GP, Measure::VaR}, std::pair{Method::SV_GP, Measure::TVaR}}) {
    const RunConfig c = desk_config(m, measure);
    RunInputs in;
    in.config = &c;
    in.scenarios = &desk().scen;
    in.simulator = desk().sim.get();
    in.true_values = &desk().truth;
    in.seed = 42;
    std::string files[2];
    for (int t = 0; t < 2; ++t) {
      set_thread_count(t == 0 ? 1 : 8);
      const RunRecord rec = run_method(in);
      files[t] = trajectory_csv(rec) + allocation_csv(rec, &desk().truth) + posterior_csv(rec);
    }
    const bool same = files[0] == files[1];
    ok = ok && same;
    detail += std::string(method_name(m)) + " " + measure_name(measure) + (same ? " identical" : " DIFFERS") + "; ";
  }
  set_thread_count(before);
  detail.resize(detail.size() - 2);
  return {ok, detail + " (1 vs 8 threads)"};
}

// ---------------------------------------------------------------- 13

Outcome annuity() {
  RunConfig c;
  c.scenario.simulator = "annuity";
  c.scenario.count = 2000;
  c.scenario.seed = 1;
  c.scenario.inner_seed = 1;
  c.budget.total = 10000;
  c.budget.stages = 50;
  c.risk = {Measure::VaR, 0.005};
  c.oracle = OracleConfig{1000000, 200, 1, 200};
  c.validate();
  const auto sim = make_simulator(c.scenario);
  const ScenarioSet scen = sim->generate_scenarios(c.scenario.count, c.scenario.seed);
  const ReferenceValue ref = simulated_reference(c, scen, *sim, 0x0AC1E);
  std::printf("    annuity reference (SR-GP, budget 1e6): %.6g (sd %.3g)\n", ref.value, ref.sd);
  std::fflush(stdout);
  std::map<Method, double> rmse;
  for (Method m : {Method::U1_GP, Method::ST_GP, Method::SV_GP}) {
    c.method.method = m;
    const StudySummary s = macro_replicate(c, scen, *sim, nullptr, ref.value, std::size_t{10});
    rmse[m] = s.rmse;
    std::printf("    %s VaR: RMSE %.4g  SD %.4g  s_bar %.4g  mean %.6g\n", method_name(m), s.rmse, s.sd,
                s.mean_reported_sd, s.mean);
    std::fflush(stdout);
  }
  const double st = rmse[Method::ST_GP] / rmse[Method::U1_GP], sv = rmse[Method::SV_GP] / rmse[Method::U1_GP];
  return {st <= 0.25 && sv <= 0.25, "RMSE ratio to U1-GP: ST-GP " + fmt("%.3f", st) + ", SV-GP " + fmt("%.3f", sv)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"GP posterior vs dense conditioning", gp_oracle},
      {"incremental update vs rebuild", update_equivalence},
      {"streaming statistics", streaming},
      {"Woodbury inverse", woodbury},
      {"separable allocation vs enumeration", separable},
      {"Harrell-Davis weights", hd},
      {"desk BS study RMSE vs U1-GP", rmse_ratio},
      {"spatial smoothing gain", smoothing_gain},
      {"uncertainty calibration", calibration},
      {"budget concentration", concentration},
      {"noise model bias direction", noise_bias},
      {"determinism across thread counts", determinism},
      {"annuity study RMSE vs U1-GP", annuity},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d failed\n", failed);
  return failed == 0 ? 0 : 1;
}
