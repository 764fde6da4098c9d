#include "tailrisk/sim/annuity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "tailrisk/sim/rng.hpp"
#include "tailrisk/util/errors.hpp"

namespace tailrisk {

namespace {

struct RateState {
  double beta, alpha, zeta;
};

// One full-truncation Euler step; the positive parts feed drift and diffusion.
template <class Normal>
RateState euler_step(const AnnuityParams& p, const RateState& s, double sqdt, Normal&& normal) {
  const double b = std::max(s.beta, 0.0);
  const double a = std::max(s.alpha, 0.0);
  const double z = std::max(s.zeta, 0.0);
  RateState n;
  n.beta = s.beta + (p.beta_bar - a) * p.dt + std::sqrt(b) * z * sqdt * normal();
  n.alpha = s.alpha + (p.alpha_bar - a) * p.dt + std::sqrt(a) * z * sqdt * normal();
  n.zeta = s.zeta + (p.zeta_bar - z) * p.dt + std::sqrt(z) * p.phi * sqdt * normal();
  return n;
}

template <class Normal>
std::array<double, 3> kappa_step(const AnnuityParams& p, const std::array<double, 9>& chol,
                                 const std::array<double, 3>& k, Normal&& normal) {
  const double e[3] = {normal(), normal(), normal()};
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    double shock = 0.0;
    for (int j = 0; j <= i; ++j) shock += chol[static_cast<std::size_t>(3 * i + j)] * e[j];
    out[static_cast<std::size_t>(i)] = k[static_cast<std::size_t>(i)] + p.kappa_drift[static_cast<std::size_t>(i)] + shock;
  }
  return out;
}

int steps_per_year(const AnnuityParams& p) { return static_cast<int>(std::lround(1.0 / p.dt)); }

}  // namespace

void AnnuityParams::validate() const {
  if (!(dt > 0.0)) throw ConfigError("annuity: dt must be positive");
  if (std::abs(1.0 / dt - std::round(1.0 / dt)) > 1e-9) throw ConfigError("annuity: 1/dt must be an integer");
  if (max_age < age) throw ConfigError("annuity: empty age window");
  if (start < horizon) throw ConfigError("annuity: start must not precede the horizon");
  if (std::abs(horizon - std::round(horizon)) > 1e-12 || horizon < 1.0) {
    throw ConfigError("annuity: horizon must be a whole number of years");
  }
  if (phi < 0.0) throw ConfigError("annuity: phi must be non-negative");
  (void)kappa_chol();
}

std::array<double, 9> AnnuityParams::kappa_chol() const {
  std::array<double, 9> l{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = kappa_cov[static_cast<std::size_t>(3 * i + j)];
      for (int k = 0; k < j; ++k) s -= l[static_cast<std::size_t>(3 * i + k)] * l[static_cast<std::size_t>(3 * j + k)];
      if (i == j) {
        if (s < -1e-15) throw ConfigError("annuity: kappa covariance is not positive semidefinite");
        l[static_cast<std::size_t>(3 * i + i)] = std::sqrt(std::max(s, 0.0));
      } else {
        const double d = l[static_cast<std::size_t>(3 * j + j)];
        l[static_cast<std::size_t>(3 * i + j)] = d > 0.0 ? s / d : 0.0;
      }
    }
  }
  return l;
}

double mortality_rate(const AnnuityParams& p, const std::array<double, 3>& kappa, int age) {
  if (p.constant_q) return *p.constant_q;
  const double u = static_cast<double>(age) - p.age_mean;
  const double logit = kappa[0] + kappa[1] * u + kappa[2] * (u * u - p.age_var) + p.cohort;
  return 1.0 / (1.0 + std::exp(-logit));
}

ScenarioSet annuity_generate_scenarios(const AnnuityParams& p, std::size_t n, std::uint64_t seed) {
  p.validate();
  if (n < 1) throw ConfigError("annuity: need at least one scenario");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  auto normal = [&] { return dist(gen); };
  const auto chol = p.kappa_chol();
  const int steps = steps_per_year(p) * static_cast<int>(std::lround(p.horizon));
  const double sqdt = std::sqrt(p.dt);
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), 6);
  for (std::size_t i = 0; i < n; ++i) {
    RateState s{p.rate0[0], p.rate0[1], p.rate0[2]};
    for (int k = 0; k < steps; ++k) s = euler_step(p, s, sqdt, normal);
    std::array<double, 3> kappa = p.kappa0;
    for (int y = 0; y < static_cast<int>(std::lround(p.horizon)); ++y) kappa = kappa_step(p, chol, kappa, normal);
    const auto r = static_cast<Eigen::Index>(i);
    pts(r, 0) = std::max(s.beta, 0.0);
    pts(r, 1) = std::max(s.alpha, 0.0);
    pts(r, 2) = std::max(s.zeta, 0.0);
    pts(r, 3) = kappa[0];
    pts(r, 4) = kappa[1];
    pts(r, 5) = kappa[2];
  }
  return ScenarioSet::from_points(std::move(pts), "annuity", seed);
}

double annuity_payoff_path(const AnnuityParams& p, std::span<const double> z, std::uint64_t stream,
                           std::uint64_t draw, std::vector<double>* survival) {
  if (z.size() != 6) throw std::invalid_argument("annuity: scenario must be 6-D");
  if (z[0] < 0.0 || z[1] < 0.0 || z[2] < 0.0) throw std::invalid_argument("annuity: CIR coordinates must be >= 0");
  Xoshiro256 rng = draw_rng(stream, draw);
  auto normal = [&] { return rng.normal(); };
  const auto chol = p.kappa_chol();
  const int horizon = static_cast<int>(std::lround(p.horizon));
  const int last = p.max_age - p.age;
  const int per_year = steps_per_year(p);
  const double sqdt = std::sqrt(p.dt);

  // Mortality over years u = 0..last-1. Years before the horizon use today's
  // factors (u = 0) and the scenario (u = horizon); later years are simulated.
  std::vector<double> q(static_cast<std::size_t>(std::max(last, 0)), 0.0);
  std::array<double, 3> kappa = {z[3], z[4], z[5]};
  for (int u = 0; u < last; ++u) {
    std::array<double, 3> k_u;
    if (u < horizon) {
      k_u = p.kappa0;
    } else {
      if (u > horizon) kappa = kappa_step(p, chol, kappa, normal);
      k_u = kappa;
    }
    q[static_cast<std::size_t>(u)] = mortality_rate(p, k_u, p.age + u);
  }

  double payoff = 0.0;
  double integral = 0.0;  // int_T^t beta du, trapezoid on the Euler grid
  RateState s{z[0], z[1], z[2]};
  double cum_q = 0.0;
  for (int u = 0; u < horizon && u < last; ++u) cum_q += q[static_cast<std::size_t>(u)];
  if (survival) {
    survival->assign(static_cast<std::size_t>(last + 1), 1.0);
    double c = 0.0;
    for (int t = 1; t <= last; ++t) {
      c += q[static_cast<std::size_t>(t - 1)];
      (*survival)[static_cast<std::size_t>(t)] = std::clamp(1.0 - c, 0.0, 1.0);
    }
  }
  for (int t = horizon; t <= last; ++t) {
    if (t > horizon) {
      for (int k = 0; k < per_year; ++k) {
        const double before = std::max(s.beta, 0.0);
        s = euler_step(p, s, sqdt, normal);
        integral += 0.5 * (before + std::max(s.beta, 0.0)) * p.dt;
      }
      cum_q += q[static_cast<std::size_t>(t - 1)];
    }
    if (t >= p.start) {
      const double surv = std::clamp(1.0 - cum_q, 0.0, 1.0);
      payoff += std::exp(-integral) * surv;
    }
  }
  return payoff;
}

void annuity_sample_payoff(const AnnuityParams& p, std::span<const double> z, std::uint64_t stream,
                           std::uint64_t first_draw, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = annuity_payoff_path(p, z, stream, first_draw + i, nullptr);
}

AnnuitySimulator::AnnuitySimulator(AnnuityParams params) : params_(params) { params_.validate(); }

ScenarioSet AnnuitySimulator::generate_scenarios(std::size_t n, std::uint64_t seed) const {
  return annuity_generate_scenarios(params_, n, seed);
}

void AnnuitySimulator::sample(std::span<const double> z, std::uint64_t stream, std::uint64_t first_draw,
                              std::span<double> out) const {
  annuity_sample_payoff(params_, z, stream, first_draw, out);
}

}  // namespace tailrisk
