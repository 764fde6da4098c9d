#include "tailrisk/acquisition/scores.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>

#include "tailrisk/acquisition/weights.hpp"
#include "tailrisk/simd/kernels.hpp"
#include "tailrisk/util/parallel.hpp"

namespace tailrisk {

namespace {

void check_candidates(const std::vector<std::size_t>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("acquisition: empty candidate set");
}

template <class T>
Eigen::VectorXd gather(const T& v, const std::vector<std::size_t>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(idx[i]));
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

std::vector<double> score_st_gp(const StageView& view, const std::vector<std::size_t>& candidates,
                                const std::vector<std::size_t>& targets, double level, double eps, std::int64_t dr,
                                Measure measure, double mixing) {
  check_candidates(candidates);
  const Eigen::VectorXd mt = gather(view.mean, targets);
  const Eigen::VectorXd vt = gather(view.var, targets);
  const Eigen::VectorXd w = tmse_weights(mt, vt, level, eps, measure, mixing);
  const Eigen::MatrixXd cov = cross_posterior_covariance(view, targets, candidates);
  const double inv_n = 1.0 / static_cast<double>(view.size());
  const auto nt = static_cast<std::size_t>(targets.size());
  std::vector<double> scores(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t j) {
    const auto m = static_cast<Eigen::Index>(candidates[j]);
    const double denom = view.var(m) + view.tau2(m) / static_cast<double>(dr);
    double total;
    if (dr <= 0 || !(denom > 0.0)) {
      total = vt.dot(w);
    } else {
      total = simd::timse_sum(std::span<const double>(vt.data(), nt),
                              std::span<const double>(cov.col(static_cast<Eigen::Index>(j)).data(), nt),
                              std::span<const double>(w.data(), nt), 1.0 / denom);
    }
    scores[j] = total * inv_n;
  });
  return scores;
}

std::vector<double> score_se_gp(const StageView& view, const std::vector<std::size_t>& candidates,
                                const std::vector<std::size_t>& targets, double level, std::int64_t dr,
                                Measure measure) {
  check_candidates(candidates);
  const Eigen::MatrixXd cov = cross_posterior_covariance(view, targets, candidates);
  const double inv_n = 1.0 / static_cast<double>(view.size());
  std::vector<double> scores(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t j) {
    const auto m = static_cast<Eigen::Index>(candidates[j]);
    double total = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const auto n = static_cast<Eigen::Index>(targets[i]);
      const double v = lookahead_from(view.var(n), cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                                      view.var(m), view.tau2(m), dr);
      double p;
      if (v > 0.0) {
        p = normal_cdf((level - view.mean(n)) / std::sqrt(v));
      } else {
        p = view.mean(n) < level ? 1.0 : 0.0;
      }
      total += measure == Measure::VaR ? p * (1.0 - p) : p;
    }
    scores[j] = total * inv_n;
  });
  return scores;
}

std::vector<double> score_br_sa(const DesignState& design, double level, double r_smooth) {
  const double pooled = design.pooled_tau2();
  std::vector<double> scores(design.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t n = 0; n < design.size(); ++n) {
    if (!design.sampled(n)) continue;
    const double r = static_cast<double>(design.reps[n]);
    const double own = design.has_variance(n) ? design.tau2_hat(n) : pooled;
    const double smooth = (r / (r + r_smooth)) * own + (r_smooth / (r + r_smooth)) * pooled;
    const double dev = std::abs(design.mean[n] - level);
    if (dev == 0.0) {
      scores[n] = 0.0;
    } else {
      scores[n] = smooth > 0.0 ? r * dev / std::sqrt(smooth) : std::numeric_limits<double>::infinity();
    }
  }
  return scores;
}

std::size_t select_argmin(const std::vector<double>& scores, const std::vector<std::size_t>& candidates) {
  if (scores.size() != candidates.size() || scores.empty()) throw std::invalid_argument("select_argmin: bad input");
  std::size_t best = candidates.size();
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (std::isnan(scores[j])) continue;
    if (best == candidates.size() || scores[j] < scores[best] ||
        (scores[j] == scores[best] && candidates[j] < candidates[best])) {
      best = j;
    }
  }
  if (best == candidates.size()) throw std::invalid_argument("select_argmin: no finite score");
  return candidates[best];
}

}  // namespace tailrisk
