#pragma once

#include <cstdint>
#include <vector>

#include "tailrisk/acquisition/lookahead.hpp"
#include "tailrisk/gp/design_state.hpp"
#include "tailrisk/risk/risk_measures.hpp"

namespace tailrisk {

/// Scenario set considered for new replications plus the screening weight
/// of each member (aligned with `indices`).
struct CandidateSet {
  std::vector<std::size_t> indices;
  std::vector<double> weights;
  bool fallback = false;
};

/// Integrated targeted MSE after dr replications at each candidate:
/// (1/N) sum_{n in targets} V(n; m) W(n), one score per candidate.
std::vector<double> score_st_gp(const StageView& view, const std::vector<std::size_t>& candidates,
                                const std::vector<std::size_t>& targets, double level, double eps, std::int64_t dr,
                                Measure measure, double mixing = -1.0);

/// Expected contour improvement: (1/N) sum P(1-P) for VaR, (1/N) sum P for TVaR,
/// with P = Phi((level - m_n)/sqrt(V(n; m))).
std::vector<double> score_se_gp(const StageView& view, const std::vector<std::size_t>& candidates,
                                const std::vector<std::size_t>& targets, double level, std::int64_t dr,
                                Measure measure);

/// Sample-average criterion r |ybar - level| / tau_tilde over sampled scenarios
/// (NaN for scenarios without replications).
std::vector<double> score_br_sa(const DesignState& design, double level, double r_smooth);

/// Index of the smallest finite score; ties go to the lowest scenario index.
std::size_t select_argmin(const std::vector<double>& scores, const std::vector<std::size_t>& candidates);

}  // namespace tailrisk
