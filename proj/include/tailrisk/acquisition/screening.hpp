#pragma once

#include "tailrisk/acquisition/lookahead.hpp"
#include "tailrisk/acquisition/scores.hpp"

namespace tailrisk {

struct ScreeningOptions {
  double var_ratio = 1e-3;       // VaR: W_n / sum W above this
  double tvar_threshold = 1e-3;  // TVaR: W_n above this
  double mixing = -1.0;
};

/// Screened candidate set, ordered by decreasing screening weight (ties by
/// index). Always contains the estimated quantile scenario and every
/// scenario whose mean lies below `level`; when nothing passes the threshold
/// the 4*tail_count lowest means are used instead.
CandidateSet screen_candidates(const StageView& view, double level, double eps, Measure measure,
                               std::size_t quantile_scenario, std::size_t tail_count,
                               const ScreeningOptions& options = {});

}  // namespace tailrisk
