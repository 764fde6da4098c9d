#include "tailrisk/acquisition/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tailrisk {

std::int64_t AllocationPlan::total() const noexcept {
  std::int64_t t = 0;
  for (const auto& [n, r] : entries) t += r;
  return t;
}

double separable_objective(const std::vector<double>& a, const std::vector<double>& r,
                           const std::vector<std::int64_t>& x) {
  double f = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0) f += a[i] / (r[i] + static_cast<double>(x[i]));
  }
  return f;
}

std::vector<std::int64_t> allocate_separable(const std::vector<double>& a, const std::vector<double>& r,
                                             std::int64_t budget) {
  const std::size_t n = a.size();
  if (r.size() != n || n == 0) throw std::invalid_argument("allocate_separable: bad sizes");
  if (budget < 0) throw std::invalid_argument("allocate_separable: negative budget");
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] < 0.0 || (a[i] > 0.0 && !(r[i] > 0.0))) throw std::invalid_argument("allocate_separable: bad coefficients");
  }
  std::vector<std::int64_t> x(n, 0);
  if (budget == 0) return x;

  // Continuous water-filling: r_i + x_i = lambda sqrt(a_i) on the active set,
  // pegging entries that would go negative.
  std::vector<bool> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = a[i] > 0.0;
  std::vector<double> cont(n, 0.0);
  if (std::none_of(active.begin(), active.end(), [](bool b) { return b; })) {
    x[0] = budget;
    return x;
  }
  for (;;) {
    double sum_r = 0.0, sum_s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (active[i]) {
        sum_r += r[i];
        sum_s += std::sqrt(a[i]);
      }
    }
    const double lambda = (static_cast<double>(budget) + sum_r) / sum_s;
    bool pegged = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      cont[i] = lambda * std::sqrt(a[i]) - r[i];
      if (cont[i] < 0.0) {
        active[i] = false;
        cont[i] = 0.0;
        pegged = true;
      }
    }
    if (!pegged) break;
  }

  // Largest-remainder rounding.
  std::int64_t assigned = 0;
  std::vector<std::pair<double, std::size_t>> rem;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<std::int64_t>(std::floor(cont[i]));
    assigned += x[i];
    rem.emplace_back(cont[i] - std::floor(cont[i]), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& p, const auto& q) { return p.first > q.first; });
  for (std::size_t j = 0; assigned < budget; j = (j + 1) % n) {
    ++x[rem[j].second];
    ++assigned;
  }
  while (assigned > budget) {
    auto it = std::max_element(x.begin(), x.end());
    --*it;
    --assigned;
  }

  // Unit-transfer descent. For a separable convex objective no improving
  // transfer means the integer point is optimal.
  auto gain = [&](std::size_t i) {  // decrease from adding one unit to i
    if (a[i] <= 0.0) return 0.0;
    const double c = r[i] + static_cast<double>(x[i]);
    return a[i] / c - a[i] / (c + 1.0);
  };
  auto loss = [&](std::size_t i) {  // increase from removing one unit from i
    if (a[i] <= 0.0) return 0.0;
    const double c = r[i] + static_cast<double>(x[i]);
    return a[i] / (c - 1.0) - a[i] / c;
  };
  for (std::int64_t guard = 0; guard < 4 * budget + 16; ++guard) {
    std::size_t best_add = n, best_drop = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (best_add == n || gain(i) > gain(best_add)) best_add = i;
      if (x[i] > 0 && (best_drop == n || loss(i) < loss(best_drop))) best_drop = i;
    }
    if (best_drop == n || best_add == best_drop) break;
    const double improvement = gain(best_add) - loss(best_drop);
    if (!(improvement > 1e-15 * std::max(separable_objective(a, r, x), 1e-300))) break;
    ++x[best_add];
    --x[best_drop];
  }
  return x;
}

AllocationPlan allocate_sv_gp(const StageView& view, const Eigen::VectorXd& offset,
                              const std::vector<std::size_t>& candidates, const std::vector<std::size_t>& support,
                              const std::vector<double>& weights, std::int64_t dr, SvDetails* details) {
  if (candidates.empty()) throw std::invalid_argument("allocate_sv_gp: empty candidate set");
  if (support.size() != weights.size()) throw std::invalid_argument("allocate_sv_gp: weights/support mismatch");
  AllocationPlan plan;
  plan.budget = dr;
  if (dr <= 0) return plan;

  const std::int64_t probe_cap = (dr + 1) / 2;
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> probes;
  for (std::size_t m : candidates) {
    if (view.reps[m] > 0) {
      chosen.push_back(m);
    } else if (static_cast<std::int64_t>(probes.size()) < probe_cap) {
      probes.push_back(m);
      chosen.push_back(m);
    }
  }
  const auto remaining = dr - static_cast<std::int64_t>(probes.size());

  // Surrogate augmented with the probed scenarios (outputs do not enter u).
  GpSurrogate aug = *view.gp;
  for (std::size_t m : probes) {
    const auto mi = static_cast<Eigen::Index>(m);
    aug = aug.with_new_point(m, view.x->row(mi), view.mean(mi), offset(mi), view.tau2(mi));
  }
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const Eigen::MatrixXd c = cross_covariance(aug.kernel(), aug.data().x, rows_of(*view.x, support));
  const Eigen::VectorXd u = aug.solve(c * w);

  std::vector<double> a(chosen.size()), r(chosen.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const std::size_t m = chosen[i];
    const auto pos = aug.position_of(m);
    const double ui = pos ? u(static_cast<Eigen::Index>(*pos)) : 0.0;
    a[i] = ui * ui * view.tau2(static_cast<Eigen::Index>(m));
    r[i] = static_cast<double>(std::max<std::int64_t>(view.reps[m], 1));
  }
  for (std::size_t m : probes) plan.add(m, 1);
  if (remaining > 0) {
    const auto x = allocate_separable(a, r, remaining);
    for (std::size_t i = 0; i < chosen.size(); ++i) plan.add(chosen[i], x[i]);
  }
  if (details) {
    details->optimized = chosen;
    details->a = a;
    details->probes = static_cast<std::int64_t>(probes.size());
  }
  return plan;
}

AllocationPlan allocate_uniform(const std::vector<std::size_t>& members, std::int64_t dr) {
  if (members.empty()) throw std::invalid_argument("allocate_uniform: no members");
  AllocationPlan plan;
  plan.budget = dr;
  const auto count = static_cast<std::int64_t>(members.size());
  const std::int64_t base = dr / count;
  const std::int64_t extra = dr % count;
  for (std::int64_t i = 0; i < count; ++i) {
    plan.add(members[static_cast<std::size_t>(i)], base + (i < extra ? 1 : 0));
  }
  return plan;
}

AllocationPlan allocate_sr_gp(const Eigen::VectorXd& means, std::size_t lower, std::size_t upper, std::int64_t dr) {
  const auto n = static_cast<std::size_t>(means.size());
  if (lower < 1 || lower > upper || upper > n) throw std::invalid_argument("allocate_sr_gp: need 1 <= L <= U <= N");
  const auto order = ascending_order(means);
  const double lo = means(static_cast<Eigen::Index>(order[lower - 1]));
  const double hi = means(static_cast<Eigen::Index>(order[upper - 1]));
  std::vector<std::size_t> members;
  for (std::size_t idx : order) {
    const double m = means(static_cast<Eigen::Index>(idx));
    if (m >= lo && m <= hi) members.push_back(idx);
  }
  return allocate_uniform(members, dr);
}

}  // namespace tailrisk
