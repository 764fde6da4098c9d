#include "tailrisk/sim/pilots.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tailrisk/util/errors.hpp"

namespace tailrisk {

double default_pilot_radius(std::size_t dim, std::size_t n_init) {
  return 10.0 * std::sqrt(static_cast<double>(dim)) / static_cast<double>(std::max<std::size_t>(n_init, 1));
}

PilotResult initialize_pilots(const Eigen::MatrixXd& standardized, std::size_t n_init, double d0, std::uint64_t seed,
                              double d0_floor) {
  const auto n = static_cast<std::size_t>(standardized.rows());
  if (n_init > n) throw ConfigError("initialize_pilots: N_init exceeds the number of scenarios");
  if (n_init == 0) throw ConfigError("initialize_pilots: N_init must be positive");
  if (!(d0 > 0.0)) throw ConfigError("initialize_pilots: d0 must be positive");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 gen(seed);
  std::shuffle(order.begin(), order.end(), gen);

  PilotResult out;
  for (;;) {
    ++out.passes;
    std::vector<std::size_t> kept;
    const double d2 = d0 * d0;
    for (std::size_t idx : order) {
      if (kept.size() == n_init) break;
      const auto row = standardized.row(static_cast<Eigen::Index>(idx));
      bool far = true;
      for (std::size_t k : kept) {
        if ((standardized.row(static_cast<Eigen::Index>(k)) - row).squaredNorm() < d2) {
          far = false;
          break;
        }
      }
      if (far) kept.push_back(idx);
    }
    if (kept.size() == n_init || d0 * 0.5 < d0_floor) {
      out.indices = std::move(kept);
      out.final_d0 = d0;
      return out;
    }
    d0 *= 0.5;
  }
}

}  // namespace tailrisk
