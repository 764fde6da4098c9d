#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace tailrisk {

struct PilotResult {
  std::vector<std::size_t> indices;
  double final_d0 = 0.0;
  int passes = 0;
};

/// Greedy space-filling selection over a random permutation of the
/// standardized scenarios: keep a point when it is at least d0 away from
/// every kept point, stop at n_init. A pass that ends short halves d0 and
/// restarts; below `d0_floor` the last pass is accepted as is.
PilotResult initialize_pilots(const Eigen::MatrixXd& standardized, std::size_t n_init, double d0, std::uint64_t seed,
                              double d0_floor = 1e-6);

/// Starting radius 10 sqrt(d) / n_init.
double default_pilot_radius(std::size_t dim, std::size_t n_init);

}  // namespace tailrisk
