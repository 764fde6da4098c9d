#pragma once
// Independent reference computations used by the unit and acceptance tests.
// Everything here is dense linear algebra or direct summation; none of it
// calls the library code it is used to check.

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "tailrisk/gp/surrogate.hpp"

namespace oracle {

struct GpInstance {
  tailrisk::KernelSpec kernel;
  double beta0 = 0.0;
  tailrisk::TrainingSet data;
  Eigen::MatrixXd xq;
  Eigen::VectorXd offset_q;
};

/// Random well-posed instance: n training points and q query points in d dims.
GpInstance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t d, std::size_t q);

/// Direct kernel covariance without any of the library's vectorized paths.
double kernel_direct(const tailrisk::KernelSpec& k, const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b);
Eigen::MatrixXd cov_direct(const tailrisk::KernelSpec& k, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct DensePosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// MVN conditioning by explicit inverse of C + diag(noise) + jitter*I.
DensePosterior condition(const tailrisk::KernelSpec& k, double beta0, const tailrisk::TrainingSet& data, double jitter,
                         const Eigen::MatrixXd& xq, const Eigen::VectorXd& offset_q);

/// Two-pass sample mean and unbiased variance.
std::pair<double, double> batch_stats(const std::vector<double>& y);

/// Harrell-Davis weights from the regularized incomplete Beta function.
std::vector<double> hd_weights_ibeta(std::size_t n, double alpha);

/// Exhaustive minimum of sum a_i / (r_i + x_i) over all integer splits of budget.
double enumerate_separable(const std::vector<double>& a, const std::vector<double>& r, std::int64_t budget);

double normal_pdf(double x, double var);
double normal_cdf(double x);

}  // namespace oracle
