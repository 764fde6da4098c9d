#include "tailrisk/acquisition/lookahead.hpp"

#include <stdexcept>

namespace tailrisk {

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

StageView make_stage_view(const GpSurrogate& gp, const Eigen::MatrixXd& x, const Eigen::VectorXd& offset,
                          Eigen::VectorXd tau2, std::vector<std::int64_t> reps) {
  if (x.rows() != offset.size() || x.rows() != tau2.size() || static_cast<std::size_t>(x.rows()) != reps.size()) {
    throw std::invalid_argument("make_stage_view: inconsistent sizes");
  }
  StageView v;
  v.gp = &gp;
  v.x = &x;
  Posterior p = gp.posterior(x, offset);
  v.mean = std::move(p.mean);
  v.var = std::move(p.var);
  v.tau2 = std::move(tau2);
  v.reps = std::move(reps);
  return v;
}

Eigen::MatrixXd cross_posterior_covariance(const StageView& view, const std::vector<std::size_t>& targets,
                                           const std::vector<std::size_t>& candidates) {
  return view.gp->posterior_covariance(rows_of(*view.x, targets), rows_of(*view.x, candidates));
}

double lookahead_variance(const StageView& view, std::size_t n, std::size_t m, std::int64_t dr) {
  const auto cov = cross_posterior_covariance(view, {n}, {m});
  return lookahead_from(view.var(static_cast<Eigen::Index>(n)), cov(0, 0), view.var(static_cast<Eigen::Index>(m)),
                        view.tau2(static_cast<Eigen::Index>(m)), dr);
}

Eigen::MatrixXd woodbury_inverse(const Eigen::MatrixXd& a_inv, const Eigen::VectorXd& delta,
                                 const Eigen::VectorXd& delta_cand) {
  const Eigen::VectorXd b = (delta - delta_cand).cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd bab = b.asDiagonal() * a_inv * b.asDiagonal();
  const Eigen::MatrixXd middle = bab - Eigen::MatrixXd::Identity(a_inv.rows(), a_inv.cols());
  const Eigen::MatrixXd ab = a_inv * b.asDiagonal();
  return a_inv - ab * middle.partialPivLu().solve(ab.transpose());
}

Eigen::MatrixXd approximate_inverse(const Eigen::MatrixXd& a_inv, const Eigen::VectorXd& delta,
                                    const Eigen::VectorXd& delta_cand) {
  return a_inv + a_inv * (delta - delta_cand).asDiagonal() * a_inv;
}

}  // namespace tailrisk
