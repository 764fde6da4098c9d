#include "tailrisk/gp/surrogate.hpp"

#include <cmath>
#include <stdexcept>

#include "tailrisk/util/errors.hpp"

namespace tailrisk {

double jittered_cholesky(const Eigen::MatrixXd& a, double scale, Eigen::MatrixXd& lower) {
  const Eigen::Index n = a.rows();
  for (double rel = GpSurrogate::kJitterStart; rel <= GpSurrogate::kJitterMax * 1.0001; rel *= 10.0) {
    const double jitter = rel * scale;
    Eigen::MatrixXd work = a;
    work.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      lower = llt.matrixL();
      if (lower.allFinite() && (n == 0 || lower.diagonal().minCoeff() > 0.0)) return jitter;
    }
  }
  throw NumericalError("covariance matrix not positive definite after jitter escalation");
}

GpSurrogate GpSurrogate::build(KernelSpec kernel, double beta0, TrainingSet data) {
  kernel.validate();
  const auto n = static_cast<Eigen::Index>(data.ids.size());
  if (data.x.rows() != n || data.y.size() != n || data.offset.size() != n || data.noise.size() != n) {
    throw std::invalid_argument("GpSurrogate: training arrays have inconsistent sizes");
  }
  if (n > 0 && static_cast<std::size_t>(data.x.cols()) != kernel.dim()) {
    throw std::invalid_argument("GpSurrogate: dimension mismatch");
  }
  if ((data.noise.array() < 0.0).any()) throw std::invalid_argument("GpSurrogate: negative noise");
  GpSurrogate s;
  s.kernel_ = std::move(kernel);
  s.beta0_ = beta0;
  s.data_ = std::move(data);
  s.factorize();
  return s;
}

void GpSurrogate::factorize() {
  Eigen::MatrixXd a = gram(kernel_, data_.x);
  a.diagonal() += data_.noise;
  jitter_ = jittered_cholesky(a, kernel_.sigma2, chol_);
  refresh_alpha();
}

void GpSurrogate::refresh_alpha() {
  Eigen::VectorXd r = data_.y - data_.offset - Eigen::VectorXd::Constant(data_.y.size(), beta0_);
  alpha_ = solve(r);
}

std::optional<std::size_t> GpSurrogate::position_of(std::size_t id) const {
  for (std::size_t i = 0; i < data_.ids.size(); ++i) {
    if (data_.ids[i] == id) return i;
  }
  return std::nullopt;
}

Eigen::MatrixXd GpSurrogate::solve(const Eigen::MatrixXd& b) const {
  if (chol_.rows() == 0) return Eigen::MatrixXd(0, b.cols());
  Eigen::MatrixXd z = chol_.triangularView<Eigen::Lower>().solve(b);
  chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(z);
  return z;
}

Eigen::VectorXd GpSurrogate::solve_lower(const Eigen::VectorXd& b) const {
  if (chol_.rows() == 0) return Eigen::VectorXd(0);
  return chol_.triangularView<Eigen::Lower>().solve(b);
}

Eigen::MatrixXd GpSurrogate::whitened_cross(const Eigen::MatrixXd& xq) const {
  if (size() == 0) return Eigen::MatrixXd(0, xq.rows());
  Eigen::MatrixXd v = cross_covariance(kernel_, data_.x, xq);
  chol_.triangularView<Eigen::Lower>().solveInPlace(v);
  return v;
}

Posterior GpSurrogate::posterior(const Eigen::MatrixXd& xq, const Eigen::VectorXd& offset_q) const {
  if (offset_q.size() != xq.rows()) throw std::invalid_argument("posterior: offset size mismatch");
  Posterior p;
  p.mean = offset_q.array() + beta0_;
  p.var = Eigen::VectorXd::Constant(xq.rows(), kernel_.sigma2);
  if (size() == 0 || xq.rows() == 0) return p;
  Eigen::MatrixXd k = cross_covariance(kernel_, data_.x, xq);
  p.mean.noalias() += k.transpose() * alpha_;
  chol_.triangularView<Eigen::Lower>().solveInPlace(k);
  p.var -= k.colwise().squaredNorm().transpose();
  p.var = p.var.cwiseMax(0.0);
  return p;
}

Eigen::MatrixXd GpSurrogate::posterior_covariance(const Eigen::MatrixXd& xq) const {
  Eigen::MatrixXd c = gram(kernel_, xq);
  if (size() > 0) {
    const Eigen::MatrixXd v = whitened_cross(xq);
    c.noalias() -= v.transpose() * v;
  }
  c = 0.5 * (c + c.transpose()).eval();
  return c;
}

Eigen::MatrixXd GpSurrogate::posterior_covariance(const Eigen::MatrixXd& xa, const Eigen::MatrixXd& xb) const {
  Eigen::MatrixXd c = cross_covariance(kernel_, xa, xb);
  if (size() > 0) {
    c.noalias() -= whitened_cross(xa).transpose() * whitened_cross(xb);
  }
  return c;
}

GpSurrogate GpSurrogate::with_new_point(std::size_t id, const Eigen::RowVectorXd& x, double y, double offset,
                                        double noise) const {
  if (position_of(id)) throw std::invalid_argument("with_new_point: scenario already in training set");
  if (static_cast<std::size_t>(x.size()) != kernel_.dim()) throw std::invalid_argument("with_new_point: dimension");
  if (!(noise >= 0.0) || !std::isfinite(y)) throw std::invalid_argument("with_new_point: bad observation");

  GpSurrogate s = *this;
  const Eigen::Index n = static_cast<Eigen::Index>(size());
  s.data_.ids.push_back(id);
  s.data_.x.conservativeResize(n + 1, x.size());
  s.data_.x.row(n) = x;
  s.data_.y.conservativeResize(n + 1);
  s.data_.y(n) = y;
  s.data_.offset.conservativeResize(n + 1);
  s.data_.offset(n) = offset;
  s.data_.noise.conservativeResize(n + 1);
  s.data_.noise(n) = noise;
  s.refactored_ = false;

  const Eigen::VectorXd k = cross_covariance(kernel_, data_.x, x);
  const Eigen::VectorXd l = solve_lower(k);
  const double kappa = kernel_.sigma2 + noise + jitter_;
  const double d2 = kappa - l.squaredNorm();
  if (!(d2 > 1e-12 * kappa)) {
    s.factorize();
    s.refactored_ = true;
    return s;
  }
  s.chol_.conservativeResize(n + 1, n + 1);
  s.chol_.row(n).head(n) = l.transpose();
  s.chol_.col(n).head(n).setZero();
  s.chol_(n, n) = std::sqrt(d2);
  s.refresh_alpha();
  return s;
}

GpSurrogate GpSurrogate::with_observation(std::size_t position, double y, double noise) const {
  if (position >= size()) throw std::out_of_range("with_observation: position");
  if (!(noise >= 0.0) || !std::isfinite(y)) throw std::invalid_argument("with_observation: bad observation");
  const auto p = static_cast<Eigen::Index>(position);
  if (data_.y(p) == y && data_.noise(p) == noise) return *this;

  GpSurrogate s = *this;
  s.refactored_ = false;
  const double delta = noise - data_.noise(p);
  s.data_.y(p) = y;
  s.data_.noise(p) = noise;
  if (delta != 0.0) {
    // Rank-one modification A + delta e_p e_p^T; rows above p are untouched.
    const Eigen::Index n = s.chol_.rows();
    const double sign = delta > 0.0 ? 1.0 : -1.0;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    w(p) = std::sqrt(std::abs(delta));
    bool ok = true;
    for (Eigen::Index k = p; k < n && ok; ++k) {
      const double lkk = s.chol_(k, k);
      const double r2 = lkk * lkk + sign * w(k) * w(k);
      if (!(r2 > 1e-14 * lkk * lkk)) {
        ok = false;
        break;
      }
      const double r = std::sqrt(r2);
      const double c = r / lkk;
      const double sn = w(k) / lkk;
      s.chol_(k, k) = r;
      for (Eigen::Index j = k + 1; j < n; ++j) {
        s.chol_(j, k) = (s.chol_(j, k) + sign * sn * w(j)) / c;
        w(j) = c * w(j) - sn * s.chol_(j, k);
      }
    }
    if (!ok) {
      s.factorize();
      s.refactored_ = true;
      return s;
    }
  }
  s.refresh_alpha();
  return s;
}

}  // namespace tailrisk
