#include "sykq/stats.hpp"

#include <cmath>

namespace sykq {

VectorMoments::VectorMoments(int m, int t) : m_(m), t_(t) {
  mean_ = Eigen::MatrixXd::Zero(m, t);
  m2_ = Eigen::MatrixXd::Zero(m * (m + 1) / 2, t);
}

int VectorMoments::pair_index(int a, int b) const {
  // a <= b; row-major packing of the upper triangle.
  return a * m_ - a * (a - 1) / 2 + (b - a);
}

void VectorMoments::accumulate(const Eigen::MatrixXd& sample) {
  if (sample.rows() != m_ || sample.cols() != t_) {
    throw DimensionError("VectorMoments::accumulate: sample shape mismatch");
  }
  ++n_;
  Eigen::MatrixXd delta = sample - mean_;
  mean_ += delta / static_cast<double>(n_);
  Eigen::MatrixXd delta2 = sample - mean_;
  for (int a = 0; a < m_; ++a) {
    for (int b = a; b < m_; ++b) {
      m2_.row(pair_index(a, b)) +=
          (delta.row(a).array() * delta2.row(b).array()).matrix();
    }
  }
}

VectorMoments VectorMoments::merged(const VectorMoments& a,
                                    const VectorMoments& b) {
  if (a.m_ == 0 || a.n_ == 0) return b;
  if (b.m_ == 0 || b.n_ == 0) return a;
  if (a.m_ != b.m_ || a.t_ != b.t_) {
    throw DimensionError("VectorMoments::merged: shape mismatch");
  }
  VectorMoments r(a.m_, a.t_);
  double na = static_cast<double>(a.n_), nb = static_cast<double>(b.n_);
  double n = na + nb;
  r.n_ = a.n_ + b.n_;
  Eigen::MatrixXd delta = b.mean_ - a.mean_;
  r.mean_ = a.mean_ + delta * (nb / n);
  r.m2_ = a.m2_ + b.m2_;
  double w = na * nb / n;
  for (int x = 0; x < a.m_; ++x) {
    for (int y = x; y < a.m_; ++y) {
      r.m2_.row(r.pair_index(x, y)) +=
          w * (delta.row(x).array() * delta.row(y).array()).matrix();
    }
  }
  return r;
}

double VectorMoments::sample_cov(int a, int b, int t) const {
  if (n_ < 2) return 0.0;
  int lo = std::min(a, b), hi = std::max(a, b);
  return m2_(pair_index(lo, hi), t) / static_cast<double>(n_ - 1);
}

double VectorMoments::stderr_of_mean(int series, int t) const {
  if (n_ < 2) return 0.0;
  double v = sample_cov(series, series, t) / static_cast<double>(n_);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

double VectorMoments::cov_of_means(int a, int b, int t) const {
  if (n_ < 2) return 0.0;
  return sample_cov(a, b, t) / static_cast<double>(n_);
}

double VectorMoments::delta_variance(const Eigen::VectorXd& grad,
                                     int t) const {
  if (grad.size() != m_) {
    throw DimensionError("delta_variance: gradient length mismatch");
  }
  if (n_ < 2) return 0.0;
  double acc = 0.0;
  for (int a = 0; a < m_; ++a) {
    if (grad[a] == 0.0) continue;
    for (int b = 0; b < m_; ++b) {
      if (grad[b] == 0.0) continue;
      acc += grad[a] * grad[b] * cov_of_means(a, b, t);
    }
  }
  return acc > 0.0 ? acc : 0.0;
}

bool VectorMoments::exact_equal(const VectorMoments& o) const {
  return m_ == o.m_ && t_ == o.t_ && n_ == o.n_ && mean_ == o.mean_ &&
         m2_ == o.m2_;
}

}  // namespace sykq
