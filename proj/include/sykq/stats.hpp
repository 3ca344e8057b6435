#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sykq/types.hpp"

namespace sykq {

/// Time grid plus per-time ensemble mean, standard error and realization
/// count for one observable.
struct EnsembleSeries {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> stderr_;
  long n = 0;
  std::string label;

  std::size_t size() const { return times.size(); }
};

/// Streaming moments of an m-dimensional sample vector observed at each of
/// T grid points: per grid point the mean vector and the full scatter matrix
/// (upper triangle), so any smooth function of ensemble means gets a
/// delta-method variance with all cross-covariances included.  Welford
/// updates; merge() uses the pairwise (parallel-variance) combination and is
/// commutative and associative up to roundoff.
class VectorMoments {
 public:
  VectorMoments() = default;
  VectorMoments(int m, int t);

  int n_series() const { return m_; }
  int n_points() const { return t_; }
  long count() const { return n_; }

  /// sample is an m x T matrix (one row per series).
  void accumulate(const Eigen::MatrixXd& sample);

  static VectorMoments merged(const VectorMoments& a, const VectorMoments& b);

  double mean_at(int series, int t) const { return mean_(series, t); }
  /// Unbiased covariance of per-realization values between two series.
  double sample_cov(int a, int b, int t) const;
  /// Standard error of the ensemble mean; 0 by convention for n = 1.
  double stderr_of_mean(int series, int t) const;
  /// Covariance of the two ensemble means (sample_cov / n).
  double cov_of_means(int a, int b, int t) const;

  const Eigen::MatrixXd& means() const { return mean_; }

  /// Delta-method variance of f(means) at grid point t for the gradient g
  /// (length m): g^T Cov(means) g.
  double delta_variance(const Eigen::VectorXd& grad, int t) const;

  bool exact_equal(const VectorMoments& o) const;

 private:
  int m_ = 0;
  int t_ = 0;
  long n_ = 0;
  Eigen::MatrixXd mean_;  // m x T
  Eigen::MatrixXd m2_;    // packed upper triangle: row pair_index(a,b), col t

  int pair_index(int a, int b) const;  // a <= b
};

}  // namespace sykq
