#include "sykq/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sykq {

double PeakMatrix::coefficient_of_variation() const {
  double sum = 0.0, sum2 = 0.0;
  long cnt = 0;
  for (int i = 1; i <= L; ++i) {
    for (int j = i + 1; j <= L; ++j) {
      double v = values(i, j);
      sum += v;
      sum2 += v * v;
      ++cnt;
    }
  }
  double mean = sum / static_cast<double>(cnt);
  double var = sum2 / static_cast<double>(cnt) - mean * mean;
  return mean != 0.0 ? std::sqrt(std::max(var, 0.0)) / std::abs(mean)
                     : std::numeric_limits<double>::infinity();
}

std::pair<int, int> PeakMatrix::argmax() const {
  std::pair<int, int> best{1, 2};
  double best_v = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= L; ++i) {
    for (int j = i + 1; j <= L; ++j) {
      if (values(i, j) > best_v) {
        best_v = values(i, j);
        best = {i, j};
      }
    }
  }
  return best;
}

PeakInfo refined_peak(const std::vector<double>& times,
                      const std::vector<double>& values) {
  if (times.size() != values.size() || values.empty()) {
    throw DimensionError("refined_peak: empty or mismatched series");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw ConvergenceError("refined_peak: non-finite series value");
    }
  }
  std::size_t m = static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
  PeakInfo info{values[m], times[m], static_cast<int>(m)};
  if (m == 0 || m + 1 == values.size()) return info;
  double ym = values[m - 1], y0 = values[m], yp = values[m + 1];
  double denom = ym - 2.0 * y0 + yp;
  if (denom >= 0.0) return info;  // not a strict local max shape
  double delta = 0.5 * (ym - yp) / denom;  // vertex offset in grid units
  double dt = times[m + 1] - times[m];
  info.value = y0 - 0.25 * (ym - yp) * delta;
  info.time = times[m] + delta * dt;
  return info;
}

namespace {

/// chi_ij mean and delta-method stderr from the moment store.
void chi_pair_into(const EnsembleData& data, int i, int j,
                   std::vector<double>& mean, std::vector<double>& se) {
  const auto& mom = data.moments;
  int rp = data.layout.row_of_pair(i, j);
  int ri = data.layout.row_of_site(i);
  int rj = data.layout.row_of_site(j);
  int npts = mom.n_points();
  mean.resize(static_cast<std::size_t>(npts));
  se.resize(static_cast<std::size_t>(npts));
  for (int t = 0; t < npts; ++t) {
    double p = mom.mean_at(rp, t);
    double a = mom.mean_at(ri, t);
    double b = mom.mean_at(rj, t);
    mean[static_cast<std::size_t>(t)] = p - a * b;
    // gradient of p - a*b wrt (p, a, b) = (1, -b, -a)
    double var = mom.cov_of_means(rp, rp, t) + b * b * mom.cov_of_means(ri, ri, t) +
                 a * a * mom.cov_of_means(rj, rj, t) -
                 2.0 * b * mom.cov_of_means(rp, ri, t) -
                 2.0 * a * mom.cov_of_means(rp, rj, t) +
                 2.0 * a * b * mom.cov_of_means(ri, rj, t);
    se[static_cast<std::size_t>(t)] = var > 0.0 ? std::sqrt(var) : 0.0;
  }
}

}  // namespace

EnsembleSeries chi_pair(const EnsembleData& data, int i, int j) {
  if (i >= j) throw DimensionError("chi_pair requires i < j");
  if (data.n() < 1) throw ConfigError("chi_pair: empty ensemble");
  EnsembleSeries s;
  s.times = data.cfg.grid.times();
  s.n = data.n();
  s.label = "chi_pair:" + to_string(data.cfg.axis) + ":" + std::to_string(i) +
            ":" + std::to_string(j);
  chi_pair_into(data, i, j, s.mean, s.stderr_);
  return s;
}

EnsembleSeries chi_total(const EnsembleData& data) {
  if (data.n() < 1) throw ConfigError("chi_total: empty ensemble");
  if (data.layout.pair_list.empty()) {
    throw ConfigError("chi_total: no pairs were measured");
  }
  const auto& mom = data.moments;
  int npts = mom.n_points();
  EnsembleSeries s;
  s.times = data.cfg.grid.times();
  s.n = data.n();
  s.label = "chi_total:" + to_string(data.cfg.axis);
  s.mean.assign(static_cast<std::size_t>(npts), 0.0);
  s.stderr_.assign(static_cast<std::size_t>(npts), 0.0);
  // Full gradient of sum_{i<j} (p_ij - m_i m_j) over all raw series.
  Eigen::VectorXd grad(mom.n_series());
  for (int t = 0; t < npts; ++t) {
    grad.setZero();
    double total = 0.0;
    for (const auto& [i, j] : data.layout.pair_list) {
      int rp = data.layout.row_of_pair(i, j);
      int ri = data.layout.row_of_site(i);
      int rj = data.layout.row_of_site(j);
      double a = mom.mean_at(ri, t), b = mom.mean_at(rj, t);
      total += mom.mean_at(rp, t) - a * b;
      grad[rp] += 1.0;
      grad[ri] -= b;
      grad[rj] -= a;
    }
    s.mean[static_cast<std::size_t>(t)] = total;
    double var = mom.delta_variance(grad, t);
    s.stderr_[static_cast<std::size_t>(t)] = std::sqrt(var);
  }
  return s;
}

PeakMatrix peak_matrix(const EnsembleData& data) {
  PeakMatrix pm;
  pm.L = data.cfg.L;
  pm.axis = data.cfg.axis;
  pm.n = data.n();
  pm.values = Eigen::MatrixXd::Zero(pm.L + 1, pm.L + 1);
  auto times = data.cfg.grid.times();
  std::vector<double> mean, se;
  for (const auto& [i, j] : data.layout.pair_list) {
    chi_pair_into(data, i, j, mean, se);
    pm.values(i, j) = refined_peak(times, mean).value;
  }
  return pm;
}

EnsembleSeries return_amplitude(const EnsembleData& data, int k) {
  if (data.n() < 1) throw ConfigError("return_amplitude: empty ensemble");
  int row = data.layout.row_of_size(k);
  EnsembleSeries s = data.raw_series(row, "ret:k=" + std::to_string(k));
  double v0 = s.mean[0];
  if (std::abs(v0) < 1e-12) {
    throw ConfigError(
        "return_amplitude: t=0 expectation vanishes; representative and "
        "ground state are incompatible");
  }
  for (std::size_t t = 0; t < s.size(); ++t) {
    s.mean[t] /= v0;
    s.stderr_[t] /= std::abs(v0);
  }
  return s;
}

EnsembleSeries decay_rate(const EnsembleSeries& series) {
  std::size_t n = series.size();
  if (n < 3) throw DimensionError("decay_rate needs at least 3 grid points");
  EnsembleSeries d = series;
  d.label = "decay:" + series.label;
  for (std::size_t t = 0; t < n; ++t) {
    double slope, sigma;
    if (t == 0) {
      double h = series.times[1] - series.times[0];
      slope = (series.mean[1] - series.mean[0]) / h;
      sigma = std::hypot(series.stderr_[1], series.stderr_[0]) / h;
    } else if (t + 1 == n) {
      double h = series.times[n - 1] - series.times[n - 2];
      slope = (series.mean[n - 1] - series.mean[n - 2]) / h;
      sigma = std::hypot(series.stderr_[n - 1], series.stderr_[n - 2]) / h;
    } else {
      double h2 = series.times[t + 1] - series.times[t - 1];
      slope = (series.mean[t + 1] - series.mean[t - 1]) / h2;
      sigma = std::hypot(series.stderr_[t + 1], series.stderr_[t - 1]) / h2;
    }
    d.mean[t] = std::abs(slope);
    d.stderr_[t] = sigma;
  }
  return d;
}

std::map<double, double> saturation_curve(const EnsembleData& data) {
  int L = data.cfg.L;
  auto max_rate = [&](int k) {
    EnsembleSeries d = decay_rate(return_amplitude(data, k));
    return refined_peak(d.times, d.mean).value;
  };
  for (int k = 1; k <= L; ++k) data.layout.row_of_size(k);  // throws if missing
  double denom = max_rate(L);
  if (denom <= 0.0) {
    throw ConvergenceError("saturation_curve: D_L has no positive maximum");
  }
  std::map<double, double> curve;
  for (int k = 1; k <= L; ++k) {
    curve[static_cast<double>(k) / L] = max_rate(k) / denom;
  }
  return curve;
}

double saturating_k_rel(const std::map<double, double>& curve,
                        double threshold) {
  for (const auto& [k_rel, r] : curve) {
    if (r >= threshold) return k_rel;
  }
  return 1.0;
}

Chi1LDiagnostic chi_1L_diagnostic(const EnsembleData& data) {
  if (data.cfg.grid.n_points() < 8) {
    throw ConfigError("chi_1L_diagnostic: grid too short for a late window");
  }
  Chi1LDiagnostic diag;
  diag.series = chi_pair(data, 1, data.cfg.L);
  diag.peak_height = refined_peak(diag.series.times, diag.series.mean).value;
  std::size_t n = diag.series.size();
  std::size_t start = n - n / 4;
  double acc = 0.0;
  for (std::size_t t = start; t < n; ++t) {
    acc += diag.series.mean[t] * diag.series.mean[t];
  }
  diag.late_noise_amplitude = std::sqrt(acc / static_cast<double>(n - start));
  diag.ratio = diag.late_noise_amplitude > 0.0
                   ? diag.peak_height / diag.late_noise_amplitude
                   : std::numeric_limits<double>::infinity();
  return diag;
}

FitResult fit_powers(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<int>& exponents,
                     const std::vector<double>& sigma) {
  std::size_t n = x.size();
  std::size_t p = exponents.size();
  if (y.size() != n || (!sigma.empty() && sigma.size() != n)) {
    throw DimensionError("fit_powers: input length mismatch");
  }
  if (n < p) {
    throw ConfigError("fit_powers: rank-deficient design (need >= " +
                      std::to_string(p) + " points)");
  }
  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd rhs(n);
  for (std::size_t r = 0; r < n; ++r) {
    double w = sigma.empty() ? 1.0 : 1.0 / sigma[r];
    if (!std::isfinite(w) || w <= 0.0) {
      throw ConfigError("fit_powers: nonpositive sigma weight");
    }
    for (std::size_t c = 0; c < p; ++c) {
      design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          w * std::pow(x[r], exponents[c]);
    }
    rhs[static_cast<Eigen::Index>(r)] = w * y[r];
  }
  Eigen::MatrixXd gram = design.transpose() * design;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw ConfigError("fit_powers: rank-deficient design matrix");
  }
  Eigen::VectorXd coef = ldlt.solve(design.transpose() * rhs);
  Eigen::VectorXd resid = rhs - design * coef;
  Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
  if (sigma.empty()) {
    // Residual-based variance estimate when no per-point sigma is known.
    double dof = static_cast<double>(n - p);
    double s2 = dof > 0.0 ? resid.squaredNorm() / dof : 0.0;
    cov *= s2;
  }
  FitResult fr;
  fr.exponents = exponents;
  fr.residual_norm = resid.norm();
  for (std::size_t c = 0; c < p; ++c) {
    fr.coefficients.push_back(coef[static_cast<Eigen::Index>(c)]);
    double v = cov(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c));
    fr.stderrs.push_back(v > 0.0 ? std::sqrt(v) : 0.0);
  }
  return fr;
}

FitResult fit_peak_scaling(Axis axis, const std::vector<double>& L_values,
                           const std::vector<double>& peaks,
                           const std::vector<double>& sigma) {
  if (L_values.size() < 4) {
    throw ConfigError("fit_peak_scaling: need at least 4 distinct L values");
  }
  std::vector<int> exps =
      axis == Axis::X ? std::vector<int>{2, 0} : std::vector<int>{1, 0};
  return fit_powers(L_values, peaks, exps, sigma);
}

bool has_single_dominant_peak(const EnsembleSeries& s, double band_factor) {
  std::size_t n = s.size();
  if (n < 8) throw DimensionError("has_single_dominant_peak: series too short");
  std::size_t start = n - n / 4;
  double acc = 0.0;
  for (std::size_t t = start; t < n; ++t) acc += s.mean[t] * s.mean[t];
  double late = std::sqrt(acc / static_cast<double>(n - start));
  std::size_t gmax = static_cast<std::size_t>(
      std::max_element(s.mean.begin(), s.mean.end()) - s.mean.begin());
  if (gmax == 0 || gmax + 1 == n) return false;
  if (s.mean[gmax] <= band_factor * late) return false;
  for (std::size_t t = 1; t + 1 < n; ++t) {
    if (t == gmax) continue;
    bool local_max = s.mean[t] >= s.mean[t - 1] && s.mean[t] >= s.mean[t + 1];
    if (local_max && s.mean[t] > band_factor * late) return false;
  }
  return true;
}

std::optional<double> time_to_level(const EnsembleSeries& s, double level) {
  for (std::size_t t = 1; t < s.size(); ++t) {
    if (s.mean[t - 1] >= level && s.mean[t] < level) {
      double frac = (s.mean[t - 1] - level) / (s.mean[t - 1] - s.mean[t]);
      return s.times[t - 1] + frac * (s.times[t] - s.times[t - 1]);
    }
  }
  return std::nullopt;
}

}  // namespace sykq
