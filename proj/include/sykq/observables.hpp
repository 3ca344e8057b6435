#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sykq/ensemble.hpp"
#include "sykq/stats.hpp"
#include "sykq/types.hpp"

namespace sykq {

/// Peak heights P_ij = max_t chi_ij(t) on the strict upper triangle.
struct PeakMatrix {
  int L = 0;
  Axis axis = Axis::Z;
  long n = 0;
  Eigen::MatrixXd values;  // (L+1) x (L+1), valid for 1 <= i < j <= L

  double at(int i, int j) const { return values(i, j); }
  double coefficient_of_variation() const;
  std::pair<int, int> argmax() const;
};

struct PeakInfo {
  double value = 0.0;
  double time = 0.0;
  int grid_index = 0;
};

/// Maximum of a sampled series with 3-point parabolic refinement around the
/// grid argmax (grid-edge maxima are returned unrefined).
PeakInfo refined_peak(const std::vector<double>& times,
                      const std::vector<double>& values);

/// chi_ij^a(t) = mean<s_i s_j> - mean<s_i> mean<s_j>, ensemble averages taken
/// first (the overline placement of the definition).  stderr by the delta
/// method with the full cross-covariance of the three inputs.
EnsembleSeries chi_pair(const EnsembleData& data, int i, int j);

/// sum_{i<j} chi_ij(t) over the measured pairs.
EnsembleSeries chi_total(const EnsembleData& data);

PeakMatrix peak_matrix(const EnsembleData& data);

/// Ensemble mean of <O^k(t)> normalized by its t = 0 value (the series
/// starts at exactly 1).  Throws if the t = 0 mean vanishes.
EnsembleSeries return_amplitude(const EnsembleData& data, int k);

/// D(t) = |d mean/dt|, central differences inside, one-sided at the ends.
EnsembleSeries decay_rate(const EnsembleSeries& series);

/// k/L -> R = max_t D_k / max_t D_L for every measured k in 1..L.
std::map<double, double> saturation_curve(const EnsembleData& data);

/// Smallest k_rel with R >= threshold.
double saturating_k_rel(const std::map<double, double>& curve,
                        double threshold = 0.95);

struct Chi1LDiagnostic {
  EnsembleSeries series;
  double peak_height = 0.0;
  double late_noise_amplitude = 0.0;  // RMS over the final quarter of the grid
  double ratio = 0.0;
};

Chi1LDiagnostic chi_1L_diagnostic(const EnsembleData& data);

/// Weighted least-squares fit of y against powers of x.  With sigmas given,
/// coefficient covariance is (X^T W X)^{-1} (known-variance weighting);
/// otherwise it is scaled by the residual variance.
struct FitResult {
  std::vector<double> coefficients;  // one per exponent
  std::vector<double> stderrs;
  std::vector<int> exponents;
  double residual_norm = 0.0;
};

FitResult fit_powers(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<int>& exponents,
                     const std::vector<double>& sigma = {});

/// Peak-height scaling fit: a=x -> chi_max = a L^2 + b; a=z -> c L + d.
FitResult fit_peak_scaling(Axis axis, const std::vector<double>& L_values,
                           const std::vector<double>& peaks,
                           const std::vector<double>& sigma = {});

/// Interior-maximum shape test: the global maximum is interior and exceeds
/// the late-noise amplitude, and every other interior local maximum stays
/// below band_factor times the late-noise amplitude.
bool has_single_dominant_peak(const EnsembleSeries& s,
                              double band_factor = 3.0);

/// First crossing of the given level from above, linearly interpolated;
/// nullopt when the series never crosses.
std::optional<double> time_to_level(const EnsembleSeries& s, double level);

}  // namespace sykq
