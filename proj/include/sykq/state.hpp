#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sykq/pauli.hpp"
#include "sykq/types.hpp"

namespace sykq {

/// Unit-norm amplitude vector over the 2^L computational basis.  Site 1 is
/// the most significant bit; bit value 1 means spin down (Z = -1).
struct StateVector {
  Eigen::VectorXcd amplitudes;
  int num_sites = 0;

  static StateVector from(Eigen::VectorXcd amps, int L);

  Eigen::Index dim() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
  /// Throws if the norm invariant |1 - ||v||| <= tol is violated.
  void check_norm(double tol = 1e-10) const;
};

/// Uniform grid 0 = t_0 < ... < t_{n_steps} = t_max in bandwidth-normalized
/// time units.
struct TimeGrid {
  double t_max = 20.0;
  int n_steps = 400;

  TimeGrid() = default;
  TimeGrid(double tmax, int nsteps);

  int n_points() const { return n_steps + 1; }
  double dt() const { return t_max / n_steps; }
  double time(int i) const { return t_max * i / n_steps; }
  std::vector<double> times() const;
};

/// Product ground state of omega * sum_i sigma_i^a, omega > 0:
/// a=z -> all sites |down>, a=x -> all sites (|up> - |down>)/sqrt2.
StateVector ground_state(Axis a, double omega, int L);

Complex expectation(const StateVector& v, const OperatorSum& o);
Complex expectation(const StateVector& v, const PauliString& p);

/// Expectation of a Hermitian observable; asserts the imaginary part is
/// below tol and returns the real part.
double expectation_real(const StateVector& v, const PauliString& p,
                        double tol = 1e-10);

}  // namespace sykq
