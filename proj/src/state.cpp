#include "sykq/state.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace sykq {

StateVector StateVector::from(Eigen::VectorXcd amps, int L) {
  if (amps.size() != (Eigen::Index{1} << L)) {
    throw DimensionError("StateVector: amplitude count must be 2^L");
  }
  StateVector v{std::move(amps), L};
  v.check_norm();
  return v;
}

void StateVector::check_norm(double tol) const {
  double n = norm();
  if (std::abs(n - 1.0) > tol) {
    throw ConvergenceError("state norm drifted to " + std::to_string(n));
  }
}

TimeGrid::TimeGrid(double tmax, int nsteps) : t_max(tmax), n_steps(nsteps) {
  if (!(tmax > 0.0) || nsteps < 1) {
    throw ConfigError("TimeGrid requires t_max > 0 and n_steps >= 1");
  }
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> t(static_cast<std::size_t>(n_points()));
  for (int i = 0; i < n_points(); ++i) t[static_cast<std::size_t>(i)] = time(i);
  return t;
}

StateVector ground_state(Axis a, double omega, int L) {
  if (!(omega > 0.0)) {
    throw ConfigError(
        "ground_state: omega must be positive (the product ground state is "
        "unique only for omega > 0)");
  }
  if (L < 1 || L > 30) {
    throw DimensionError("ground_state: L out of supported range [1, 30]");
  }
  Eigen::Index dim = Eigen::Index{1} << L;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim);
  switch (a) {
    case Axis::Z:
      // Minimize omega * sum Z_i: every site |down>, i.e. the all-ones index.
      amps[dim - 1] = 1.0;
      break;
    case Axis::X: {
      // Every site (|up> - |down>)/sqrt2: amplitude (-1)^{#down} 2^{-L/2}.
      double mag = std::pow(0.5, 0.5 * L);
      for (Eigen::Index b = 0; b < dim; ++b) {
        int downs = std::popcount(static_cast<std::uint64_t>(b));
        amps[b] = (downs & 1) ? -mag : mag;
      }
      break;
    }
    default:
      throw ConfigError("ground_state: axis must be x or z");
  }
  return StateVector{std::move(amps), L};
}

Complex expectation(const StateVector& v, const OperatorSum& o) {
  if (o.length() != v.num_sites) {
    throw DimensionError("expectation: operator/state length mismatch");
  }
  Complex acc{0.0, 0.0};
  for (const auto& p : o.terms()) acc += pauli_expectation(p, v.amplitudes);
  return acc;
}

Complex expectation(const StateVector& v, const PauliString& p) {
  if (p.length() != v.num_sites) {
    throw DimensionError("expectation: operator/state length mismatch");
  }
  return pauli_expectation(p, v.amplitudes);
}

double expectation_real(const StateVector& v, const PauliString& p,
                        double tol) {
  Complex e = expectation(v, p);
  if (std::abs(e.imag()) > tol) {
    throw ConvergenceError(
        "expectation of Hermitian observable has imaginary part " +
        std::to_string(e.imag()));
  }
  return e.real();
}

}  // namespace sykq
