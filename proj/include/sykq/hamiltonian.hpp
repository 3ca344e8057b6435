#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sykq/evolve.hpp"
#include "sykq/pauli.hpp"
#include "sykq/types.hpp"

namespace sykq {

/// Visit all strictly increasing q-tuples over [1, n] in lexicographic order.
void for_each_tuple(int n, int q,
                    const std::function<void(std::span<const int>)>& fn);

/// Lexicographic rank of a strictly increasing q-tuple over [1, n].
std::size_t tuple_rank(std::span<const int> tuple, int n);

/// Gaussian couplings J_{i1...iq} for one disorder realization, stored per
/// strictly increasing tuple in lexicographic order.  Entry variance is
/// J^2 (q-1)! / (2L)^{q-1}.
struct CouplingTensor {
  int q = 2;
  int L = 2;
  double J = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> entries;

  static CouplingTensor sample(int q, int L, double J, std::uint64_t seed);

  std::size_t expected_count() const;
  double target_variance() const;
  double value(std::span<const int> tuple) const;

  nlohmann::json to_json() const;
  static CouplingTensor from_json(const nlohmann::json& j);
};

/// i^{q/2} sum J gamma...gamma (fermionic) or sum i^{s} J chi...chi
/// (bosonic), as a Pauli operator sum.  The bosonic exponent s counts the
/// same-site index pairs (2m-1, 2m) contained in the tuple; that is the
/// unique reading of the printed sign factor under which every term is
/// Hermitian, and Hermiticity is asserted per build.
OperatorSum build_syk(const CouplingTensor& c, Flavor flavor);

/// omega * sum_i sigma_i^a, a in {x, z}.
OperatorSum build_h0(Axis a, double omega, int L);

/// Pre/post quench pair with the post-quench SYK Hamiltonian rescaled to
/// unit spectral bandwidth.
struct QuenchHamiltonian {
  OperatorSum pre;
  OperatorSum post;  // normalized: spectral range 1
  double bandwidth = 0.0;
  Axis axis = Axis::Z;
  Flavor flavor = Flavor::Fermionic;
  int q = 2;
};

/// H / bandwidth(H); rejects zero bandwidth.
OperatorSum normalize(const OperatorSum& h, double* bandwidth_out = nullptr,
                      PropagatorMethod method = PropagatorMethod::Auto);

QuenchHamiltonian make_quench(const CouplingTensor& c, Flavor flavor, Axis axis,
                              double omega,
                              PropagatorMethod method = PropagatorMethod::Auto);

}  // namespace sykq
