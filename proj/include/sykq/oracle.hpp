#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "sykq/types.hpp"

namespace sykq {

/// Closed-form Gaussian-averaged nested-commutator coefficients: the size-k
/// return amplitude expands as 1 - c2 (t/D)^2/2 + c4 (t/D)^4/24 + O(t^6) with
/// D the bandwidth used for normalization.  Closed forms exist for q = 2 and
/// the quartic model.
struct ShortTimeCoefficients {
  double c2 = 0.0;
  double c4 = 0.0;
  int q = 2;
  int k = 1;
  int L = 2;
  double J = 1.0;
};

ShortTimeCoefficients short_time_coefficients(int q, int k, int L,
                                              double J = 1.0);

struct ShortTimePrediction {
  double value = 1.0;
  /// True while the quartic term is a small correction to the quadratic one
  /// (|c4 tau^4/24| <= 0.1 |c2 tau^2/2|).
  bool valid = true;
};

ShortTimePrediction predict_return_amplitude(const ShortTimeCoefficients& c,
                                             double bandwidth, double t);

enum class BruteForceMode { WickExact, MonteCarlo };

struct BruteForceResult {
  double c2 = 0.0;
  double c4 = 0.0;
  double c2_stderr = 0.0;  // zero in Wick-exact mode
  double c4_stderr = 0.0;
  long samples = 0;
};

/// The same coefficients computed independently of the closed forms: either
/// by exact symbolic expansion plus Wick moments of the Gaussian couplings
/// (small L), or by sampling coupling tensors and extracting the O^k
/// component of the numeric nested commutators.  O^k is the leading size-k
/// monomial gamma^1...gamma^k.
BruteForceResult brute_force_coefficients(int q, int k, int L,
                                          BruteForceMode mode,
                                          long samples = 100000,
                                          std::uint64_t seed = 0x5eedULL,
                                          int threads = 0,
                                          bool compute_c4 = true);

/// Distinct symbolic terms (coupling monomial, Majorana index set) with a
/// nonzero coefficient in the n-fold nested commutator of the SYK_q
/// Hamiltonian with gamma^1...gamma^k; all coefficients are dyadic so exact
/// cancellations are detected exactly.  Throws BudgetError beyond max_terms.
std::uint64_t count_commutator_terms(int q, int k, int n, int L,
                                     std::size_t max_terms = 3000000);

/// Monomial sizes present in the n-fold nested commutator applied to the
/// monomial with the given index set (bit a-1 = index a).  Exposes the
/// hopping/growth structure exactly.
std::set<int> nested_commutator_sizes(int q, std::uint32_t start_mask, int n,
                                      int L,
                                      std::size_t max_terms = 3000000);

}  // namespace sykq
