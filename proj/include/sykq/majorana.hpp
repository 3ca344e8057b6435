#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sykq/pauli.hpp"
#include "sykq/types.hpp"

namespace sykq {

/// gamma^{2j-1} = (1/sqrt2) (prod_{i<j} Z_i) X_j,
/// gamma^{2j}   = (1/sqrt2) (prod_{i<j} Z_i) Y_j.
PauliString jw_majorana(int site_j, Parity parity, int L);

/// chi^{2j-1} = (1/sqrt2) X_j,  chi^{2j} = (1/sqrt2) Y_j  (no Z-string).
PauliString jw_boson(int site_j, Parity parity, int L);

/// Fundamental operator by linear index a in [1, 2L]; odd a -> (a+1)/2 odd
/// partner, even a -> a/2 even partner.
PauliString fundamental_pauli(int index_a, int L, Flavor flavor);

/// Ordered product of fundamental operators gamma^{i1}...gamma^{iq} (or chi),
/// indices strictly increasing in [1, 2L], with coefficient mant*sqrt(2)^root2.
struct MajoranaMonomial {
  std::vector<int> indices;
  Complex mant{1.0, 0.0};
  int root2 = 0;
  Flavor flavor = Flavor::Fermionic;

  int size() const { return static_cast<int>(indices.size()); }
  Coefficient coeff() const { return Coefficient::canonical(mant, root2); }
};

PauliString monomial_to_pauli(const MajoranaMonomial& m, int L);

/// A single spin operator sigma_i^a or a pair sigma_i^a sigma_j^a (i < j,
/// j = nullopt for singles).
struct SpinOpSpec {
  Axis axis;
  int i;
  std::optional<int> j;
};

/// Size (number of fundamental operators) of the spin operator in the given
/// flavor.  Fermionic: z -> 2, zz -> 4, x at site i -> 2i-1, x_i x_j ->
/// 2|j-i|.  Bosonic: z -> 2, zz -> 4, x -> 1, xx -> 2.  Axis Y is equivalent
/// to X by a global rotation and is mapped to X.
int operator_size(const SpinOpSpec& op, Flavor flavor);

/// dim_k = C(2L, k), the dimension of the space of size-k monomials.
std::uint64_t space_dimension(int L, int k);

/// Exact binomial coefficient (n <= 63 guarded against overflow).
std::uint64_t binomial(int n, int k);

/// Canonical x-family spin operator of fermionic size k:
/// sigma_{(k+1)/2}^x for odd k, sigma_1^x sigma_{1+k/2}^x for even k.
PauliString size_representative(int k, int L);
SpinOpSpec size_representative_spec(int k, int L);

}  // namespace sykq
