#include "sykq/majorana.hpp"

#include <cmath>
#include <string>

namespace sykq {

namespace {

PauliString jw_string(int site_j, Parity parity, int L, bool with_z_string) {
  if (site_j < 1 || site_j > L) {
    throw DimensionError("jw map: site index " + std::to_string(site_j) +
                         " out of range [1, " + std::to_string(L) + "]");
  }
  PauliString s(L);
  if (with_z_string) {
    for (int i = 1; i < site_j; ++i) {
      s = multiply(s, PauliString::single(L, i, Pauli::Z));
    }
  }
  Pauli head = (parity == Parity::Odd) ? Pauli::X : Pauli::Y;
  s = multiply(s, PauliString::single(L, site_j, head));
  return s.scaled(Coefficient::sqrt2_pow(-1));
}

}  // namespace

PauliString jw_majorana(int site_j, Parity parity, int L) {
  return jw_string(site_j, parity, L, true);
}

PauliString jw_boson(int site_j, Parity parity, int L) {
  return jw_string(site_j, parity, L, false);
}

PauliString fundamental_pauli(int index_a, int L, Flavor flavor) {
  if (index_a < 1 || index_a > 2 * L) {
    throw DimensionError("fundamental operator index " +
                         std::to_string(index_a) + " out of range [1, " +
                         std::to_string(2 * L) + "]");
  }
  int site = (index_a + 1) / 2;
  Parity parity = (index_a % 2 == 1) ? Parity::Odd : Parity::Even;
  return flavor == Flavor::Fermionic ? jw_majorana(site, parity, L)
                                     : jw_boson(site, parity, L);
}

PauliString monomial_to_pauli(const MajoranaMonomial& m, int L) {
  for (std::size_t i = 0; i < m.indices.size(); ++i) {
    int a = m.indices[i];
    if (a < 1 || a > 2 * L) {
      throw DimensionError("monomial index out of range");
    }
    if (i > 0 && m.indices[i - 1] >= a) {
      throw DimensionError("monomial indices must be strictly increasing");
    }
  }
  PauliString s(L);
  s = s.scaled(m.coeff());
  for (int a : m.indices) s = multiply(s, fundamental_pauli(a, L, m.flavor));
  return s;
}

int operator_size(const SpinOpSpec& op, Flavor flavor) {
  Axis axis = op.axis == Axis::Y ? Axis::X : op.axis;  // y ~ x by symmetry
  if (op.j) {
    if (*op.j <= op.i) {
      throw DimensionError("operator_size: pair requires i < j");
    }
    if (axis == Axis::Z) return 4;
    return flavor == Flavor::Fermionic ? 2 * (*op.j - op.i) : 2;
  }
  if (axis == Axis::Z) return 2;
  return flavor == Flavor::Fermionic ? 2 * op.i - 1 : 1;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    // r holds C(n-k+i-1, i-1); r*(n-k+i) is divisible by i and, for n <= 62,
    // stays below 2^64.
    r = r * static_cast<std::uint64_t>(n - k + i) /
        static_cast<std::uint64_t>(i);
  }
  return r;
}

std::uint64_t space_dimension(int L, int k) {
  if (k < 0 || k > 2 * L) {
    throw DimensionError("space_dimension: k must be in [0, 2L]");
  }
  return binomial(2 * L, k);
}

SpinOpSpec size_representative_spec(int k, int L) {
  if (k < 1 || k > 2 * L - 1) {
    throw DimensionError("size_representative: no representative for k=" +
                         std::to_string(k) + " at L=" + std::to_string(L));
  }
  if (k % 2 == 1) return SpinOpSpec{Axis::X, (k + 1) / 2, std::nullopt};
  return SpinOpSpec{Axis::X, 1, 1 + k / 2};
}

PauliString size_representative(int k, int L) {
  SpinOpSpec spec = size_representative_spec(k, L);
  PauliString s = PauliString::single(L, spec.i, Pauli::X);
  if (spec.j) s = multiply(s, PauliString::single(L, *spec.j, Pauli::X));
  return s;
}

}  // namespace sykq
