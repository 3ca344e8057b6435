#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dense_oracle.hpp"
#include "sykq/hamiltonian.hpp"
#include "sykq/majorana.hpp"
#include "sykq/oracle.hpp"
#include "sykq/pauli.hpp"

using namespace sykq;

TEST_CASE("jw_majorana produces the Z-string words with 1/sqrt2 weight") {
  auto g1 = jw_majorana(1, Parity::Odd, 3);
  CHECK(g1.letter(1) == Pauli::X);
  CHECK(g1.letter(2) == Pauli::I);
  CHECK(g1.coeff().exact_equal(Coefficient::sqrt2_pow(-1)));

  auto g4 = jw_majorana(2, Parity::Even, 3);
  CHECK(g4.letter(1) == Pauli::Z);
  CHECK(g4.letter(2) == Pauli::Y);
  CHECK(g4.letter(3) == Pauli::I);
  CHECK(g4.coeff().exact_equal(Coefficient::sqrt2_pow(-1)));

  CHECK_THROWS_AS(jw_majorana(4, Parity::Odd, 3), DimensionError);
}

TEST_CASE("jw_boson has no Z-string") {
  auto c3 = jw_boson(2, Parity::Odd, 3);
  CHECK(c3.letter(1) == Pauli::I);
  CHECK(c3.letter(2) == Pauli::X);
  CHECK(c3.coeff().exact_equal(Coefficient::sqrt2_pow(-1)));
}

TEST_CASE("Clifford algebra holds exactly and exhaustively at L <= 4") {
  for (int L = 2; L <= 4; ++L) {
    for (int a = 1; a <= 2 * L; ++a) {
      for (int b = 1; b <= 2 * L; ++b) {
        auto anti = anticommutator(fundamental_pauli(a, L, Flavor::Fermionic),
                                   fundamental_pauli(b, L, Flavor::Fermionic));
        if (a == b) {
          auto terms = anti.terms();
          REQUIRE(terms.size() == 1);
          CHECK(terms[0].is_identity_pattern());
          CHECK(terms[0].coefficient() == Complex{1.0, 0.0});  // exact
        } else {
          CHECK(anti.terms().empty());  // exact cancellation
        }
      }
    }
  }
}

TEST_CASE("hard-core boson algebra holds exactly at L <= 4") {
  for (int L = 2; L <= 4; ++L) {
    for (int a = 1; a <= 2 * L; ++a) {
      for (int b = 1; b <= 2 * L; ++b) {
        auto pa = fundamental_pauli(a, L, Flavor::Bosonic);
        auto pb = fundamental_pauli(b, L, Flavor::Bosonic);
        bool same_site = (a + 1) / 2 == (b + 1) / 2;
        if (a == b) {
          auto sq = multiply(pa, pa);
          CHECK(sq.is_identity_pattern());
          CHECK(sq.coefficient() == Complex{0.5, 0.0});
        } else if (same_site) {
          CHECK(anticommutator(pa, pb).terms().empty());
        } else {
          // distinct sites commute
          OperatorSum comm(L);
          comm.add(multiply(pa, pb));
          comm.add(multiply(pb, pa).scaled(-1.0));
          CHECK(comm.terms().empty());
        }
      }
    }
  }
}

TEST_CASE("sigma_z = -2i gamma(2i-1) gamma(2i), exactly") {
  for (int L = 2; L <= 4; ++L) {
    for (int i = 1; i <= L; ++i) {
      MajoranaMonomial m{{2 * i - 1, 2 * i}, Complex{0.0, -2.0}, 0,
                         Flavor::Fermionic};
      CHECK(monomial_to_pauli(m, L).exact_equal(
          PauliString::single(L, i, Pauli::Z)));
    }
  }
}

TEST_CASE("sigma_x recovers from the leading Majorana product, exactly") {
  // sigma_i^x = sqrt2^{2i-1} (-i)^{i-1} gamma^1 ... gamma^{2i-1}
  for (int L = 2; L <= 4; ++L) {
    for (int i = 1; i <= L; ++i) {
      MajoranaMonomial m;
      m.flavor = Flavor::Fermionic;
      for (int p = 1; p <= 2 * i - 1; ++p) m.indices.push_back(p);
      m.root2 = 2 * i - 1;
      Complex phase{1.0, 0.0};
      for (int p = 1; p < i; ++p) phase *= Complex{0.0, -1.0};
      m.mant = phase;
      CHECK(monomial_to_pauli(m, L).exact_equal(
          PauliString::single(L, i, Pauli::X)));
    }
  }
}

TEST_CASE("bosonic monomial [1] with coefficient sqrt2 is X1, exactly") {
  MajoranaMonomial m{{1}, Complex{1.0, 0.0}, 1, Flavor::Bosonic};
  CHECK(monomial_to_pauli(m, 3).exact_equal(
      PauliString::single(3, 1, Pauli::X)));
}

TEST_CASE("monomial index validation") {
  MajoranaMonomial bad{{2, 2}, Complex{1.0, 0.0}, 0, Flavor::Fermionic};
  CHECK_THROWS_AS(monomial_to_pauli(bad, 3), DimensionError);
  MajoranaMonomial out{{7}, Complex{1.0, 0.0}, 0, Flavor::Fermionic};
  CHECK_THROWS_AS(monomial_to_pauli(out, 3), DimensionError);
}

TEST_CASE("operator sizes follow the table") {
  CHECK(operator_size({Axis::Z, 5, {}}, Flavor::Fermionic) == 2);
  CHECK(operator_size({Axis::Z, 2, 7}, Flavor::Fermionic) == 4);
  CHECK(operator_size({Axis::X, 3, {}}, Flavor::Fermionic) == 5);
  CHECK(operator_size({Axis::X, 2, 5}, Flavor::Fermionic) == 6);
  CHECK(operator_size({Axis::Z, 5, {}}, Flavor::Bosonic) == 2);
  CHECK(operator_size({Axis::Z, 2, 7}, Flavor::Bosonic) == 4);
  CHECK(operator_size({Axis::X, 4, {}}, Flavor::Bosonic) == 1);
  CHECK(operator_size({Axis::X, 2, 5}, Flavor::Bosonic) == 2);
  // y maps to x
  CHECK(operator_size({Axis::Y, 3, {}}, Flavor::Fermionic) == 5);
  CHECK_THROWS_AS(operator_size({Axis::X, 3, 2}, Flavor::Fermionic),
                  DimensionError);
}

TEST_CASE("space dimension is the binomial coefficient") {
  CHECK(space_dimension(15, 2) == 435);
  CHECK(space_dimension(15, 0) == 1);
  for (int k = 0; k <= 30; ++k) {
    CHECK(space_dimension(15, k) == space_dimension(15, 30 - k));
  }
  CHECK_THROWS_AS(space_dimension(15, 31), DimensionError);
}

TEST_CASE("size representatives round-trip through operator_size") {
  int L = 8;
  for (int k = 1; k <= 2 * L - 1; ++k) {
    auto spec = size_representative_spec(k, L);
    CHECK(operator_size(spec, Flavor::Fermionic) == k);
  }
  CHECK(size_representative(1, 4).exact_equal(
      PauliString::single(4, 1, Pauli::X)));
  auto k4 = size_representative(4, 4);
  CHECK(k4.letter(1) == Pauli::X);
  CHECK(k4.letter(3) == Pauli::X);
  CHECK_THROWS_AS(size_representative(8, 4), DimensionError);
}

TEST_CASE("SYK2 commutator preserves monomial size exactly (hopping)") {
  for (int L = 2; L <= 4; ++L) {
    for (int k = 1; k <= 2 * L - 1; ++k) {
      // every size-k monomial, not just the leading one
      std::uint32_t mask = 0;
      for_each_tuple(2 * L, k, [&](std::span<const int> t) {
        mask = 0;
        for (int a : t) mask |= 1u << (a - 1);
        auto sizes = nested_commutator_sizes(2, mask, 1, L);
        if (!sizes.empty()) {
          CHECK(sizes == std::set<int>{k});
        }
      });
    }
  }
}

TEST_CASE("SYK4 commutator grows a size-1 monomial into size-3 only") {
  for (int L = 2; L <= 4; ++L) {
    auto sizes = nested_commutator_sizes(4, 1u, 1, L);
    CHECK(sizes == std::set<int>{3});
  }
}
