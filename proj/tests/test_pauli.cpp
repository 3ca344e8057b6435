#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>

#include "dense_oracle.hpp"
#include "sykq/pauli.hpp"

using namespace sykq;
using dense_oracle::matrix;

namespace {

PauliString word(int L, std::initializer_list<std::pair<int, Pauli>> letters,
                 Complex coeff = 1.0) {
  PauliString s(L);
  for (auto [site, p] : letters) s = multiply(s, PauliString::single(L, site, p));
  return s.scaled(coeff);
}

std::vector<PauliString> all_unit_words(int L) {
  std::vector<PauliString> out;
  int n = 1;
  for (int i = 0; i < L; ++i) n *= 4;
  for (int code = 0; code < n; ++code) {
    std::vector<Pauli> letters;
    int c = code;
    for (int s = 0; s < L; ++s) {
      letters.push_back(static_cast<Pauli>(c % 4));
      c /= 4;
    }
    out.emplace_back(letters, 1.0);
  }
  return out;
}

}  // namespace

TEST_CASE("single-site products follow the cyclic rule") {
  auto x = PauliString::single(1, 1, Pauli::X);
  auto y = PauliString::single(1, 1, Pauli::Y);
  auto z = PauliString::single(1, 1, Pauli::Z);
  auto xy = multiply(x, y);
  CHECK(xy.letter(1) == Pauli::Z);
  CHECK(xy.coefficient() == Complex{0.0, 1.0});
  auto zz = multiply(z, z);
  CHECK(zz.is_identity_pattern());
  CHECK(zz.coefficient() == Complex{1.0, 0.0});
}

TEST_CASE("product with sqrt2 coefficients matches the dense oracle at L=2") {
  // (1/sqrt2 X_1) * (1/sqrt2 Z_1 X_2) = -i/2 Y_1 X_2
  auto a = PauliString::single(2, 1, Pauli::X).scaled(Coefficient::sqrt2_pow(-1));
  auto b = word(2, {{1, Pauli::Z}, {2, Pauli::X}})
               .scaled(Coefficient::sqrt2_pow(-1));
  auto prod = multiply(a, b);
  CHECK(prod.letter(1) == Pauli::Y);
  CHECK(prod.letter(2) == Pauli::X);
  CHECK(prod.coefficient() == Complex{0.0, -0.5});
  CHECK((matrix(prod) - matrix(a) * matrix(b)).norm() < 1e-14);
}

TEST_CASE("length mismatch is a dimension error") {
  auto a = PauliString::single(2, 1, Pauli::X);
  auto b = PauliString::single(3, 1, Pauli::X);
  CHECK_THROWS_AS(multiply(a, b), DimensionError);
}

TEST_CASE("anticommutators of the standard examples") {
  auto x1 = PauliString::single(2, 1, Pauli::X);
  auto y1 = PauliString::single(2, 1, Pauli::Y);
  auto y2 = PauliString::single(2, 2, Pauli::Y);
  CHECK(anticommutator(x1, y1).is_zero());

  auto xx = anticommutator(x1, x1);
  REQUIRE(xx.terms().size() == 1);
  CHECK(xx.terms()[0].is_identity_pattern());
  CHECK(xx.terms()[0].coefficient() == Complex{2.0, 0.0});

  auto cross = anticommutator(x1, y2);
  REQUIRE(cross.terms().size() == 1);
  CHECK(cross.terms()[0].letter(1) == Pauli::X);
  CHECK(cross.terms()[0].letter(2) == Pauli::Y);
  CHECK(cross.terms()[0].coefficient() == Complex{2.0, 0.0});
}

TEST_CASE("commutator identities") {
  OperatorSum h(1);
  h.add(PauliString::single(1, 1, Pauli::Z));
  OperatorSum ident(1);
  ident.add(PauliString(1));
  CHECK(commutator(h, ident).is_zero());

  OperatorSum x(1);
  x.add(PauliString::single(1, 1, Pauli::X));
  auto zx = commutator(h, x);
  REQUIRE(zx.terms().size() == 1);
  CHECK(zx.terms()[0].letter(1) == Pauli::Y);
  CHECK(zx.terms()[0].coefficient() == Complex{0.0, 2.0});
}

TEST_CASE("commutator of field sum with XX matches the dense oracle at L=2") {
  OperatorSum h(2);
  h.add(PauliString::single(2, 1, Pauli::Z));
  h.add(PauliString::single(2, 2, Pauli::Z));
  OperatorSum xx(2);
  xx.add(word(2, {{1, Pauli::X}, {2, Pauli::X}}));
  auto comm = commutator(h, xx);

  OperatorSum expected(2);
  expected.add(word(2, {{1, Pauli::Y}, {2, Pauli::X}}, Complex{0.0, 2.0}));
  expected.add(word(2, {{1, Pauli::X}, {2, Pauli::Y}}, Complex{0.0, 2.0}));
  CHECK(comm.exact_equal(expected));

  Eigen::MatrixXcd dense = matrix(h) * matrix(xx) - matrix(xx) * matrix(h);
  CHECK((matrix(comm) - dense).norm() < 1e-14);
}

TEST_CASE("associativity holds exhaustively at L <= 2") {
  for (int L = 1; L <= 2; ++L) {
    auto words = all_unit_words(L);
    for (const auto& a : words) {
      for (const auto& b : words) {
        auto ab = multiply(a, b);
        for (const auto& c : words) {
          CHECK(multiply(ab, c).exact_equal(multiply(a, multiply(b, c))));
        }
      }
    }
  }
}

TEST_CASE("associativity spot checks at L = 3") {
  std::mt19937_64 rng(11);
  auto words = all_unit_words(3);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto& a = words[pick(rng)];
    const auto& b = words[pick(rng)];
    const auto& c = words[pick(rng)];
    CHECK(multiply(multiply(a, b), c).exact_equal(multiply(a, multiply(b, c))));
  }
}

TEST_CASE("phase closure: unit words multiply to coefficients in {1,i,-1,-i}") {
  auto words = all_unit_words(2);
  for (const auto& a : words) {
    for (const auto& b : words) {
      Complex c = multiply(a, b).coefficient();
      bool unit_phase = (c == Complex{1, 0}) || (c == Complex{-1, 0}) ||
                        (c == Complex{0, 1}) || (c == Complex{0, -1});
      CHECK(unit_phase);
    }
  }
}

TEST_CASE("canonical words are Hermitian, so adjoint conjugates coefficients") {
  auto s = word(3, {{1, Pauli::Y}, {3, Pauli::X}}, Complex{0.5, -2.0});
  auto dag = s.adjoint();
  CHECK((matrix(dag) - matrix(s).adjoint()).norm() < 1e-14);

  OperatorSum o(3);
  o.add(s);
  o.add(word(3, {{2, Pauli::Z}}, Complex{0.0, 1.0}));
  CHECK((matrix(o.adjoint()) - matrix(o).adjoint()).norm() < 1e-14);
  CHECK_FALSE(o.is_hermitian());
  OperatorSum herm(3);
  herm.add(word(3, {{1, Pauli::X}, {2, Pauli::Y}}, 0.7));
  CHECK(herm.is_hermitian());
}

TEST_CASE("term merging drops cancelled terms and keeps the zero sentinel") {
  OperatorSum o(2);
  o.add(word(2, {{1, Pauli::X}}, 1.0));
  o.add(word(2, {{1, Pauli::X}}, -1.0));
  CHECK(o.is_zero());
  CHECK(o.terms().empty());
  o.add(word(2, {{1, Pauli::X}}, 0.5));
  CHECK_FALSE(o.is_zero());
  CHECK(o.term_count() == 1);
}

TEST_CASE("apply_to_state: identity and Z sign convention") {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v[3] = 1.0;  // |down,down>
  OperatorSum ident(2);
  ident.add(PauliString(2));
  CHECK((ident.apply(v) - v).norm() == 0.0);

  OperatorSum z1(2);
  z1.add(PauliString::single(2, 1, Pauli::Z));
  CHECK((z1.apply(v) + v).norm() == 0.0);  // Z|down> = -|down>
}

TEST_CASE("apply_to_state matches the dense oracle for random sums at L=3") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  auto words = all_unit_words(3);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  for (int trial = 0; trial < 20; ++trial) {
    OperatorSum o(3);
    for (int t = 0; t < 3; ++t) {
      o.add(words[pick(rng)].scaled(Complex(gauss(rng), gauss(rng))));
    }
    Eigen::VectorXcd v(8);
    for (int i = 0; i < 8; ++i) v[i] = Complex(gauss(rng), gauss(rng));
    v /= v.norm();
    CHECK((o.apply(v) - matrix(o) * v).norm() < 1e-12);
  }
}

TEST_CASE("single words agree with dense matrices elementwise at L <= 4") {
  for (int L = 1; L <= 4; ++L) {
    for (const auto& w : all_unit_words(L)) {
      CHECK((pauli_to_dense(w) - matrix(w)).norm() == 0.0);
    }
  }
}

TEST_CASE("pauli_expectation agrees with the dense quadratic form") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;
  for (const auto& w : all_unit_words(2)) {
    Eigen::VectorXcd v(4);
    for (int i = 0; i < 4; ++i) v[i] = Complex(gauss(rng), gauss(rng));
    v /= v.norm();
    Complex direct = pauli_expectation(w, v);
    Complex dense = (v.adjoint() * matrix(w) * v)(0, 0);
    CHECK(std::abs(direct - dense) < 1e-13);
  }
}
