#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sykq/types.hpp"

namespace sykq {

using Complex = std::complex<double>;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Coefficients produced by Jordan-Wigner algebra are of the form
/// m * sqrt(2)^r with m a dyadic-rational complex number.  Keeping the
/// sqrt(2) power separate makes products of an even number of 1/sqrt(2)
/// factors exact, which the algebra checks rely on.  Canonical form has
/// root2 in {0, 1}; even powers are folded into the mantissa via ldexp.
struct Coefficient {
  Complex mant{1.0, 0.0};
  int root2 = 0;  // value = mant * sqrt(2)^root2

  static Coefficient from(Complex value) { return Coefficient{value, 0}; }
  static Coefficient sqrt2_pow(int k) { return canonical(Complex{1.0, 0.0}, k); }
  static Coefficient canonical(Complex m, int r);

  Complex value() const;
  Coefficient times(const Coefficient& o) const {
    return canonical(mant * o.mant, root2 + o.root2);
  }
  Coefficient times(Complex s) const { return canonical(mant * s, root2); }
  Coefficient conj() const { return Coefficient{std::conj(mant), root2}; }
  bool exact_equal(const Coefficient& o) const {
    return mant == o.mant && root2 == o.root2;
  }
};

/// One L-site Pauli word with a complex coefficient.  Letters are stored in
/// the symplectic (x, z) bit form: site i (1-based) lives at bit L - i, so
/// site 1 is the most significant bit and the computational basis index
/// enumerates |up...up>, ..., |down...down> in the usual binary order with
/// bit value 1 meaning down.  Z|up> = +|up>.
class PauliString {
 public:
  PauliString() = default;
  /// Identity word of the given length, coefficient 1.
  explicit PauliString(int length);
  PauliString(int length, std::uint64_t x_mask, std::uint64_t z_mask,
              Coefficient coeff);
  PauliString(const std::vector<Pauli>& letters, Complex coeff);

  static PauliString single(int length, int site, Pauli p, Complex coeff = 1.0);

  int length() const { return length_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  const Coefficient& coeff() const { return coeff_; }
  Complex coefficient() const { return coeff_.value(); }

  Pauli letter(int site) const;          // site in [1, L]
  std::vector<Pauli> letters() const;
  int bit_of_site(int site) const { return length_ - site; }

  PauliString with_coefficient(Complex c) const;
  PauliString scaled(Complex s) const;
  PauliString scaled(const Coefficient& s) const;
  PauliString adjoint() const;  // canonical words are Hermitian: conjugate coeff

  /// Same letter pattern (coefficient ignored).
  bool same_pattern(const PauliString& o) const {
    return length_ == o.length_ && x_ == o.x_ && z_ == o.z_;
  }
  bool exact_equal(const PauliString& o) const {
    return same_pattern(o) && coeff_.exact_equal(o.coeff_);
  }
  bool is_identity_pattern() const { return x_ == 0 && z_ == 0; }

  std::string str() const;

 private:
  int length_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  Coefficient coeff_{};
};

/// Sitewise product a*b with the phase folded into the coefficient.
PauliString multiply(const PauliString& a, const PauliString& b);
inline PauliString operator*(const PauliString& a, const PauliString& b) {
  return multiply(a, b);
}

/// Sum of Pauli words with distinct letter patterns (merged on insertion).
/// An empty sum is the zero-operator sentinel.
class OperatorSum {
 public:
  OperatorSum() = default;
  explicit OperatorSum(int length) : length_(length) {}
  explicit OperatorSum(const PauliString& s);

  static OperatorSum zero(int length) { return OperatorSum(length); }

  int length() const { return length_; }
  bool is_zero() const;
  std::size_t term_count() const { return terms_.size(); }

  void add(const PauliString& s);
  void add(const OperatorSum& o);
  void subtract(const OperatorSum& o);

  OperatorSum scaled(Complex s) const;
  OperatorSum adjoint() const;

  /// Largest |imag(coefficient)|; exactly 0 for every Hamiltonian this
  /// package builds (canonical words are Hermitian).
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 0.0) const;

  /// Terms in a deterministic order with dust (|coeff| < merge_epsilon)
  /// dropped.  The zero operator yields an empty vector.
  std::vector<PauliString> terms() const;

  /// Sum of |coefficient| over terms: an upper bound for the spectral norm.
  double one_norm() const;

  Eigen::MatrixXcd to_dense() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;

  bool exact_equal(const OperatorSum& o) const;
  std::string str() const;

  static constexpr double merge_epsilon = 1e-14;

 private:
  struct Entry {
    std::uint64_t x, z;
    Coefficient c;
  };
  int length_ = 0;
  std::vector<Entry> terms_;  // kept sorted by (z, x), unique patterns

  int find(std::uint64_t x, std::uint64_t z) const;
  void insert(std::uint64_t x, std::uint64_t z, const Coefficient& c);
};

OperatorSum multiply(const OperatorSum& a, const OperatorSum& b);
OperatorSum anticommutator(const PauliString& a, const PauliString& b);
OperatorSum commutator(const OperatorSum& h, const OperatorSum& o);

/// Apply one Pauli word to a dense amplitude vector (dim = 2^L).
void apply_pauli(const PauliString& p, const Eigen::VectorXcd& in,
                 Eigen::VectorXcd& out_accum);

/// <v|P|v> without materializing P|v>.
Complex pauli_expectation(const PauliString& p, const Eigen::VectorXcd& v);

Eigen::MatrixXcd pauli_to_dense(const PauliString& p);

}  // namespace sykq
