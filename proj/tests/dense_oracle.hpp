#pragma once

// Test-only dense oracles: operators are assembled from literal 2x2 matrices
// with Kronecker products (site 1 leftmost), independently of the bitmask
// kernels under test.

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "sykq/pauli.hpp"

namespace dense_oracle {

using Cplx = std::complex<double>;

inline Eigen::Matrix2cd letter_matrix(sykq::Pauli p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case sykq::Pauli::I:
      m << 1, 0, 0, 1;
      break;
    case sykq::Pauli::X:
      m << 0, 1, 1, 0;
      break;
    case sykq::Pauli::Y:
      m << Cplx(0, 0), Cplx(0, -1), Cplx(0, 1), Cplx(0, 0);
      break;
    default:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return r;
}

inline Eigen::MatrixXcd word(const std::vector<sykq::Pauli>& letters) {
  Eigen::MatrixXcd m = letter_matrix(letters.at(0));
  for (std::size_t s = 1; s < letters.size(); ++s) {
    m = kron(m, letter_matrix(letters[s]));
  }
  return m;
}

inline Eigen::MatrixXcd matrix(const sykq::PauliString& p) {
  return p.coefficient() * word(p.letters());
}

inline Eigen::MatrixXcd matrix(const sykq::OperatorSum& o) {
  Eigen::Index dim = Eigen::Index{1} << o.length();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : o.terms()) m += matrix(t);
  return m;
}

/// exp(-i H t) |v> for Hermitian H, via full diagonalization.
inline Eigen::VectorXcd evolve(const Eigen::MatrixXcd& h,
                               const Eigen::VectorXcd& v, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd c = es.eigenvectors().adjoint() * v;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c[i] *= std::exp(Cplx(0, -es.eigenvalues()[i] * t));
  }
  return es.eigenvectors() * c;
}

}  // namespace dense_oracle
