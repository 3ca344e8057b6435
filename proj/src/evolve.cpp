#include "sykq/evolve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <map>

#include <Eigen/Eigenvalues>

#include "sykq/rng.hpp"

namespace sykq {

namespace {

constexpr int kDenseMaxSites = 8;  // dense oracle stays affordable up to 2^8
constexpr std::uint64_t kLanczosSeed = 0x53594b514c414e43ULL;

inline Complex ipow(int e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

CompiledOperator::CompiledOperator(const OperatorSum& op)
    : length_(op.length()), one_norm_(op.one_norm()) {
  if (length_ < 1) throw DimensionError("CompiledOperator: empty operator");
  Eigen::Index d = dim();
  std::map<std::uint64_t, Eigen::VectorXcd> by_flip;
  for (const auto& p : op.terms()) {
    auto [it, inserted] =
        by_flip.try_emplace(p.x_mask(), Eigen::VectorXcd::Zero(d));
    Complex c = p.coefficient() *
                ipow(std::popcount(p.x_mask() & p.z_mask()));
    std::uint64_t z = p.z_mask();
    for (Eigen::Index b = 0; b < d; ++b) {
      it->second[b] +=
          (std::popcount(static_cast<std::uint64_t>(b) & z) & 1) ? -c : c;
    }
  }
  groups_.reserve(by_flip.size());
  for (auto& [flip, diag] : by_flip) {
    groups_.push_back(Group{flip, std::move(diag)});
  }
}

void CompiledOperator::apply(const Eigen::VectorXcd& in,
                             Eigen::VectorXcd& out) const {
  Eigen::Index d = dim();
  if (in.size() != d) throw DimensionError("CompiledOperator::apply: dim");
  out.setZero(d);
  for (const auto& g : groups_) {
    const std::uint64_t flip = g.flip;
    if (flip == 0) {
      out.array() += g.diag.array() * in.array();
      continue;
    }
    const Complex* diag = g.diag.data();
    const Complex* v = in.data();
    Complex* o = out.data();
    for (Eigen::Index b = 0; b < d; ++b) {
      o[static_cast<std::uint64_t>(b) ^ flip] += diag[b] * v[b];
    }
  }
}

Eigen::VectorXcd CompiledOperator::apply(const Eigen::VectorXcd& in) const {
  Eigen::VectorXcd out;
  apply(in, out);
  return out;
}

namespace {

struct LanczosBasis {
  Eigen::MatrixXcd v;       // dim x m orthonormal
  Eigen::VectorXd alpha;    // m
  Eigen::VectorXd beta;     // m (beta[j] couples j and j+1; beta[m-1] is the
                            // residual norm of the next vector)
  int m = 0;
  bool exhausted = false;   // invariant subspace reached
};

/// Lanczos with full reorthogonalization starting from v0 (normalized copy).
LanczosBasis lanczos(const CompiledOperator& op, const Eigen::VectorXcd& v0,
                     int m_max) {
  Eigen::Index d = op.dim();
  int m_cap = static_cast<int>(std::min<Eigen::Index>(m_max, d));
  LanczosBasis b;
  b.v.resize(d, m_cap);
  b.alpha.resize(m_cap);
  b.beta.resize(m_cap);
  b.v.col(0) = v0 / v0.norm();
  Eigen::VectorXcd w(d);
  for (int j = 0; j < m_cap; ++j) {
    op.apply(b.v.col(j), w);
    Complex a = b.v.col(j).dot(w);
    b.alpha[j] = a.real();
    w -= b.alpha[j] * b.v.col(j);
    if (j > 0) w -= b.beta[j - 1] * b.v.col(j - 1);
    // Two classical Gram-Schmidt sweeps keep the basis orthonormal to
    // machine precision; the extremal estimates and the propagator's
    // unitarity both depend on it.
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXcd overlaps = b.v.leftCols(j + 1).adjoint() * w;
      w -= b.v.leftCols(j + 1) * overlaps;
    }
    double nw = w.norm();
    b.beta[j] = nw;
    b.m = j + 1;
    if (nw < 1e-12 * std::max(1.0, op.one_norm())) {
      b.exhausted = true;
      return b;
    }
    if (j + 1 < m_cap) b.v.col(j + 1) = w / nw;
  }
  return b;
}

Eigen::VectorXcd deterministic_start(Eigen::Index dim, int length) {
  Xoshiro256StarStar rng(kLanczosSeed ^ static_cast<std::uint64_t>(length));
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v[i] = Complex(2.0 * rng.next_unit() - 1.0, 2.0 * rng.next_unit() - 1.0);
  }
  v /= v.norm();
  return v;
}

/// One end of the spectrum via restarted Lanczos.
double extremal_one_end(const CompiledOperator& op, bool largest,
                        double rel_tol, int max_basis, int max_restarts) {
  Eigen::Index d = op.dim();
  Eigen::VectorXcd start = deterministic_start(d, op.length());
  for (int restart = 0; restart < max_restarts; ++restart) {
    LanczosBasis b = lanczos(op, start, max_basis);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(b.m, b.m);
    for (int j = 0; j < b.m; ++j) {
      t(j, j) = b.alpha[j];
      if (j + 1 < b.m) {
        t(j, j + 1) = b.beta[j];
        t(j + 1, j) = b.beta[j];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    int idx = largest ? b.m - 1 : 0;
    double theta = es.eigenvalues()[idx];
    Eigen::VectorXd ritz = es.eigenvectors().col(idx);
    double residual =
        b.exhausted ? 0.0 : b.beta[b.m - 1] * std::abs(ritz[b.m - 1]);
    double scale = std::max(es.eigenvalues()[b.m - 1] - es.eigenvalues()[0],
                            std::abs(theta));
    if (scale == 0.0) scale = 1.0;
    if (b.exhausted || residual <= rel_tol * scale) return theta;
    start = b.v.leftCols(b.m) * ritz.cast<Complex>();
  }
  throw ConvergenceError(
      "extremal_eigenvalues: Lanczos failed to converge within restart "
      "budget");
}

}  // namespace

ExtremalEigenvalues extremal_eigenvalues(const CompiledOperator& op,
                                         double rel_tol, int max_basis,
                                         int max_restarts) {
  // Converge each end a bit tighter than requested so the spread meets the
  // requested relative accuracy.
  double tol = 0.25 * rel_tol;
  double hi = extremal_one_end(op, true, tol, max_basis, max_restarts);
  double lo = extremal_one_end(op, false, tol, max_basis, max_restarts);
  return ExtremalEigenvalues{lo, hi};
}

Propagator::Propagator(const OperatorSum& h, PropagatorMethod method,
                       double tol)
    : length_(h.length()), tol_(tol), compiled_(h) {
  if (!h.is_hermitian(1e-12 * std::max(1.0, h.one_norm()))) {
    throw ConfigError("Propagator: Hamiltonian is not Hermitian");
  }
  bool use_dense = method == PropagatorMethod::Dense ||
                   (method == PropagatorMethod::Auto && length_ <= kDenseMaxSites);
  if (use_dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_dense());
    if (es.info() != Eigen::Success) {
      throw ConvergenceError("Propagator: dense eigendecomposition failed");
    }
    dense_ = std::make_unique<DenseDecomp>(
        DenseDecomp{es.eigenvalues(), es.eigenvectors()});
  }
}

Eigen::VectorXcd Propagator::dense_evolve(const Eigen::VectorXcd& v,
                                          double t) const {
  Eigen::VectorXcd coeffs = dense_->eigenvectors.adjoint() * v;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    coeffs[i] *= std::exp(Complex(0.0, -dense_->eigenvalues[i] * t));
  }
  return dense_->eigenvectors * coeffs;
}

Eigen::VectorXcd Propagator::krylov_evolve(const Eigen::VectorXcd& v, double t,
                                           double tol) const {
  if (t == 0.0) return v;
  constexpr int kMaxBasis = 30;
  const double hnorm = std::max(compiled_.one_norm(), 1e-12);
  double remaining = t;
  double step = (std::abs(t) < 2.0 / hnorm) ? t
                : std::copysign(2.0 / hnorm, t);
  Eigen::VectorXcd cur = v;
  int guard = 0;
  while (remaining != 0.0) {
    if (++guard > 100000) {
      throw ConvergenceError("krylov_evolve: substep budget exhausted");
    }
    if (std::abs(step) > std::abs(remaining)) step = remaining;
    LanczosBasis b = lanczos(compiled_, cur, kMaxBasis);
    Eigen::MatrixXd tm = Eigen::MatrixXd::Zero(b.m, b.m);
    for (int j = 0; j < b.m; ++j) {
      tm(j, j) = b.alpha[j];
      if (j + 1 < b.m) {
        tm(j, j + 1) = b.beta[j];
        tm(j + 1, j) = b.beta[j];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tm);
    double beta0 = cur.norm();
    auto small_exp = [&](double tau) {
      Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(b.m);
      e1[0] = beta0;
      Eigen::VectorXcd y = es.eigenvectors().transpose().cast<Complex>() * e1;
      for (int i = 0; i < b.m; ++i) {
        y[i] *= std::exp(Complex(0.0, -es.eigenvalues()[i] * tau));
      }
      return (es.eigenvectors().cast<Complex>() * y).eval();
    };
    double tau = step;
    double tol_here = tol * std::abs(tau) / std::abs(t);
    for (;;) {
      Eigen::VectorXcd u = small_exp(tau);
      double err = b.exhausted ? 0.0 : b.beta[b.m - 1] * std::abs(u[b.m - 1]);
      if (err <= tol_here || b.exhausted) {
        cur = b.v.leftCols(b.m) * u;
        remaining -= tau;
        // Grow the step again if the estimate was very comfortable.
        if (err < 0.1 * tol_here) step = tau * 1.5;
        else step = tau;
        break;
      }
      tau *= 0.5;
      tol_here = tol * std::abs(tau) / std::abs(t);
      if (std::abs(tau) < 1e-9 * std::abs(t)) {
        throw ConvergenceError(
            "krylov_evolve: step size collapsed without reaching tolerance");
      }
    }
  }
  return cur;
}

StateVector Propagator::evolve(const StateVector& v, double t) const {
  if (v.num_sites != length_) {
    throw DimensionError("Propagator::evolve: state length mismatch");
  }
  v.check_norm();
  Eigen::VectorXcd out =
      dense_ ? dense_evolve(v.amplitudes, t)
             : krylov_evolve(v.amplitudes, t, tol_);
  StateVector result{std::move(out), length_};
  double drift = std::abs(result.norm() - 1.0);
  if (drift > 1e-8) {
    throw ConvergenceError("Propagator: norm drift " + std::to_string(drift) +
                           " signals propagator failure");
  }
  return result;
}

void Propagator::trajectory(
    const StateVector& v0, const TimeGrid& grid,
    const std::function<void(int, const StateVector&)>& visit) const {
  if (v0.num_sites != length_) {
    throw DimensionError("Propagator::trajectory: state length mismatch");
  }
  v0.check_norm();
  if (dense_) {
    // Each point straight from t = 0; no error accumulation.
    Eigen::VectorXcd coeffs0 = dense_->eigenvectors.adjoint() * v0.amplitudes;
    Eigen::VectorXcd coeffs(coeffs0.size());
    for (int i = 0; i < grid.n_points(); ++i) {
      double t = grid.time(i);
      for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
        coeffs[j] = coeffs0[j] * std::exp(Complex(0.0, -dense_->eigenvalues[j] * t));
      }
      StateVector s{dense_->eigenvectors * coeffs, length_};
      visit(i, s);
    }
    return;
  }
  StateVector cur = v0;
  visit(0, cur);
  double step_tol = tol_ / grid.n_steps;
  for (int i = 1; i < grid.n_points(); ++i) {
    cur.amplitudes = krylov_evolve(cur.amplitudes, grid.dt(), step_tol);
    double drift = std::abs(cur.norm() - 1.0);
    if (drift > 1e-8) {
      throw ConvergenceError("trajectory: norm drift " + std::to_string(drift));
    }
    visit(i, cur);
  }
}

StateVector evolve(const StateVector& v, const OperatorSum& h, double t,
                   double tol, PropagatorMethod method) {
  Propagator prop(h, method, tol);
  return prop.evolve(v, t);
}

double bandwidth(const OperatorSum& h, PropagatorMethod method,
                 double rel_tol) {
  if (h.is_zero()) {
    throw ConfigError("bandwidth: zero operator has zero bandwidth");
  }
  if (!h.is_hermitian(1e-12 * std::max(1.0, h.one_norm()))) {
    throw ConfigError("bandwidth: operator is not Hermitian");
  }
  bool use_dense = method == PropagatorMethod::Dense ||
                   (method == PropagatorMethod::Auto &&
                    h.length() <= kDenseMaxSites);
  if (use_dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_dense());
    if (es.info() != Eigen::Success) {
      throw ConvergenceError("bandwidth: dense eigendecomposition failed");
    }
    const auto& ev = es.eigenvalues();
    return ev[ev.size() - 1] - ev[0];
  }
  CompiledOperator op(h);
  return extremal_eigenvalues(op, rel_tol).spread();
}

}  // namespace sykq
