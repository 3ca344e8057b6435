#include "sykq/oracle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "sykq/hamiltonian.hpp"
#include "sykq/rng.hpp"

namespace sykq {

namespace {

using Mask = std::uint32_t;
using Cplx = std::complex<double>;

inline Cplx ipow(int e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// gamma_P gamma_Q = sign * 2^{-|P cap Q|} gamma_{P xor Q} under gamma^2=1/2;
/// returns (sign, overlap).
inline std::pair<int, int> product_sign(Mask p, Mask q) {
  int parity = 0;
  Mask rest = q;
  while (rest) {
    int b = std::countr_zero(rest);
    rest &= rest - 1;
    parity ^= std::popcount(p >> (b + 1)) & 1;
  }
  return {parity ? -1 : 1, std::popcount(p & q)};
}

/// [gamma_T, gamma_M] = factor * gamma_{T xor M}; factor 0 when they commute.
inline Cplx commutator_factor(Mask t, Mask m) {
  auto [s1, ov] = product_sign(t, m);
  auto [s2, ov2] = product_sign(m, t);
  (void)ov2;
  if (s1 == s2) return {0.0, 0.0};
  return {std::ldexp(static_cast<double>(2 * s1), -ov), 0.0};
}

std::vector<Mask> all_tuples(int two_l, int q) {
  std::vector<Mask> out;
  for_each_tuple(two_l, q, [&](std::span<const int> t) {
    Mask m = 0;
    for (int a : t) m |= Mask{1} << (a - 1);
    out.push_back(m);
  });
  return out;
}

void check_symbolic_args(int q, int k, int n, int L) {
  if (L < 1 || 2 * L > 16) {
    throw ConfigError("symbolic expansion supports 2L <= 16");
  }
  if (q < 2 || q % 2 != 0 || q > 2 * L) {
    throw ConfigError("q must be even, 2 <= q <= 2L");
  }
  if (k < 1 || k > 2 * L) throw ConfigError("k must be in [1, 2L]");
  if (n < 1 || n > 4) {
    throw ConfigError("nested commutator order must be in [1, 4]");
  }
}

// --- symbolic terms: coupling monomial (multiset of <= 4 tuple masks,
// packed into 64 bits sorted ascending) times a Majorana index set.

struct SymKey {
  std::uint64_t mono;
  Mask mask;
  bool operator==(const SymKey& o) const {
    return mono == o.mono && mask == o.mask;
  }
};

struct SymKeyHash {
  std::size_t operator()(const SymKey& k) const {
    std::uint64_t z =
        k.mono ^ (static_cast<std::uint64_t>(k.mask) * 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

using SymMap = std::unordered_map<SymKey, Cplx, SymKeyHash>;

std::uint64_t mono_insert(std::uint64_t mono, Mask tuple) {
  std::array<std::uint16_t, 4> parts{
      static_cast<std::uint16_t>(mono & 0xFFFF),
      static_cast<std::uint16_t>((mono >> 16) & 0xFFFF),
      static_cast<std::uint16_t>((mono >> 32) & 0xFFFF),
      static_cast<std::uint16_t>((mono >> 48) & 0xFFFF)};
  // Zero means empty slot; valid tuple masks are nonzero.
  std::uint16_t v = static_cast<std::uint16_t>(tuple);
  for (int i = 0; i < 4; ++i) {
    if (parts[i] == 0) {
      parts[i] = v;
      break;
    }
    if (v < parts[i]) std::swap(v, parts[i]);
  }
  return static_cast<std::uint64_t>(parts[0]) |
         (static_cast<std::uint64_t>(parts[1]) << 16) |
         (static_cast<std::uint64_t>(parts[2]) << 32) |
         (static_cast<std::uint64_t>(parts[3]) << 48);
}

/// One commutator action [H, .] on a symbolic term map.
SymMap symbolic_step(const SymMap& in, const std::vector<Mask>& tuples,
                     Cplx prefactor, std::size_t max_terms) {
  SymMap out;
  out.reserve(in.size() * 4);
  for (const auto& [key, coeff] : in) {
    for (Mask t : tuples) {
      Cplx f = commutator_factor(t, key.mask);
      if (f == Cplx{0.0, 0.0}) continue;
      SymKey nk{mono_insert(key.mono, t), key.mask ^ t};
      out[nk] += coeff * prefactor * f;
    }
    if (out.size() > 4 * max_terms) {
      throw BudgetError("symbolic expansion exceeded the term budget");
    }
  }
  // All coefficients are dyadic rationals: cancellation is exact.
  for (auto it = out.begin(); it != out.end();) {
    if (it->second == Cplx{0.0, 0.0}) {
      it = out.erase(it);
    } else {
      ++it;
    }
  }
  if (out.size() > max_terms) {
    throw BudgetError("symbolic expansion exceeded the term budget (" +
                      std::to_string(out.size()) + " terms)");
  }
  return out;
}

/// Gaussian moment of a coupling monomial under independent N(0, var)
/// couplings per canonical tuple: product over distinct tuples of
/// (mult - 1)!! var^{mult/2}, zero for any odd multiplicity.
double gaussian_moment(std::uint64_t mono, double var) {
  std::array<std::uint16_t, 4> parts{
      static_cast<std::uint16_t>(mono & 0xFFFF),
      static_cast<std::uint16_t>((mono >> 16) & 0xFFFF),
      static_cast<std::uint16_t>((mono >> 32) & 0xFFFF),
      static_cast<std::uint16_t>((mono >> 48) & 0xFFFF)};
  double moment = 1.0;
  int i = 0;
  while (i < 4 && parts[i] != 0) {
    int j = i;
    while (j < 4 && parts[j] == parts[i]) ++j;
    int mult = j - i;
    if (mult % 2 != 0) return 0.0;
    // (mult-1)!! * var^{mult/2}: mult is 2 or 4 here.
    moment *= (mult == 2) ? var : 3.0 * var * var;
    i = j;
  }
  return moment;
}

double coupling_variance(int q, int L, double J) {
  double fact = 1.0;
  for (int i = 2; i < q; ++i) fact *= i;
  return J * J * fact / std::pow(2.0 * L, q - 1);
}

Mask leading_mask(int k) { return (Mask{1} << k) - 1; }

/// Exact Wick evaluation of the order-n coefficient of gamma_target in the
/// n-fold averaged nested commutator.
double wick_coefficient(int q, int k, int L, int order) {
  check_symbolic_args(q, k, order, L);
  std::vector<Mask> tuples = all_tuples(2 * L, q);
  Cplx prefactor = ipow(q / 2);
  Mask target = leading_mask(k);
  SymMap terms;
  terms[SymKey{0, target}] = Cplx{1.0, 0.0};
  for (int level = 1; level < order; ++level) {
    terms = symbolic_step(terms, tuples, prefactor, 40000000);
  }
  // Last level lands only on the target mask: the tuple is determined.
  Cplx acc{0.0, 0.0};
  double var = coupling_variance(q, L, 1.0);
  for (const auto& [key, coeff] : terms) {
    Mask t = key.mask ^ target;
    if (std::popcount(t) != q) continue;
    Cplx f = commutator_factor(t, key.mask);
    if (f == Cplx{0.0, 0.0}) continue;
    double moment = gaussian_moment(mono_insert(key.mono, t), var);
    if (moment == 0.0) continue;
    acc += coeff * prefactor * f * moment;
  }
  if (std::abs(acc.imag()) > 1e-12 * std::max(1.0, std::abs(acc.real()))) {
    throw ConvergenceError("wick_coefficient: non-real result");
  }
  return acc.real();
}

// --- numeric (Monte-Carlo) path: terms keyed by mask with numeric
// coupling values folded into the coefficients.

struct NumericTerms {
  std::vector<Cplx> coeff;    // indexed by mask
  std::vector<Mask> active;
};

void numeric_step(const NumericTerms& in, NumericTerms& out,
                  const std::vector<Mask>& tuples,
                  const std::vector<double>& j_values, Cplx prefactor) {
  for (Mask m : out.active) out.coeff[m] = Cplx{0.0, 0.0};
  out.active.clear();
  for (Mask m : in.active) {
    Cplx c = in.coeff[m];
    if (c == Cplx{0.0, 0.0}) continue;
    for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
      Mask t = tuples[ti];
      Cplx f = commutator_factor(t, m);
      if (f == Cplx{0.0, 0.0}) continue;
      Mask nm = m ^ t;
      if (out.coeff[nm] == Cplx{0.0, 0.0}) out.active.push_back(nm);
      out.coeff[nm] += c * prefactor * f * j_values[ti];
    }
  }
}

Cplx numeric_target_coefficient(const NumericTerms& in,
                                const std::vector<double>& j_values,
                                const std::unordered_map<Mask, std::size_t>& tuple_index,
                                Cplx prefactor, Mask target, int q) {
  Cplx acc{0.0, 0.0};
  for (Mask m : in.active) {
    Cplx c = in.coeff[m];
    if (c == Cplx{0.0, 0.0}) continue;
    Mask t = m ^ target;
    if (std::popcount(t) != q) continue;
    auto it = tuple_index.find(t);
    if (it == tuple_index.end()) continue;
    Cplx f = commutator_factor(t, m);
    if (f == Cplx{0.0, 0.0}) continue;
    acc += c * prefactor * f * j_values[it->second];
  }
  return acc;
}

struct RunningScalar {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const RunningScalar& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    double d = o.mean - mean;
    long nn = n + o.n;
    mean += d * static_cast<double>(o.n) / static_cast<double>(nn);
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) /
                     static_cast<double>(nn);
    n = nn;
  }
  double stderr_of_mean() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

BruteForceResult monte_carlo(int q, int k, int L, long samples,
                             std::uint64_t seed, int threads, bool compute_c4) {
  if (L > 6) {
    throw ConfigError("Monte-Carlo brute force supports L <= 6");
  }
  check_symbolic_args(q, k, compute_c4 ? 4 : 2, L);
  std::vector<Mask> tuples = all_tuples(2 * L, q);
  std::unordered_map<Mask, std::size_t> tuple_index;
  for (std::size_t i = 0; i < tuples.size(); ++i) tuple_index[tuples[i]] = i;
  Cplx prefactor = ipow(q / 2);
  Mask target = leading_mask(k);
  std::size_t dim = std::size_t{1} << (2 * L);

  unsigned hw = std::thread::hardware_concurrency();
  int nthreads = threads > 0 ? threads : std::max(1u, hw);
  nthreads = static_cast<int>(std::min<long>(nthreads, samples));
  long chunk = (samples + nthreads - 1) / nthreads;
  std::vector<RunningScalar> c2_parts(static_cast<std::size_t>(nthreads));
  std::vector<RunningScalar> c4_parts(static_cast<std::size_t>(nthreads));
  std::vector<std::thread> pool;
  for (int w = 0; w < nthreads; ++w) {
    pool.emplace_back([&, w]() {
      long lo = w * chunk, hi = std::min<long>(samples, lo + chunk);
      NumericTerms t1, t2, t3;
      t1.coeff.assign(dim, Cplx{});
      t2.coeff.assign(dim, Cplx{});
      t3.coeff.assign(dim, Cplx{});
      std::vector<double> j_values(tuples.size());
      for (long s = lo; s < hi; ++s) {
        GaussianSampler gauss(derive_seed(seed, static_cast<std::uint64_t>(s)));
        double sigma = std::sqrt(coupling_variance(q, L, 1.0));
        for (double& jv : j_values) jv = sigma * gauss.next();

        for (Mask m : t1.active) t1.coeff[m] = Cplx{};
        t1.active.clear();
        t1.coeff[target] = Cplx{1.0, 0.0};
        t1.active.push_back(target);

        numeric_step(t1, t2, tuples, j_values, prefactor);  // [H, O]
        Cplx c2 = numeric_target_coefficient(t2, j_values, tuple_index,
                                             prefactor, target, q);
        c2_parts[static_cast<std::size_t>(w)].add(c2.real());
        if (compute_c4) {
          numeric_step(t2, t3, tuples, j_values, prefactor);   // [H,[H,O]]
          numeric_step(t3, t1, tuples, j_values, prefactor);   // triple
          Cplx c4 = numeric_target_coefficient(t1, j_values, tuple_index,
                                               prefactor, target, q);
          c4_parts[static_cast<std::size_t>(w)].add(c4.real());
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  RunningScalar c2_all, c4_all;
  for (int w = 0; w < nthreads; ++w) {
    c2_all.merge(c2_parts[static_cast<std::size_t>(w)]);
    c4_all.merge(c4_parts[static_cast<std::size_t>(w)]);
  }
  BruteForceResult r;
  r.samples = c2_all.n;
  r.c2 = c2_all.mean;
  r.c2_stderr = c2_all.stderr_of_mean();
  if (compute_c4) {
    r.c4 = c4_all.mean;
    r.c4_stderr = c4_all.stderr_of_mean();
  }
  return r;
}

}  // namespace

ShortTimeCoefficients short_time_coefficients(int q, int k, int L, double J) {
  if (k < 1 || k > 2 * L - 1) {
    throw ConfigError("short_time_coefficients: k must be in [1, 2L-1]");
  }
  double dk = k, dl = L;
  ShortTimeCoefficients c;
  c.q = q;
  c.k = k;
  c.L = L;
  c.J = J;
  double j2 = J * J, j4 = j2 * j2;
  if (q == 2) {
    c.c2 = dk * (2 * dl - dk) * j2 / (2 * dl);
    c.c4 = dk * (2 * dl - dk) * ((6 * dk - 2) * dl - (3 * dk * dk - 2)) * j4 /
           (4 * dl * dl);
  } else if (q == 4) {
    double a = (dk - 1) * (dk - 2) + (2 * dl - dk - 1) * (2 * dl - dk - 2);
    c.c2 = dk * (2 * dl - dk) * a * j2 / (32 * dl * dl * dl);
    double k2 = dk * dk, k3 = k2 * dk, k4 = k3 * dk, k5 = k4 * dk, k6 = k5 * dk;
    double poly = 32 * (3 * dk + 1) * std::pow(dl, 5) -
                  16 * (15 * k2 + 38 * dk) * std::pow(dl, 4) +
                  8 * (36 * k3 + 122 * k2 + 207 * dk - 99) * std::pow(dl, 3) -
                  4 * (48 * k4 + 168 * k3 + 543 * k2 + 352 * dk - 510) *
                      std::pow(dl, 2) +
                  8 * (9 * k5 + 21 * k4 + 168 * k3 + 88 * k2 + 156 * dk - 304) *
                      dl -
                  (12 * k6 + 336 * k4 + 624 * k2 - 864);
    c.c4 = dk * (2 * dl - dk) * poly * j4 / (1024 * std::pow(dl, 6));
  } else {
    throw ConfigError(
        "short_time_coefficients: closed forms exist only for q = 2 and q = 4");
  }
  return c;
}

ShortTimePrediction predict_return_amplitude(const ShortTimeCoefficients& c,
                                             double bandwidth, double t) {
  if (!(bandwidth > 0.0)) {
    throw ConfigError("predict_return_amplitude: bandwidth must be positive");
  }
  double tau = t / bandwidth;
  double quad = c.c2 * tau * tau / 2.0;
  double quart = c.c4 * tau * tau * tau * tau / 24.0;
  return ShortTimePrediction{1.0 - quad + quart,
                             std::abs(quart) <= 0.1 * std::abs(quad) ||
                                 (quad == 0.0 && quart == 0.0)};
}

BruteForceResult brute_force_coefficients(int q, int k, int L,
                                          BruteForceMode mode, long samples,
                                          std::uint64_t seed, int threads,
                                          bool compute_c4) {
  if (mode == BruteForceMode::WickExact) {
    if (L > 4) throw ConfigError("Wick-exact brute force supports L <= 4");
    BruteForceResult r;
    r.c2 = wick_coefficient(q, k, L, 2);
    if (compute_c4) r.c4 = wick_coefficient(q, k, L, 4);
    return r;
  }
  return monte_carlo(q, k, L, samples, seed, threads, compute_c4);
}

std::uint64_t count_commutator_terms(int q, int k, int n, int L,
                                     std::size_t max_terms) {
  check_symbolic_args(q, k, n, L);
  std::vector<Mask> tuples = all_tuples(2 * L, q);
  Cplx prefactor = ipow(q / 2);
  SymMap terms;
  terms[SymKey{0, leading_mask(k)}] = Cplx{1.0, 0.0};
  for (int level = 0; level < n; ++level) {
    terms = symbolic_step(terms, tuples, prefactor, max_terms);
  }
  return terms.size();
}

std::set<int> nested_commutator_sizes(int q, std::uint32_t start_mask, int n,
                                      int L, std::size_t max_terms) {
  if (start_mask == 0 || (start_mask >> (2 * L)) != 0) {
    throw ConfigError("nested_commutator_sizes: bad start mask");
  }
  check_symbolic_args(q, std::popcount(start_mask), n, L);
  std::vector<Mask> tuples = all_tuples(2 * L, q);
  Cplx prefactor = ipow(q / 2);
  SymMap terms;
  terms[SymKey{0, start_mask}] = Cplx{1.0, 0.0};
  for (int level = 0; level < n; ++level) {
    terms = symbolic_step(terms, tuples, prefactor, max_terms);
  }
  std::set<int> sizes;
  for (const auto& [key, coeff] : terms) {
    (void)coeff;
    sizes.insert(std::popcount(key.mask));
  }
  return sizes;
}

}  // namespace sykq
