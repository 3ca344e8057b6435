#include "sykq/hamiltonian.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "sykq/majorana.hpp"
#include "sykq/rng.hpp"

namespace sykq {

namespace {

inline Complex ipow(int e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_q(int q, int two_l) {
  if (q < 2 || q % 2 != 0) {
    throw ConfigError("q must be a positive even integer (got " +
                      std::to_string(q) + ")");
  }
  if (q > two_l) {
    throw ConfigError("q exceeds the number of fundamental operators 2L");
  }
}

/// Number of same-site pairs (2m-1, 2m) contained in a strictly increasing
/// tuple; they are always adjacent entries.
int same_site_pairs(std::span<const int> tuple) {
  int p = 0;
  for (std::size_t l = 1; l < tuple.size(); ++l) {
    if (tuple[l] % 2 == 0 && tuple[l] == tuple[l - 1] + 1) ++p;
  }
  return p;
}

}  // namespace

void for_each_tuple(int n, int q,
                    const std::function<void(std::span<const int>)>& fn) {
  std::vector<int> t(static_cast<std::size_t>(q));
  for (int m = 0; m < q; ++m) t[static_cast<std::size_t>(m)] = m + 1;
  for (;;) {
    fn(std::span<const int>(t));
    int m = q - 1;
    while (m >= 0 && t[static_cast<std::size_t>(m)] == n - (q - 1 - m)) --m;
    if (m < 0) return;
    ++t[static_cast<std::size_t>(m)];
    for (int r = m + 1; r < q; ++r) {
      t[static_cast<std::size_t>(r)] = t[static_cast<std::size_t>(r - 1)] + 1;
    }
  }
}

std::size_t tuple_rank(std::span<const int> tuple, int n) {
  int q = static_cast<int>(tuple.size());
  std::size_t rank = 0;
  int prev = 0;
  for (int m = 0; m < q; ++m) {
    for (int v = prev + 1; v < tuple[static_cast<std::size_t>(m)]; ++v) {
      rank += binomial(n - v, q - 1 - m);
    }
    prev = tuple[static_cast<std::size_t>(m)];
  }
  return rank;
}

CouplingTensor CouplingTensor::sample(int q, int L, double J,
                                      std::uint64_t seed) {
  check_q(q, 2 * L);
  CouplingTensor c;
  c.q = q;
  c.L = L;
  c.J = J;
  c.seed = seed;
  c.entries.reserve(binomial(2 * L, q));
  GaussianSampler gauss(seed);
  double sigma = std::sqrt(c.target_variance());
  for_each_tuple(2 * L, q, [&](std::span<const int>) {
    c.entries.push_back(sigma * gauss.next());
  });
  return c;
}

std::size_t CouplingTensor::expected_count() const {
  return binomial(2 * L, q);
}

double CouplingTensor::target_variance() const {
  double fact = 1.0;
  for (int i = 2; i < q; ++i) fact *= i;
  return J * J * fact / std::pow(2.0 * L, q - 1);
}

double CouplingTensor::value(std::span<const int> tuple) const {
  if (static_cast<int>(tuple.size()) != q) {
    throw DimensionError("CouplingTensor::value: tuple arity mismatch");
  }
  return entries[tuple_rank(tuple, 2 * L)];
}

nlohmann::json CouplingTensor::to_json() const {
  return nlohmann::json{{"q", q},
                        {"L", L},
                        {"J", J},
                        {"seed", seed},
                        {"entries", entries}};
}

CouplingTensor CouplingTensor::from_json(const nlohmann::json& j) {
  CouplingTensor c;
  c.q = j.at("q").get<int>();
  c.L = j.at("L").get<int>();
  c.J = j.at("J").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.entries = j.at("entries").get<std::vector<double>>();
  if (c.entries.size() != c.expected_count()) {
    throw ConfigError("CouplingTensor snapshot has wrong entry count");
  }
  return c;
}

OperatorSum build_syk(const CouplingTensor& c, Flavor flavor) {
  check_q(c.q, 2 * c.L);
  if (c.entries.size() != c.expected_count()) {
    throw ConfigError("CouplingTensor has wrong entry count");
  }
  OperatorSum h(c.L);
  Complex fermi_prefactor = ipow(c.q / 2);
  std::size_t rank = 0;
  for_each_tuple(2 * c.L, c.q, [&](std::span<const int> tuple) {
    double j_val = c.entries[rank++];
    PauliString term(c.L);
    for (int a : tuple) term = multiply(term, fundamental_pauli(a, c.L, flavor));
    Complex prefactor = flavor == Flavor::Fermionic
                            ? fermi_prefactor
                            : ipow(same_site_pairs(tuple));
    term = term.scaled(prefactor * j_val);
    if (term.coefficient().imag() != 0.0) {
      throw ConvergenceError(
          "build_syk: non-Hermitian term encountered; the sign convention "
          "does not match the operator algebra");
    }
    h.add(term);
  });
  return h;
}

OperatorSum build_h0(Axis a, double omega, int L) {
  if (a == Axis::Y) {
    throw ConfigError("build_h0: axis must be x or z (y is equivalent to x)");
  }
  OperatorSum h(L);
  Pauli p = (a == Axis::X) ? Pauli::X : Pauli::Z;
  for (int i = 1; i <= L; ++i) h.add(PauliString::single(L, i, p, omega));
  return h;
}

OperatorSum normalize(const OperatorSum& h, double* bandwidth_out,
                      PropagatorMethod method) {
  double delta = bandwidth(h, method);
  if (!(delta > 0.0)) {
    throw ConfigError("normalize: zero bandwidth");
  }
  if (bandwidth_out) *bandwidth_out = delta;
  return h.scaled(1.0 / delta);
}

QuenchHamiltonian make_quench(const CouplingTensor& c, Flavor flavor, Axis axis,
                              double omega, PropagatorMethod method) {
  QuenchHamiltonian qh;
  qh.axis = axis;
  qh.flavor = flavor;
  qh.q = c.q;
  qh.pre = build_h0(axis, omega, c.L);
  OperatorSum raw = build_syk(c, flavor);
  qh.post = normalize(raw, &qh.bandwidth, method);
  return qh;
}

}  // namespace sykq
