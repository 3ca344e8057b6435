#include "sykq/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace sykq {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;  // closest double to sqrt(2)

inline int popcount(std::uint64_t v) { return std::popcount(v); }

inline Complex ipow(int e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_same_length(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Coefficient Coefficient::canonical(Complex m, int r) {
  // Fold even sqrt(2) powers into the mantissa; shifts by powers of two are
  // exact.  Remaining r is 0 or 1.
  int shift = (r - (r & 1)) / 2;  // works for negative r: -1 -> shift -1, rest 1
  int rest = r - 2 * shift;
  m = Complex(std::ldexp(m.real(), shift), std::ldexp(m.imag(), shift));
  return Coefficient{m, rest};
}

Complex Coefficient::value() const {
  if (root2 == 0) return mant;
  if (root2 == 1) return mant * kSqrt2;
  return mant * std::pow(kSqrt2, root2);  // non-canonical, rare
}

PauliString::PauliString(int length) : length_(length) {
  if (length < 1 || length > 63) {
    throw DimensionError("PauliString: length must be in [1, 63]");
  }
}

PauliString::PauliString(int length, std::uint64_t x_mask, std::uint64_t z_mask,
                         Coefficient coeff)
    : length_(length), x_(x_mask), z_(z_mask), coeff_(coeff) {
  if (length < 1 || length > 63) {
    throw DimensionError("PauliString: length must be in [1, 63]");
  }
  std::uint64_t valid = (length == 63) ? ~0ULL >> 1 : ((1ULL << length) - 1);
  if ((x_ & ~valid) != 0 || (z_ & ~valid) != 0) {
    throw DimensionError("PauliString: mask bits outside lattice");
  }
}

PauliString::PauliString(const std::vector<Pauli>& letters, Complex coeff)
    : PauliString(static_cast<int>(letters.size())) {
  for (int site = 1; site <= length_; ++site) {
    Pauli p = letters[static_cast<std::size_t>(site - 1)];
    std::uint64_t bit = 1ULL << bit_of_site(site);
    if (p == Pauli::X || p == Pauli::Y) x_ |= bit;
    if (p == Pauli::Z || p == Pauli::Y) z_ |= bit;
  }
  coeff_ = Coefficient::from(coeff);
}

PauliString PauliString::single(int length, int site, Pauli p, Complex coeff) {
  if (site < 1 || site > length) {
    throw DimensionError("PauliString::single: site out of range");
  }
  PauliString s(length);
  std::uint64_t bit = 1ULL << s.bit_of_site(site);
  if (p == Pauli::X || p == Pauli::Y) s.x_ |= bit;
  if (p == Pauli::Z || p == Pauli::Y) s.z_ |= bit;
  s.coeff_ = Coefficient::from(coeff);
  return s;
}

Pauli PauliString::letter(int site) const {
  if (site < 1 || site > length_) {
    throw DimensionError("PauliString::letter: site out of range");
  }
  std::uint64_t bit = 1ULL << bit_of_site(site);
  bool hx = (x_ & bit) != 0, hz = (z_ & bit) != 0;
  if (hx && hz) return Pauli::Y;
  if (hx) return Pauli::X;
  if (hz) return Pauli::Z;
  return Pauli::I;
}

std::vector<Pauli> PauliString::letters() const {
  std::vector<Pauli> out(static_cast<std::size_t>(length_));
  for (int site = 1; site <= length_; ++site) {
    out[static_cast<std::size_t>(site - 1)] = letter(site);
  }
  return out;
}

PauliString PauliString::with_coefficient(Complex c) const {
  PauliString s = *this;
  s.coeff_ = Coefficient::from(c);
  return s;
}

PauliString PauliString::scaled(Complex s) const {
  PauliString r = *this;
  r.coeff_ = coeff_.times(s);
  return r;
}

PauliString PauliString::scaled(const Coefficient& s) const {
  PauliString r = *this;
  r.coeff_ = coeff_.times(s);
  return r;
}

PauliString PauliString::adjoint() const {
  PauliString r = *this;
  r.coeff_ = coeff_.conj();
  return r;
}

std::string PauliString::str() const {
  std::ostringstream os;
  Complex c = coefficient();
  os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag())
     << "i) ";
  static const char* names = "IXYZ";
  bool any = false;
  for (int site = 1; site <= length_; ++site) {
    Pauli p = letter(site);
    if (p == Pauli::I) continue;
    os << names[static_cast<int>(p)] << site << " ";
    any = true;
  }
  if (!any) os << "1 ";
  return os.str();
}

PauliString multiply(const PauliString& a, const PauliString& b) {
  check_same_length(a.length(), b.length(), "multiply");
  std::uint64_t xa = a.x_mask(), za = a.z_mask();
  std::uint64_t xb = b.x_mask(), zb = b.z_mask();
  std::uint64_t xc = xa ^ xb, zc = za ^ zb;
  // Canonical letters satisfy A = i^{y_a} X^x Z^z with y = x & z, and
  // X^xa Z^za X^xb Z^zb = (-1)^{za.xb} X^{xa^xb} Z^{za^zb}.
  int e = popcount(xa & za) + popcount(xb & zb) - popcount(xc & zc) +
          2 * popcount(za & xb);
  Coefficient c = a.coeff().times(b.coeff()).times(ipow(e));
  return PauliString(a.length(), xc, zc, c);
}

OperatorSum::OperatorSum(const PauliString& s) : length_(s.length()) {
  add(s);
}

bool OperatorSum::is_zero() const {
  for (const auto& t : terms_) {
    if (std::abs(t.c.value()) >= merge_epsilon) return false;
  }
  return true;
}

int OperatorSum::find(std::uint64_t x, std::uint64_t z) const {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), std::make_pair(z, x),
      [](const Entry& e, const std::pair<std::uint64_t, std::uint64_t>& k) {
        return std::tie(e.z, e.x) < std::tie(k.first, k.second);
      });
  if (it != terms_.end() && it->x == x && it->z == z) {
    return static_cast<int>(it - terms_.begin());
  }
  return -1;
}

void OperatorSum::insert(std::uint64_t x, std::uint64_t z,
                         const Coefficient& c) {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), std::make_pair(z, x),
      [](const Entry& e, const std::pair<std::uint64_t, std::uint64_t>& k) {
        return std::tie(e.z, e.x) < std::tie(k.first, k.second);
      });
  if (it != terms_.end() && it->x == x && it->z == z) {
    if (it->c.root2 == c.root2) {
      it->c.mant += c.mant;
    } else {
      it->c = Coefficient::from(it->c.value() + c.value());
    }
    if (it->c.mant == Complex{0.0, 0.0}) terms_.erase(it);
    return;
  }
  terms_.insert(it, Entry{x, z, c});
}

void OperatorSum::add(const PauliString& s) {
  if (length_ == 0) length_ = s.length();
  check_same_length(length_, s.length(), "OperatorSum::add");
  insert(s.x_mask(), s.z_mask(), s.coeff());
}

void OperatorSum::add(const OperatorSum& o) {
  if (length_ == 0) length_ = o.length_;
  check_same_length(length_, o.length_, "OperatorSum::add");
  for (const auto& t : o.terms_) insert(t.x, t.z, t.c);
}

void OperatorSum::subtract(const OperatorSum& o) {
  if (length_ == 0) length_ = o.length_;
  check_same_length(length_, o.length_, "OperatorSum::subtract");
  for (const auto& t : o.terms_) {
    insert(t.x, t.z, Coefficient{-t.c.mant, t.c.root2});
  }
}

OperatorSum OperatorSum::scaled(Complex s) const {
  OperatorSum r(length_);
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.c = t.c.times(s);
  return r;
}

OperatorSum OperatorSum::adjoint() const {
  OperatorSum r(length_);
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.c = t.c.conj();
  return r;
}

double OperatorSum::hermiticity_defect() const {
  double worst = 0.0;
  for (const auto& t : terms_) {
    worst = std::max(worst, std::abs(t.c.value().imag()));
  }
  return worst;
}

bool OperatorSum::is_hermitian(double tol) const {
  return hermiticity_defect() <= tol;
}

std::vector<PauliString> OperatorSum::terms() const {
  std::vector<PauliString> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (std::abs(t.c.value()) < merge_epsilon) continue;
    out.emplace_back(length_, t.x, t.z, t.c);
  }
  return out;
}

double OperatorSum::one_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.c.value());
  return s;
}

Eigen::MatrixXcd OperatorSum::to_dense() const {
  if (length_ == 0) throw DimensionError("to_dense: empty operator sum");
  Eigen::Index dim = Eigen::Index{1} << length_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& p : terms()) m += pauli_to_dense(p);
  return m;
}

Eigen::VectorXcd OperatorSum::apply(const Eigen::VectorXcd& v) const {
  if (length_ == 0) throw DimensionError("apply: empty operator sum");
  if (v.size() != (Eigen::Index{1} << length_)) {
    throw DimensionError("apply: state dimension does not match 2^L");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (const auto& p : terms()) apply_pauli(p, v, out);
  return out;
}

bool OperatorSum::exact_equal(const OperatorSum& o) const {
  auto a = terms(), b = o.terms();
  if (length_ != o.length_ || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].exact_equal(b[i])) return false;
  }
  return true;
}

std::string OperatorSum::str() const {
  std::ostringstream os;
  for (const auto& p : terms()) os << p.str() << " + ";
  std::string s = os.str();
  if (s.empty()) return "0";
  return s.substr(0, s.size() - 3);
}

OperatorSum multiply(const OperatorSum& a, const OperatorSum& b) {
  check_same_length(a.length(), b.length(), "multiply");
  OperatorSum r(a.length());
  for (const auto& pa : a.terms()) {
    for (const auto& pb : b.terms()) r.add(multiply(pa, pb));
  }
  return r;
}

OperatorSum anticommutator(const PauliString& a, const PauliString& b) {
  check_same_length(a.length(), b.length(), "anticommutator");
  OperatorSum r(a.length());
  r.add(multiply(a, b));
  r.add(multiply(b, a));
  return r;
}

OperatorSum commutator(const OperatorSum& h, const OperatorSum& o) {
  check_same_length(h.length(), o.length(), "commutator");
  OperatorSum r(h.length());
  for (const auto& ph : h.terms()) {
    for (const auto& po : o.terms()) {
      // Pauli words either commute or anticommute; skip the commuting ones.
      std::uint64_t xa = ph.x_mask(), za = ph.z_mask();
      std::uint64_t xb = po.x_mask(), zb = po.z_mask();
      int anti = (popcount(za & xb) + popcount(xa & zb)) & 1;
      if (!anti) continue;
      r.add(multiply(ph, po).scaled(2.0));
    }
  }
  return r;
}

void apply_pauli(const PauliString& p, const Eigen::VectorXcd& in,
                 Eigen::VectorXcd& out_accum) {
  Eigen::Index dim = Eigen::Index{1} << p.length();
  if (in.size() != dim || out_accum.size() != dim) {
    throw DimensionError("apply_pauli: state dimension does not match 2^L");
  }
  std::uint64_t x = p.x_mask(), z = p.z_mask();
  Complex c = p.coefficient() * ipow(popcount(x & z));
  for (Eigen::Index b = 0; b < dim; ++b) {
    Complex amp = c * in[b];
    if (std::popcount(static_cast<std::uint64_t>(b) & z) & 1) amp = -amp;
    out_accum[static_cast<Eigen::Index>(static_cast<std::uint64_t>(b) ^ x)] +=
        amp;
  }
}

Complex pauli_expectation(const PauliString& p, const Eigen::VectorXcd& v) {
  Eigen::Index dim = Eigen::Index{1} << p.length();
  if (v.size() != dim) {
    throw DimensionError("pauli_expectation: dimension mismatch");
  }
  std::uint64_t x = p.x_mask(), z = p.z_mask();
  Complex c = p.coefficient() * ipow(popcount(x & z));
  Complex acc{0.0, 0.0};
  for (Eigen::Index b = 0; b < dim; ++b) {
    Complex amp = v[b];
    if (std::popcount(static_cast<std::uint64_t>(b) & z) & 1) amp = -amp;
    acc += std::conj(v[static_cast<Eigen::Index>(
               static_cast<std::uint64_t>(b) ^ x)]) *
           amp;
  }
  return c * acc;
}

Eigen::MatrixXcd pauli_to_dense(const PauliString& p) {
  Eigen::Index dim = Eigen::Index{1} << p.length();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  std::uint64_t x = p.x_mask(), z = p.z_mask();
  Complex c = p.coefficient() * ipow(popcount(x & z));
  for (Eigen::Index b = 0; b < dim; ++b) {
    Complex amp = c;
    if (std::popcount(static_cast<std::uint64_t>(b) & z) & 1) amp = -amp;
    m(static_cast<Eigen::Index>(static_cast<std::uint64_t>(b) ^ x), b) += amp;
  }
  return m;
}

std::string to_string(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    default: return "z";
  }
}

std::string to_string(Flavor f) {
  return f == Flavor::Fermionic ? "fermionic" : "bosonic";
}

Axis axis_from_string(const std::string& s) {
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  if (s == "z") return Axis::Z;
  throw ConfigError("axis must be one of x, y, z (got '" + s + "')");
}

Flavor flavor_from_string(const std::string& s) {
  if (s == "fermionic") return Flavor::Fermionic;
  if (s == "bosonic") return Flavor::Bosonic;
  throw ConfigError("flavor must be fermionic or bosonic (got '" + s + "')");
}

}  // namespace sykq
