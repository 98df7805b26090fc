#include "hamkac/dpsuper.hpp"

#include <sstream>
#include <stdexcept>

namespace hamkac {

namespace {

std::uint32_t checked_power(std::uint32_t p, std::uint32_t t) {
  std::uint64_t n = 1;
  for (std::uint32_t i = 0; i < t; ++i) {
    n *= p;
    if (n > (1u << 20)) throw std::invalid_argument("shape too large");
  }
  return static_cast<std::uint32_t>(n);
}

}  // namespace

Shape::Shape(std::uint32_t p_, std::uint32_t t1_, std::uint32_t t2_)
    : p(p_), t1(t1_), t2(t2_) {
  if (p <= 3 || !is_prime(p)) throw std::invalid_argument("p must be prime > 3");
  if (t1 < 1 || t2 < 1) throw std::invalid_argument("t1, t2 must be >= 1");
  n1_ = checked_power(p, t1);
  n2_ = checked_power(p, t2);
}

bool in_range(const Shape& s, const Monomial& m) {
  return m.i1 < s.n1() && m.i2 < s.n2() && m.j <= 1;
}

SuperPoly SuperPoly::monomial(const Shape& shape, Monomial m, Residue c) {
  SuperPoly f(shape);
  if (!in_range(shape, m)) throw std::out_of_range("monomial outside shape");
  f.add_term(m, c);
  return f;
}

Residue SuperPoly::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0 : it->second;
}

void SuperPoly::add_term(const Monomial& m, Residue c) {
  const PrimeField F(shape_.p);
  c %= shape_.p;
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second = F.add(it->second, c);
    if (it->second == 0) terms_.erase(it);
  }
}

SuperPoly& SuperPoly::operator+=(const SuperPoly& o) {
  if (!(shape_ == o.shape_)) throw std::invalid_argument("shape mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

SuperPoly SuperPoly::scaled(Residue c) const {
  const PrimeField F(shape_.p);
  SuperPoly out(shape_);
  for (const auto& [m, v] : terms_) out.add_term(m, F.mul(v, c));
  return out;
}

std::uint32_t SuperPoly::parity() const {
  if (terms_.empty()) return 0;
  const auto par = terms_.begin()->first.parity();
  for (const auto& [m, c] : terms_)
    if (m.parity() != par) throw std::domain_error("inhomogeneous SuperPoly");
  return par;
}

SuperPoly SuperPoly::even_part() const {
  SuperPoly out(shape_);
  for (const auto& [m, c] : terms_)
    if (m.parity() == 0) out.terms_.emplace(m, c);
  return out;
}

SuperPoly SuperPoly::odd_part() const {
  SuperPoly out(shape_);
  for (const auto& [m, c] : terms_)
    if (m.parity() == 1) out.terms_.emplace(m, c);
  return out;
}

SuperPoly poly_mul(const SuperPoly& a, const SuperPoly& b) {
  if (!(a.shape() == b.shape())) throw std::invalid_argument("poly_mul: shape mismatch");
  const Shape& s = a.shape();
  const PrimeField F(s.p);
  SuperPoly out(s);
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      const Monomial m{ma.i1 + mb.i1, ma.i2 + mb.i2, ma.j + mb.j};
      if (!in_range(s, m)) continue;
      // xi sits to the right of the even factors, so no sign arises.
      Residue c = F.mul(binom_mod_p(m.i1, ma.i1, s.p), binom_mod_p(m.i2, ma.i2, s.p));
      if (c == 0) continue;
      out.add_term(m, F.mul(c, F.mul(ca, cb)));
    }
  }
  return out;
}

SuperPoly deriv(int k, const SuperPoly& f) {
  SuperPoly out(f.shape());
  for (const auto& [m, c] : f.terms()) {
    switch (k) {
      case 1:
        if (m.i1 > 0) out.add_term({m.i1 - 1, m.i2, m.j}, c);
        break;
      case 2:
        if (m.i2 > 0) out.add_term({m.i1, m.i2 - 1, m.j}, c);
        break;
      case 3:
        if (m.j == 1) out.add_term({m.i1, m.i2, 0}, c);
        break;
      default:
        throw std::invalid_argument("deriv: k must be 1, 2 or 3");
    }
  }
  return out;
}

std::string to_string(const SuperPoly& f) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : f.terms()) {
    if (!first) os << " + ";
    first = false;
    os << c << "*x1^(" << m.i1 << ") x2^(" << m.i2 << ") xi^" << m.j;
  }
  return os.str();
}

}  // namespace hamkac
