#pragma once

// The divided power Grassmann superalgebra O(2;t) (x) Lambda(1): basis
// x1^(i1) x2^(i2) xi^j with i1 < p^t1, i2 < p^t2, j in {0,1}.

#include <cstdint>
#include <map>
#include <string>

#include "hamkac/gfp.hpp"

namespace hamkac {

struct Shape {
  std::uint32_t p;
  std::uint32_t t1;
  std::uint32_t t2;

  /// Throws std::invalid_argument unless p is prime > 3 and t1, t2 >= 1.
  Shape(std::uint32_t p, std::uint32_t t1, std::uint32_t t2);

  std::uint32_t n1() const { return n1_; }  // p^t1
  std::uint32_t n2() const { return n2_; }  // p^t2
  PrimeField field() const { return PrimeField(p); }

  bool operator==(const Shape& o) const { return p == o.p && t1 == o.t1 && t2 == o.t2; }

 private:
  std::uint32_t n1_, n2_;
};

/// Exponent triple (i1, i2, j) of a basis monomial. Ordered
/// lexicographically, which is also the serialization order.
struct Monomial {
  std::uint32_t i1 = 0;
  std::uint32_t i2 = 0;
  std::uint32_t j = 0;

  std::uint32_t parity() const { return j & 1u; }
  auto operator<=>(const Monomial&) const = default;
};

inline std::uint32_t degree(const Monomial& m) { return m.i1 + m.i2 + m.j; }

bool in_range(const Shape& s, const Monomial& m);

/// Finitely supported element of the superalgebra. No zero coefficients
/// are ever stored; zero is the empty map.
class SuperPoly {
 public:
  explicit SuperPoly(const Shape& shape) : shape_(shape) {}
  static SuperPoly monomial(const Shape& shape, Monomial m, Residue c = 1);
  static SuperPoly one(const Shape& shape) { return monomial(shape, {0, 0, 0}); }

  const Shape& shape() const { return shape_; }
  const std::map<Monomial, Residue>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Residue coeff(const Monomial& m) const;

  /// Adds c * m, dropping the term if the coefficient cancels.
  void add_term(const Monomial& m, Residue c);
  SuperPoly& operator+=(const SuperPoly& o);
  SuperPoly scaled(Residue c) const;

  /// Parity of a homogeneous element; throws std::domain_error if the
  /// support mixes parities. Zero counts as even.
  std::uint32_t parity() const;
  SuperPoly even_part() const;
  SuperPoly odd_part() const;

  bool operator==(const SuperPoly& o) const {
    return shape_ == o.shape_ && terms_ == o.terms_;
  }

 private:
  Shape shape_;
  std::map<Monomial, Residue> terms_;
};

/// Bilinear extension of the divided power product; out-of-range
/// exponents vanish. Throws std::invalid_argument on shape mismatch.
SuperPoly poly_mul(const SuperPoly& a, const SuperPoly& b);

/// D1 lowers i1, D2 lowers i2, D3 strips xi (odd). k in {1,2,3}.
SuperPoly deriv(int k, const SuperPoly& f);

/// "c*x1^(i1) x2^(i2) xi^j + ..." in monomial order; "0" for zero.
std::string to_string(const SuperPoly& f);

}  // namespace hamkac
