#include <doctest.h>

#include <stdexcept>

#include <random>

#include "hamkac/dpsuper.hpp"

using namespace hamkac;

namespace {

SuperPoly random_poly(const Shape& s, std::mt19937_64& rng, int terms, int parity = -1) {
  SuperPoly f(s);
  for (int i = 0; i < terms; ++i) {
    Monomial m{static_cast<std::uint32_t>(rng() % s.n1()), static_cast<std::uint32_t>(rng() % s.n2()),
               static_cast<std::uint32_t>(parity < 0 ? rng() % 2 : parity)};
    f.add_term(m, static_cast<Residue>(rng() % s.p));
  }
  return f;
}

SuperPoly mono(const Shape& s, std::uint32_t i1, std::uint32_t i2, std::uint32_t j, Residue c = 1) {
  return SuperPoly::monomial(s, {i1, i2, j}, c);
}

SuperPoly signed_sum(const SuperPoly& a, Residue sign_b, const SuperPoly& b) {
  SuperPoly out = a;
  out += b.scaled(sign_b);
  return out;
}

}  // namespace

TEST_SUITE("dpsuper") {

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(Shape(4, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(Shape(3, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(Shape(5, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Shape(5, 1, 0), std::invalid_argument);
  const Shape s(5, 2, 1);
  CHECK(s.n1() == 25);
  CHECK(s.n2() == 5);
}

TEST_CASE("divided power products") {
  const Shape s(5, 2, 1);
  // x^(a) x^(b) = C(a+b, a) x^(a+b): C(3,1) = 3, C(5,2) = 10 = 0 mod 5.
  CHECK(poly_mul(mono(s, 1, 0, 0), mono(s, 2, 0, 0)) == mono(s, 3, 0, 0, 3));
  CHECK(poly_mul(mono(s, 2, 0, 0), mono(s, 3, 0, 0)).is_zero());
  // C(6,1) = 6 = 1 mod 5; exponent 6 < 25 is in range for t1 = 2.
  CHECK(poly_mul(mono(s, 5, 0, 0), mono(s, 1, 0, 0)) == mono(s, 6, 0, 0));
  // Truncation at p^t.
  CHECK(poly_mul(mono(s, 24, 0, 0), mono(s, 1, 0, 0)).is_zero());
  CHECK(poly_mul(mono(s, 0, 4, 0), mono(s, 0, 1, 0)).is_zero());
  // xi^2 = 0.
  CHECK(poly_mul(mono(s, 0, 0, 1), mono(s, 0, 0, 1)).is_zero());
  CHECK(poly_mul(SuperPoly::one(s), mono(s, 3, 2, 1)) == mono(s, 3, 2, 1));
  CHECK_THROWS(SuperPoly::monomial(s, {25, 0, 0}));
  CHECK_THROWS(poly_mul(SuperPoly::one(s), SuperPoly::one(Shape(5, 1, 1))));
}

TEST_CASE("x^(a) agrees with x^a / a! below p") {
  // Independent model: for exponents < p the divided power is an ordinary
  // monomial divided by a factorial.
  const Shape s(7, 1, 1);
  const PrimeField F(7);
  auto fact = [&](std::uint32_t n) {
    Residue r = 1;
    for (std::uint32_t i = 2; i <= n; ++i) r = F.mul(r, i);
    return r;
  };
  for (std::uint32_t a = 0; a < 7; ++a)
    for (std::uint32_t b = 0; a + b < 7; ++b) {
      const Residue want = F.mul(fact(a + b), F.inv(F.mul(fact(a), fact(b))));
      CHECK(poly_mul(mono(s, a, 0, 0), mono(s, b, 0, 0)) == mono(s, a + b, 0, 0, want));
    }
}

TEST_CASE("product is associative and supercommutative") {
  const Shape s(5, 1, 2);
  const PrimeField F(5);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_poly(s, rng, 4), b = random_poly(s, rng, 4), c = random_poly(s, rng, 4);
    CHECK(poly_mul(poly_mul(a, b), c) == poly_mul(a, poly_mul(b, c)));
    for (std::uint32_t pa : {0u, 1u})
      for (std::uint32_t pb : {0u, 1u}) {
        const auto x = random_poly(s, rng, 3, pa), y = random_poly(s, rng, 3, pb);
        const Residue sign = (pa & pb) ? F.neg(1) : 1;
        CHECK(poly_mul(x, y) == poly_mul(y, x).scaled(sign));
      }
  }
}

TEST_CASE("partial derivatives") {
  const Shape s(5, 1, 1);
  CHECK(deriv(1, mono(s, 3, 2, 1)) == mono(s, 2, 2, 1));
  CHECK(deriv(2, mono(s, 3, 2, 1)) == mono(s, 3, 1, 1));
  CHECK(deriv(3, mono(s, 3, 2, 1)) == mono(s, 3, 2, 0));
  CHECK(deriv(3, mono(s, 3, 2, 0)).is_zero());
  CHECK(deriv(1, SuperPoly::one(s)).is_zero());
  CHECK_THROWS(deriv(4, SuperPoly::one(s)));
}

TEST_CASE("signed Leibniz rule") {
  const Shape s(5, 1, 1);
  const PrimeField F(5);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const std::uint32_t pf = trial % 2;
    const auto f = random_poly(s, rng, 3, pf), g = random_poly(s, rng, 3);
    for (int k : {1, 2}) {
      const auto lhs = deriv(k, poly_mul(f, g));
      CHECK(lhs == signed_sum(poly_mul(deriv(k, f), g), 1, poly_mul(f, deriv(k, g))));
    }
    // D3 is odd: sign (-1)^|f| on the second term.
    const auto lhs = deriv(3, poly_mul(f, g));
    CHECK(lhs == signed_sum(poly_mul(deriv(3, f), g), pf ? F.neg(1) : 1, poly_mul(f, deriv(3, g))));
  }
}

TEST_CASE("parity and coefficient bookkeeping") {
  const Shape s(5, 1, 1);
  SuperPoly f(s);
  f.add_term({1, 0, 0}, 2);
  f.add_term({1, 0, 0}, 3);  // cancels
  CHECK(f.is_zero());
  CHECK(f.parity() == 0);
  f.add_term({1, 1, 1}, 4);
  CHECK(f.parity() == 1);
  CHECK(f.coeff({1, 1, 1}) == 4);
  f.add_term({2, 0, 0}, 1);
  CHECK_THROWS_AS(f.parity(), std::domain_error);
  CHECK(f.even_part() == mono(s, 2, 0, 0));
  CHECK(f.odd_part() == mono(s, 1, 1, 1, 4));
  CHECK(to_string(mono(s, 2, 0, 1, 3)) == "3*x1^(2) x2^(0) xi^1");
  CHECK(to_string(SuperPoly(s)) == "0");
}

}  // TEST_SUITE
