#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <random>

#include "hamkac/hamalg.hpp"

using namespace hamkac;

namespace {

const HamAlgebra& alg5() {
  static const HamAlgebra g(Shape(5, 1, 1));
  return g;
}

std::vector<Monomial> all_monomials(const Shape& s) {
  std::vector<Monomial> out;
  for (std::uint32_t i1 = 0; i1 < s.n1(); ++i1)
    for (std::uint32_t i2 = 0; i2 < s.n2(); ++i2)
      for (std::uint32_t j = 0; j < 2; ++j) out.push_back({i1, i2, j});
  return out;
}

// The derivation as an operator on the divided power algebra, compared on
// every basis monomial.
bool same_operator(const Shape& s, const AmbientDerivation& A, const AmbientDerivation& B) {
  for (const auto& m : all_monomials(s)) {
    const auto f = SuperPoly::monomial(s, m);
    if (!(apply(A, f) == apply(B, f))) return false;
  }
  return true;
}

HamElement el(const HamAlgebra& g, std::uint32_t i1, std::uint32_t i2, std::uint32_t j,
              Residue c = 1) {
  return g.basis_element(g.index({i1, i2, j}), c);
}

}  // namespace

TEST_SUITE("hamalg") {

TEST_CASE("dimension by enumeration") {
  struct Case {
    std::uint32_t p, t1, t2;
  };
  for (const auto c : {Case{5, 1, 1}, Case{7, 1, 1}, Case{5, 1, 2}, Case{5, 2, 1}}) {
    const HamAlgebra g(Shape(c.p, c.t1, c.t2));
    std::size_t even = 0, odd = 0;
    for (const auto& m : all_monomials(g.shape())) {
      if (degree(m) == 0) continue;  // D_H(1) = 0
      (m.j ? odd : even) += 1;
    }
    CHECK(g.dim() == even + odd);
    std::size_t ge = 0;
    for (std::size_t i = 0; i < g.dim(); ++i) ge += g.parity(i) == 0;
    CHECK(ge == even);
  }
  CHECK(alg5().dim() == 49);
  CHECK(HamAlgebra(Shape(7, 1, 1)).dim() == 97);
}

TEST_CASE("D_H on small functions") {
  const HamAlgebra& g = alg5();
  const Shape& s = g.shape();
  const PrimeField& F = g.field();
  const auto x1 = g.ambient(SuperPoly::monomial(s, {1, 0, 0}));
  CHECK(x1.components[0].is_zero());
  CHECK(x1.components[1] == SuperPoly::one(s));
  CHECK(x1.components[2].is_zero());
  CHECK(g.d_h(SuperPoly::monomial(s, {1, 0, 0})) == g.D2());

  const auto xi = g.ambient(SuperPoly::monomial(s, {0, 0, 1}));
  CHECK(xi.components[2] == SuperPoly::one(s).scaled(F.neg(1)));
  CHECK(g.d_h(SuperPoly::monomial(s, {0, 0, 1})) == g.basis_element(g.index({0, 0, 1})));
  CHECK(g.D3() == el(g, 0, 0, 1, F.neg(1)));

  // D_H(x1 x2) = x2 D2 - x1 D1.
  const auto h = g.ambient(SuperPoly::monomial(s, {1, 1, 0}));
  CHECK(h.components[0] == SuperPoly::monomial(s, {1, 0, 0}, F.neg(1)));
  CHECK(h.components[1] == SuperPoly::monomial(s, {0, 1, 0}));
  CHECK(h.components[2].is_zero());
  CHECK(g.d_h(SuperPoly::one(s)).empty());
}

TEST_CASE("sample brackets") {
  const HamAlgebra& g = alg5();
  const PrimeField& F = g.field();
  const auto h = el(g, 1, 1, 0);
  CHECK(g.bracket(h, g.D2()) == HamElement{{g.D2()[0].index, F.neg(g.D2()[0].value)}});
  const auto o = osp_generators(g);
  CHECK(g.bracket(o.e, o.f) == o.h);
  for (std::size_t i = 0; i < g.dim(); ++i)
    if (g.parity(i) == 0) CHECK(g.bracket_basis(i, i).empty());
}

TEST_CASE("brackets equal operator supercommutators on the divided power algebra") {
  // Independent of the table: compose the two derivations as operators.
  const HamAlgebra& g = alg5();
  const Shape& s = g.shape();
  const PrimeField& F = g.field();
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t x = rng() % g.dim(), y = rng() % g.dim();
    const auto A = g.ambient(g.basis_element(x)), B = g.ambient(g.basis_element(y));
    const auto C = g.ambient(g.bracket_basis(x, y));
    const Residue sign = (g.parity(x) & g.parity(y)) ? F.neg(1) : 1;
    bool ok = true;
    for (const auto& m : all_monomials(s)) {
      const auto f = SuperPoly::monomial(s, m);
      SuperPoly want = apply(A, apply(B, f));
      want += apply(B, apply(A, f)).scaled(F.neg(sign));
      ok = ok && apply(C, f) == want;
    }
    CHECK_MESSAGE(ok, "pair " << x << ", " << y);
  }
  CHECK(check_closure_in_derivations(g) == 0);
}

TEST_CASE("grading, parity and super-antisymmetry over all pairs") {
  const HamAlgebra& g = alg5();
  const PrimeField& F = g.field();
  for (std::size_t x = 0; x < g.dim(); ++x)
    for (std::size_t y = 0; y < g.dim(); ++y) {
      const auto& b = g.bracket_basis(x, y);
      for (const auto& t : b) {
        CHECK(g.grade(t.index) == g.grade(x) + g.grade(y));
        CHECK(g.parity(t.index) == (g.parity(x) ^ g.parity(y)));
      }
      const Residue sign = (g.parity(x) & g.parity(y)) ? 1 : F.neg(1);
      CHECK(g.bracket_basis(y, x) == [&] {
        HamElement r;
        for (const auto& t : b) r.push_back({t.index, F.mul(t.value, sign)});
        return r;
      }());
    }
}

TEST_CASE("grade and filtration") {
  const HamAlgebra& g = alg5();
  CHECK(g.grade(g.index({1, 0, 0})) == -1);
  CHECK(g.grade(g.index({1, 1, 0})) == 0);
  CHECK(g.grade(g.index({4, 4, 1})) == 7);
  CHECK(g.max_grade() == 7);
  CHECK(g.stated_max_grade() == 22);
  CHECK_FALSE(g.filtration_member(g.index({0, 0, 1}), 0));
  CHECK(g.filtration_member(g.index({1, 1, 0}), 0));
  for (std::size_t i = 0; i < g.dim(); ++i) CHECK(g.filtration_member(i, -1));
  CHECK(g.graded_component(0).size() == 5);
  CHECK(g.graded_component(-1).size() == 3);
}

TEST_CASE("structure constant builds agree") {
  const Shape s(5, 1, 2);
  const auto basis = canonical_basis(s);
  const auto a = build_structure_constants(s, basis), b = build_structure_constants_serial(s, basis);
  CHECK(a.table == b.table);
  CHECK(a.parity == b.parity);
}

TEST_CASE("super-Jacobi holds exhaustively and the kernels agree") {
  const auto& sc = alg5().structure_constants();
  const auto par = check_jacobi(sc);
  const auto ser = check_jacobi_serial(sc);
  CHECK(par.ok());
  CHECK(par.triples_checked == 49ull * 49 * 49);
  CHECK(ser.failures == par.failures);
  CHECK(check_jacobi_sampled(HamAlgebra(Shape(5, 2, 1)).structure_constants(), 5000, 3).ok());
}

TEST_CASE("a single flipped structure constant breaks Jacobi with a witness") {
  StructureConstants sc = alg5().structure_constants();
  const HamAlgebra& g = alg5();
  const std::size_t x = g.index({1, 1, 0}), y = g.index({0, 2, 0});
  auto& entry = sc.table[x * sc.dim() + y];
  REQUIRE_FALSE(entry.empty());
  entry[0].value = sc.field.add(entry[0].value, 1);
  const auto rep = check_jacobi(sc);
  CHECK_FALSE(rep.ok());
  REQUIRE(rep.first_failure);
  CHECK_FALSE(rep.first_failure->residual.empty());
}

TEST_CASE("GR identity on the required shapes") {
  for (const auto& s : {Shape(5, 1, 1), Shape(5, 1, 2), Shape(5, 2, 1), Shape(7, 1, 1)}) {
    const HamAlgebra g(s);
    const auto rep = verify_gr(g);
    CHECK_MESSAGE(rep.ok, "p=" << s.p << " t=(" << s.t1 << "," << s.t2 << ")");
    const auto& E = rep.structure.ordered_even_basis;
    REQUIRE(E.size() >= 2);
    CHECK(E[0] == g.index({1, 0, 0}));
    CHECK(E[1] == g.index({0, 1, 0}));
    CHECK(rep.structure.exponents[0] == s.t2);
    CHECK(rep.structure.exponents[1] == s.t1);
    for (std::size_t k = 2; k < E.size(); ++k) CHECK(rep.structure.exponents[k] == 1);
  }
}

TEST_CASE("GR sample powers") {
  const HamAlgebra& g = alg5();
  const auto adh = g.ad(el(g, 1, 1, 0));
  CHECK(matpow(adh, 5) == adh);
  CHECK(matpow(g.ad(el(g, 2, 0, 0)), 5).is_zero());
  const HamAlgebra g12(Shape(5, 1, 2));
  const auto adx1 = g12.ad(el(g12, 1, 0, 0));
  CHECK(matpow(adx1, 25).is_zero());
  CHECK_FALSE(matpow(adx1, 5).is_zero());
}

TEST_CASE("phi matches the p-th power of the derivation itself") {
  // (D^N as an operator on O(2;t) x Lambda(1)) must equal D_H(phi(e)).
  for (const auto& s : {Shape(5, 1, 1), Shape(5, 2, 1), Shape(5, 1, 2)}) {
    const HamAlgebra g(s);
    const auto gr = gr_structure(g);
    std::size_t nonzero = 0;
    for (std::size_t k = 0; k < gr.ordered_even_basis.size(); ++k) {
      std::uint64_t N = 1;
      for (std::uint32_t r = 0; r < gr.exponents[k]; ++r) N *= s.p;
      const auto D = g.ambient(g.basis_element(gr.ordered_even_basis[k]));
      const auto Z = g.ambient(gr.phi[k]);
      bool ok = true;
      for (const auto& m : all_monomials(s)) {
        SuperPoly f = SuperPoly::monomial(s, m);
        for (std::uint64_t r = 0; r < N && !f.is_zero(); ++r) f = apply(D, f);
        ok = ok && f == apply(Z, SuperPoly::monomial(s, m));
      }
      CHECK_MESSAGE(ok, "element " << k);
      nonzero += !gr.phi[k].empty();
    }
    CHECK(nonzero == (s.t1 == 1 && s.t2 == 1 ? 1u : 2u));
  }
  const HamAlgebra& g = alg5();
  const auto gr = gr_structure(g);
  for (std::size_t k = 0; k < gr.phi.size(); ++k) {
    if (gr.ordered_even_basis[k] == g.index({1, 1, 0}))
      CHECK(gr.phi[k] == el(g, 1, 1, 0));
    else
      CHECK(gr.phi[k].empty());
  }
}

TEST_CASE("zero component and the osp(1|2) relation table") {
  const HamAlgebra& g = alg5();
  const auto rep = verify_osp(g);
  CHECK(rep.zero_component_dim == 5);
  CHECK(rep.span_rank == 5);
  CHECK(rep.spans_zero_component);
  CHECK(rep.realization_ok());
  CHECK(rep.realization_pairs == 25);
  // The h-eigenvalues of e and f are +-2, not +-1; every other listed
  // relation holds as written.
  REQUIRE(rep.relations.size() == 12);
  for (const auto& r : rep.relations) {
    const bool off_by_two = r.name == "[h,e]=e" || r.name == "[h,f]=-f";
    CHECK_MESSAGE(r.ok == !off_by_two, r.name << " computed " << r.actual);
  }
  CHECK(rep.literal_jacobi_failures > 0);
  CHECK_FALSE(rep.literal_ok());

  const auto o = osp_generators(g);
  const PrimeField& F = g.field();
  auto sc = [&](const HamElement& x, Residue c) {
    HamElement r;
    for (const auto& t : x) r.push_back({t.index, F.mul(t.value, c)});
    return r;
  };
  CHECK(g.bracket(o.h, o.e) == sc(o.e, 2));
  CHECK(g.bracket(o.h, o.f) == sc(o.f, F.neg(2)));
  CHECK(g.bracket(o.E, o.E) == sc(o.e, 2));
  CHECK(g.bracket(o.F, o.F) == sc(o.f, F.neg(2)));
  CHECK(g.bracket(o.E, o.F) == o.h);
  CHECK(osp_coordinates(g, o.E) == std::array<Residue, 5>{0, 0, 0, 1, 0});
  CHECK_THROWS(osp_coordinates(g, g.D1()));
}

TEST_CASE("structure cache round trip and corruption") {
  const auto dir = std::filesystem::temp_directory_path() / "hamkac-test-cache";
  std::filesystem::remove_all(dir);
  const Shape s(5, 1, 1);
  const auto file = dir / structure_cache_name(s);
  CHECK(structure_cache_name(s) == "hamalg-p5-t1-1.json");
  const HamAlgebra built = load_or_build(s, dir);
  REQUIRE(std::filesystem::exists(file));
  const auto loaded = load_structure_cache(s, file);
  REQUIRE(loaded);
  CHECK(loaded->structure_constants().table == built.structure_constants().table);
  CHECK_FALSE(load_structure_cache(Shape(7, 1, 1), file));

  // Flip one digit inside the bracket payload: the checksum rejects it and
  // load_or_build recomputes the correct table.
  std::string text;
  {
    std::ifstream in(file);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto pos = text.find("\"brackets\"");
  REQUIRE(pos != std::string::npos);
  auto digit = text.find_first_of("1234", pos);
  text[digit] = text[digit] == '1' ? '2' : '1';
  {
    std::ofstream out(file);
    out << text;
  }
  CHECK_FALSE(load_structure_cache(s, file));
  const HamAlgebra rebuilt = load_or_build(s, dir);
  CHECK(rebuilt.structure_constants().table == built.structure_constants().table);
  CHECK(load_structure_cache(s, file));
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
