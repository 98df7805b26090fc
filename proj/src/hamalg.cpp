#include "hamkac/hamalg.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hamkac/digest.hpp"

namespace hamkac {

namespace {

int sign_of_parity(std::uint32_t par) { return (par & 1u) ? -1 : 1; }

Residue signed_residue(const PrimeField& F, int sign, Residue v) {
  return sign < 0 ? F.neg(v) : v;
}

/// D_H(f)(g) for homogeneous f: -D2(f) D1(g) + D1(f) D2(g) + (-1)^|f| D3(f) D3(g).
SuperPoly hamiltonian_action(const SuperPoly& f, std::uint32_t f_parity, const SuperPoly& g) {
  const PrimeField F(f.shape().p);
  SuperPoly out = poly_mul(deriv(2, f), deriv(1, g)).scaled(F.neg(1));
  out += poly_mul(deriv(1, f), deriv(2, g));
  SuperPoly odd_term = poly_mul(deriv(3, f), deriv(3, g));
  out += odd_term.scaled(signed_residue(F, sign_of_parity(f_parity), 1));
  return out;
}

}  // namespace

// ------------------------------------------------------ ambient derivations

SuperPoly apply(const AmbientDerivation& D, const SuperPoly& g) {
  SuperPoly out(g.shape());
  for (int k = 0; k < 3; ++k) out += poly_mul(D.components[k], deriv(k + 1, g));
  return out;
}

AmbientDerivation supercommutator(const AmbientDerivation& A, const AmbientDerivation& B) {
  const PrimeField F(A.components[0].shape().p);
  const Residue sign = signed_residue(F, sign_of_parity(A.parity * B.parity), 1);
  AmbientDerivation C{{A.components[0], A.components[1], A.components[2]},
                      (A.parity + B.parity) & 1u};
  for (int k = 0; k < 3; ++k) {
    SuperPoly c = apply(A, B.components[k]);
    c += apply(B, A.components[k]).scaled(F.neg(sign));
    C.components[k] = c;
  }
  return C;
}

// ------------------------------------------------------ structure constants

HamElement StructureConstants::bracket_basis(std::size_t x, const HamElement& y) const {
  SparseAccumulator acc(field, dim());
  for (const auto& e : y) acc.add_scaled(at(x, e.index), e.value);
  return acc.take();
}

HamElement StructureConstants::bracket(const HamElement& x, const HamElement& y) const {
  SparseAccumulator acc(field, dim());
  for (const auto& a : x)
    for (const auto& b : y) acc.add_scaled(at(a.index, b.index), field.mul(a.value, b.value));
  return acc.take();
}

namespace {

template <bool Parallel>
JacobiReport jacobi_impl(const StructureConstants& sc) {
  const std::size_t n = sc.dim();
  const PrimeField& F = sc.field;
  std::vector<JacobiReport> per_x(n);
  auto run_x = [&](std::size_t x, SparseAccumulator& acc) {
    JacobiReport& rep = per_x[x];
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        const auto px = sc.parity[x], py = sc.parity[y], pz = sc.parity[z];
        acc.add_scaled(sc.bracket_basis(x, sc.at(y, z)),
                       signed_residue(F, sign_of_parity(px * pz), 1));
        acc.add_scaled(sc.bracket_basis(y, sc.at(z, x)),
                       signed_residue(F, sign_of_parity(py * px), 1));
        acc.add_scaled(sc.bracket_basis(z, sc.at(x, y)),
                       signed_residue(F, sign_of_parity(pz * py), 1));
        HamElement r = acc.take();
        ++rep.triples_checked;
        if (!r.empty()) {
          if (!rep.failures) rep.first_failure = JacobiWitness{x, y, z, std::move(r)};
          ++rep.failures;
        }
      }
    }
  };
  const auto nn = static_cast<std::ptrdiff_t>(n);
  if constexpr (Parallel) {
#pragma omp parallel
    {
      SparseAccumulator acc(F, n);
#pragma omp for schedule(dynamic)
      for (std::ptrdiff_t x = 0; x < nn; ++x) run_x(static_cast<std::size_t>(x), acc);
    }
  } else {
    SparseAccumulator acc(F, n);
    for (std::size_t x = 0; x < n; ++x) run_x(x, acc);
  }
  JacobiReport total;
  for (auto& r : per_x) {
    total.triples_checked += r.triples_checked;
    if (r.failures && !total.first_failure) total.first_failure = r.first_failure;
    total.failures += r.failures;
  }
  return total;
}

}  // namespace

JacobiReport check_jacobi(const StructureConstants& sc) { return jacobi_impl<true>(sc); }
JacobiReport check_jacobi_serial(const StructureConstants& sc) { return jacobi_impl<false>(sc); }

JacobiReport check_jacobi_sampled(const StructureConstants& sc, std::size_t samples,
                                  std::uint64_t seed) {
  const std::size_t n = sc.dim();
  const PrimeField& F = sc.field;
  std::mt19937_64 rng(seed);
  SparseAccumulator acc(F, n);
  JacobiReport rep;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t x = uniform_below(rng, n), y = uniform_below(rng, n),
                      z = uniform_below(rng, n);
    const auto px = sc.parity[x], py = sc.parity[y], pz = sc.parity[z];
    acc.add_scaled(sc.bracket_basis(x, sc.at(y, z)), signed_residue(F, sign_of_parity(px * pz), 1));
    acc.add_scaled(sc.bracket_basis(y, sc.at(z, x)), signed_residue(F, sign_of_parity(py * px), 1));
    acc.add_scaled(sc.bracket_basis(z, sc.at(x, y)), signed_residue(F, sign_of_parity(pz * py), 1));
    HamElement r = acc.take();
    ++rep.triples_checked;
    if (!r.empty()) {
      if (!rep.failures) rep.first_failure = JacobiWitness{x, y, z, std::move(r)};
      ++rep.failures;
    }
  }
  return rep;
}

// ------------------------------------------------------------------ basis

std::vector<Monomial> canonical_basis(const Shape& shape) {
  std::vector<Monomial> basis;
  for (std::uint32_t i1 = 0; i1 < shape.n1(); ++i1)
    for (std::uint32_t i2 = 0; i2 < shape.n2(); ++i2)
      for (std::uint32_t j = 0; j < 2; ++j)
        if (i1 + i2 + j >= 1) basis.push_back({i1, i2, j});
  return basis;
}

namespace {

HamElement d_h_in(const Shape& shape, const std::vector<std::int64_t>& index,
                  const SuperPoly& f) {
  HamElement out;
  for (const auto& [m, c] : f.terms()) {
    if (degree(m) == 0) continue;
    const auto key = (static_cast<std::size_t>(m.i1) * shape.n2() + m.i2) * 2 + m.j;
    out.push_back({static_cast<std::uint32_t>(index[key]), c});
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
  return out;
}

std::vector<std::int64_t> dense_index(const Shape& shape, const std::vector<Monomial>& basis) {
  std::vector<std::int64_t> index(static_cast<std::size_t>(shape.n1()) * shape.n2() * 2, -1);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& m = basis[i];
    index[(static_cast<std::size_t>(m.i1) * shape.n2() + m.i2) * 2 + m.j] =
        static_cast<std::int64_t>(i);
  }
  return index;
}

template <bool Parallel>
StructureConstants build_impl(const Shape& shape, const std::vector<Monomial>& basis) {
  const std::size_t n = basis.size();
  StructureConstants sc{PrimeField(shape.p), {}, std::vector<HamElement>(n * n)};
  for (const auto& m : basis) sc.parity.push_back(m.parity());
  const auto index = dense_index(shape, basis);
  auto row = [&](std::size_t x) {
    const SuperPoly f = SuperPoly::monomial(shape, basis[x]);
    for (std::size_t y = 0; y < n; ++y) {
      const SuperPoly g = SuperPoly::monomial(shape, basis[y]);
      sc.table[x * n + y] = d_h_in(shape, index, hamiltonian_action(f, basis[x].parity(), g));
    }
  };
  const auto nn = static_cast<std::ptrdiff_t>(n);
  if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t x = 0; x < nn; ++x) row(static_cast<std::size_t>(x));
  } else {
    for (std::size_t x = 0; x < n; ++x) row(x);
  }
  return sc;
}

}  // namespace

StructureConstants build_structure_constants(const Shape& shape,
                                             const std::vector<Monomial>& basis) {
  return build_impl<true>(shape, basis);
}

StructureConstants build_structure_constants_serial(const Shape& shape,
                                                    const std::vector<Monomial>& basis) {
  return build_impl<false>(shape, basis);
}

HamAlgebra::HamAlgebra(const Shape& shape)
    : shape_(shape), sc_{PrimeField(shape.p), {}, {}} {
  enumerate_basis();
  sc_ = build_structure_constants(shape_, basis_);
}

HamAlgebra::HamAlgebra(const Shape& shape, StructureConstants table)
    : shape_(shape), sc_(std::move(table)) {
  enumerate_basis();
  if (sc_.dim() != basis_.size() || sc_.table.size() != basis_.size() * basis_.size())
    throw std::invalid_argument("structure constants do not match shape");
}

void HamAlgebra::enumerate_basis() {
  basis_ = canonical_basis(shape_);
  index_ = dense_index(shape_, basis_);
  max_grade_ = -1;
  for (const auto& m : basis_) max_grade_ = std::max(max_grade_, static_cast<int>(degree(m)) - 2);
}

std::int64_t HamAlgebra::stated_max_grade() const {
  std::int64_t n = 1;
  for (std::uint32_t i = 0; i < shape_.t1 + shape_.t2; ++i) n *= shape_.p;
  return n - 3;
}

std::optional<std::size_t> HamAlgebra::index_of(const Monomial& m) const {
  if (!in_range(shape_, m)) return std::nullopt;
  const auto v = index_[(static_cast<std::size_t>(m.i1) * shape_.n2() + m.i2) * 2 + m.j];
  if (v < 0) return std::nullopt;
  return static_cast<std::size_t>(v);
}

std::size_t HamAlgebra::index(const Monomial& m) const {
  auto i = index_of(m);
  if (!i) throw std::out_of_range("monomial is not a basis label");
  return *i;
}

std::vector<std::size_t> HamAlgebra::graded_component(int g) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < basis_.size(); ++i)
    if (grade(i) == g) out.push_back(i);
  return out;
}

HamElement HamAlgebra::d_h(const SuperPoly& f) const {
  if (!(f.shape() == shape_)) throw std::invalid_argument("d_h: shape mismatch");
  return d_h_in(shape_, index_, f);
}

AmbientDerivation HamAlgebra::ambient(const SuperPoly& f) const {
  const PrimeField& F = field();
  AmbientDerivation D{{SuperPoly(shape_), SuperPoly(shape_), SuperPoly(shape_)}, f.parity()};
  for (const SuperPoly& part : {f.even_part(), f.odd_part()}) {
    if (part.is_zero()) continue;
    const int sign = sign_of_parity(part.parity());
    D.components[0] += deriv(2, part).scaled(F.neg(1));
    D.components[1] += deriv(1, part);
    D.components[2] += deriv(3, part).scaled(signed_residue(F, sign, 1));
  }
  return D;
}

AmbientDerivation HamAlgebra::ambient(const HamElement& x) const {
  SuperPoly f(shape_);
  for (const auto& e : x) f.add_term(basis_[e.index], e.value);
  return ambient(f);
}

HamElement HamAlgebra::basis_element(std::size_t i, Residue c) const {
  c %= shape_.p;
  if (c == 0) return {};
  return {{static_cast<std::uint32_t>(i), c}};
}

std::uint32_t HamAlgebra::parity_of(const HamElement& x) const {
  if (x.empty()) return 0;
  const auto par = parity(x.front().index);
  for (const auto& e : x)
    if (parity(e.index) != par) throw std::domain_error("inhomogeneous element");
  return par;
}

SparseMatrix HamAlgebra::ad(const HamElement& x) const {
  std::vector<SparseVec> cols(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    SparseAccumulator acc(field(), dim());
    for (const auto& e : x) acc.add_scaled(sc_.at(e.index, j), e.value);
    cols[j] = acc.take();
  }
  return SparseMatrix::from_columns(field(), dim(), cols);
}

HamElement HamAlgebra::D1() const { return basis_element(index({0, 1, 0}), field().neg(1)); }
HamElement HamAlgebra::D2() const { return basis_element(index({1, 0, 0})); }
HamElement HamAlgebra::D3() const { return basis_element(index({0, 0, 1}), field().neg(1)); }

// --------------------------------------------------------------------- GR

namespace {

// phi_s(e): the z with ad z = (ad e)^N, N = p^s. The power shifts grades by
// N * grade(e), so z lies in one graded component; its brackets with g_-1
// pin it down because g_-1 is its own centralizer. Returns zero when no
// candidate matches on g_-1, leaving the mismatch to verify_gr.
HamElement solve_phi(const HamAlgebra& g, std::size_t e, std::uint64_t N) {
  const PrimeField& F = g.field();
  const std::int64_t target = static_cast<std::int64_t>(N) * g.grade(e);
  if (target < g.min_grade() || target > g.max_grade()) return {};
  std::vector<std::size_t> comp;
  for (auto k : g.graded_component(static_cast<int>(target)))
    if (g.parity(k) == 0) comp.push_back(k);
  const auto ys = g.graded_component(-1);
  const std::size_t n = g.dim();
  DenseMatrix A(F, ys.size() * n, comp.size() + 1);
  for (std::size_t yi = 0; yi < ys.size(); ++yi) {
    for (std::size_t ci = 0; ci < comp.size(); ++ci)
      for (const auto& t : g.bracket_basis(comp[ci], ys[yi])) A(yi * n + t.index, ci) = t.value;
    HamElement v = g.basis_element(ys[yi]);
    for (std::uint64_t r = 0; r < N && !v.empty(); ++r)
      v = g.structure_constants().bracket_basis(e, v);
    for (const auto& t : v) A(yi * n + t.index, comp.size()) = F.neg(t.value);
  }
  for (const auto& v : kernel_basis(A)) {
    if (!v.back()) continue;
    const Residue inv = F.inv(v.back());
    HamElement z;
    for (std::size_t ci = 0; ci < comp.size(); ++ci)
      if (v[ci]) z.push_back({static_cast<std::uint32_t>(comp[ci]), F.mul(v[ci], inv)});
    std::sort(z.begin(), z.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
    return z;
  }
  return {};
}

}  // namespace

GRStructure gr_structure(const HamAlgebra& g) {
  GRStructure gr;
  for (std::size_t i = 0; i < g.dim(); ++i)
    if (g.parity(i) == 0) gr.ordered_even_basis.push_back(i);
  std::stable_sort(gr.ordered_even_basis.begin(), gr.ordered_even_basis.end(),
                   [&](std::size_t a, std::size_t b) {
                     const auto &ma = g.label(a), &mb = g.label(b);
                     if (degree(ma) != degree(mb)) return degree(ma) < degree(mb);
                     return ma.i1 > mb.i1;
                   });
  const std::size_t x1 = g.index({1, 0, 0}), x2 = g.index({0, 1, 0});
  for (auto i : gr.ordered_even_basis) {
    if (i == x1) gr.exponents.push_back(g.shape().t2);
    else if (i == x2) gr.exponents.push_back(g.shape().t1);
    else gr.exponents.push_back(1);
  }
  gr.phi.resize(gr.ordered_even_basis.size());
  const auto m = static_cast<std::ptrdiff_t>(gr.ordered_even_basis.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < m; ++k) {
    std::uint64_t N = 1;
    for (std::uint32_t s = 0; s < gr.exponents[k]; ++s) N *= g.shape().p;
    gr.phi[k] = solve_phi(g, gr.ordered_even_basis[k], N);
  }
  return gr;
}

GRReport verify_gr(const HamAlgebra& g) {
  GRReport rep{gr_structure(g), true, 0, std::nullopt};
  const auto& gr = rep.structure;
  const std::size_t m = gr.ordered_even_basis.size();
  std::vector<std::optional<std::size_t>> bad_target(m);
  const auto mm = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < mm; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const auto e = gr.ordered_even_basis[kk];
    std::uint64_t power = 1;
    for (std::uint32_t s = 0; s < gr.exponents[kk]; ++s) power *= g.shape().p;
    const SparseMatrix lhs = matpow(g.ad(g.basis_element(e)), power);
    const SparseMatrix rhs = g.ad(gr.phi[kk]);
    if (!(lhs == rhs)) {
      for (std::size_t y = 0; y < g.dim(); ++y) {
        if (lhs.column(y) != rhs.column(y)) {
          bad_target[kk] = y;
          break;
        }
      }
    }
  }
  rep.checked = m;
  for (std::size_t k = 0; k < m; ++k) {
    if (bad_target[k]) {
      rep.ok = false;
      rep.counterexample = std::make_pair(gr.ordered_even_basis[k], *bad_target[k]);
      break;
    }
  }
  return rep;
}

// ---------------------------------------------------------------- osp(1|2)

OspGenerators osp_generators(const HamAlgebra& g) {
  const PrimeField& F = g.field();
  const auto& s = g.shape();
  // h = x2D2 - x1D1, f = x1D2, e = x2D1, F = xi D2 - x1 D3, E = xi D1 + x2 D3.
  return {g.d_h(SuperPoly::monomial(s, {1, 1, 0})),
          g.d_h(SuperPoly::monomial(s, {0, 2, 0}, F.neg(1))),
          g.d_h(SuperPoly::monomial(s, {2, 0, 0})),
          g.d_h(SuperPoly::monomial(s, {0, 1, 1}, F.neg(1))),
          g.d_h(SuperPoly::monomial(s, {1, 0, 1}))};
}

bool OspReport::literal_ok() const {
  return spans_zero_component && zero_component_dim == 5 && span_rank == 5 &&
         std::all_of(relations.begin(), relations.end(), [](const auto& r) { return r.ok; });
}

bool OspReport::realization_ok() const {
  return spans_zero_component && zero_component_dim == 5 && span_rank == 5 &&
         realization_pairs == 25 && realization_failures == 0;
}

std::array<Residue, 5> osp_coordinates(const HamAlgebra& g, const HamElement& x) {
  const PrimeField& F = g.field();
  std::array<Residue, 5> c{};
  for (const auto& t : x) {
    const Monomial& m = g.label(t.index);
    if (m == Monomial{1, 1, 0}) c[0] = t.value;
    else if (m == Monomial{0, 2, 0}) c[1] = F.neg(t.value);
    else if (m == Monomial{2, 0, 0}) c[2] = t.value;
    else if (m == Monomial{0, 1, 1}) c[3] = F.neg(t.value);
    else if (m == Monomial{1, 0, 1}) c[4] = t.value;
    else throw std::invalid_argument("osp_coordinates: support outside g_[0]");
  }
  return c;
}

namespace {

constexpr std::array<const char*, 5> kOsp{"h", "e", "f", "E", "F"};
constexpr std::array<std::uint32_t, 5> kOspPar{0, 0, 0, 1, 1};

std::string osp_string(const PrimeField& F, const std::array<Residue, 5>& c) {
  std::string out;
  for (int i = 0; i < 5; ++i) {
    if (!c[i]) continue;
    const auto v = F.lift(c[i]);
    if (!out.empty()) out += v < 0 ? " - " : " + ";
    else if (v < 0) out += "-";
    const auto a = v < 0 ? -v : v;
    if (a != 1) out += std::to_string(a);
    out += kOsp[i];
  }
  return out.empty() ? "0" : out;
}

using Mat3 = std::array<std::array<std::int64_t, 3>, 3>;

/// The five generators as 3x3 supermatrices; index 0 even, 1 and 2 odd.
std::array<Mat3, 5> osp_matrices() {
  std::array<Mat3, 5> m{};
  m[0][1][1] = 1, m[0][2][2] = -1;  // h = E22 - E33
  m[1][1][2] = 1;                   // e = E23
  m[2][2][1] = 1;                   // f = E32
  m[3][0][2] = 1, m[3][1][0] = 1;   // E = E13 + E21
  m[4][0][1] = 1, m[4][2][0] = -1;  // F = E12 - E31
  return m;
}

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

/// Coordinates of m over the five generator matrices, or nullopt.
std::optional<std::array<Residue, 5>> matrix_coordinates(const PrimeField& F, const Mat3& m) {
  const auto gens = osp_matrices();
  DenseMatrix A(F, 9, 6);
  for (int i = 0; i < 9; ++i) {
    for (int k = 0; k < 5; ++k) A(i, k) = F.reduce(gens[k][i / 3][i % 3]);
    A(i, 5) = F.reduce(-m[i / 3][i % 3]);
  }
  for (const auto& z : kernel_basis(A)) {
    if (!z[5]) continue;
    const Residue inv = F.inv(z[5]);
    std::array<Residue, 5> c{};
    for (int k = 0; k < 5; ++k) c[k] = F.mul(z[k], inv);
    return c;
  }
  return std::nullopt;
}

}  // namespace

OspReport verify_osp(const HamAlgebra& g) {
  const PrimeField& F = g.field();
  const auto gens = osp_generators(g);
  const std::array<const HamElement*, 5> elem{&gens.h, &gens.e, &gens.f, &gens.E, &gens.F};
  auto bracket = [&](int a, int b) { return osp_coordinates(g, g.bracket(*elem[a], *elem[b])); };

  struct Rel {
    const char* name;
    int a, b;
    std::array<std::int64_t, 5> rhs;
  };
  const std::vector<Rel> rels = {
      {"[h,e]=e", 0, 1, {0, 1, 0, 0, 0}},   {"[h,f]=-f", 0, 2, {0, 0, -1, 0, 0}},
      {"[h,E]=E", 0, 3, {0, 0, 0, 1, 0}},   {"[h,F]=-F", 0, 4, {0, 0, 0, 0, -1}},
      {"[e,f]=h", 1, 2, {1, 0, 0, 0, 0}},   {"[e,E]=0", 1, 3, {0, 0, 0, 0, 0}},
      {"[e,F]=-E", 1, 4, {0, 0, 0, -1, 0}}, {"[f,E]=-F", 2, 3, {0, 0, 0, 0, -1}},
      {"[f,F]=0", 2, 4, {0, 0, 0, 0, 0}},   {"[E,E]=2e", 3, 3, {0, 2, 0, 0, 0}},
      {"[E,F]=h", 3, 4, {1, 0, 0, 0, 0}},   {"[F,F]=-2f", 4, 4, {0, 0, -2, 0, 0}},
  };
  OspReport rep;
  // The literal table, completed by super-antisymmetry, as a 5-dim algebra.
  StructureConstants lit{F, {kOspPar.begin(), kOspPar.end()}, std::vector<HamElement>(25)};
  for (const auto& r : rels) {
    std::array<Residue, 5> want{};
    for (int k = 0; k < 5; ++k) want[k] = F.reduce(r.rhs[k]);
    const auto got = bracket(r.a, r.b);
    rep.relations.push_back({r.name, got == want, osp_string(F, got)});
    HamElement v;
    for (int k = 0; k < 5; ++k)
      if (want[k]) v.push_back({static_cast<std::uint32_t>(k), want[k]});
    lit.table[r.a * 5 + r.b] = v;
    const Residue sign = (kOspPar[r.a] & kOspPar[r.b]) ? 1 : F.neg(1);
    lit.table[r.b * 5 + r.a] = sparse_scale(F, v, sign);
  }
  rep.literal_jacobi_failures = check_jacobi_serial(lit).failures;

  const auto mats = osp_matrices();
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      ++rep.realization_pairs;
      const Mat3 ab = mat_mul(mats[a], mats[b]), ba = mat_mul(mats[b], mats[a]);
      const int sign = (kOspPar[a] & kOspPar[b]) ? 1 : -1;
      Mat3 sc{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) sc[i][j] = ab[i][j] + sign * ba[i][j];
      const auto want = matrix_coordinates(F, sc);
      if (!want || bracket(a, b) != *want) ++rep.realization_failures;
    }
  }

  const auto zero = g.graded_component(0);
  rep.zero_component_dim = zero.size();
  DenseMatrix M(F, 5, g.dim());
  bool in_zero = true;
  for (std::size_t row = 0; row < 5; ++row) {
    for (const auto& entry : *elem[row]) {
      M(row, entry.index) = entry.value;
      if (g.grade(entry.index) != 0) in_zero = false;
    }
  }
  rep.span_rank = rank(M);
  rep.spans_zero_component = in_zero && rep.span_rank == zero.size();
  return rep;
}

std::size_t check_closure_in_derivations(const HamAlgebra& g) {
  std::vector<AmbientDerivation> amb;
  amb.reserve(g.dim());
  for (std::size_t i = 0; i < g.dim(); ++i) amb.push_back(g.ambient(g.basis_element(i)));
  std::size_t mismatches = 0;
  for (std::size_t x = 0; x < g.dim(); ++x) {
    for (std::size_t y = 0; y < g.dim(); ++y) {
      const AmbientDerivation c = supercommutator(amb[x], amb[y]);
      const AmbientDerivation t = g.ambient(g.bracket_basis(x, y));
      for (int k = 0; k < 3; ++k) {
        if (!(c.components[k] == t.components[k])) {
          ++mismatches;
          break;
        }
      }
    }
  }
  return mismatches;
}

// -------------------------------------------------------------- cache file

using nlohmann::json;

namespace {

json structure_payload(const HamAlgebra& g) {
  json basis = json::array();
  for (const auto& m : g.basis()) basis.push_back({m.i1, m.i2, m.j});
  json brackets = json::array();
  for (std::size_t x = 0; x < g.dim(); ++x) {
    for (std::size_t y = 0; y < g.dim(); ++y) {
      const auto& z = g.bracket_basis(x, y);
      if (z.empty()) continue;
      json terms = json::array();
      for (const auto& e : z) terms.push_back({e.index, e.value});
      brackets.push_back({x, y, terms});
    }
  }
  return json{{"version", kStructureCacheVersion},
              {"p", g.shape().p},
              {"t1", g.shape().t1},
              {"t2", g.shape().t2},
              {"basis", basis},
              {"brackets", brackets}};
}

}  // namespace

std::string structure_cache_name(const Shape& shape) {
  std::ostringstream os;
  os << "hamalg-p" << shape.p << "-t" << shape.t1 << "-" << shape.t2 << ".json";
  return os.str();
}

void save_structure_cache(const HamAlgebra& g, const std::filesystem::path& file) {
  json doc = structure_payload(g);
  doc["checksum"] = sha256_hex(doc.dump());
  std::filesystem::create_directories(file.parent_path().empty() ? "." : file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << doc.dump() << '\n';
  }
  std::filesystem::rename(tmp, file);
}

std::optional<HamAlgebra> load_structure_cache(const Shape& shape,
                                               const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  try {
    json doc = json::parse(in);
    if (doc.at("version").get<int>() != kStructureCacheVersion) return std::nullopt;
    if (doc.at("p").get<std::uint32_t>() != shape.p ||
        doc.at("t1").get<std::uint32_t>() != shape.t1 ||
        doc.at("t2").get<std::uint32_t>() != shape.t2)
      return std::nullopt;
    const std::string checksum = doc.at("checksum").get<std::string>();
    doc.erase("checksum");
    if (sha256_hex(doc.dump()) != checksum) return std::nullopt;

    const auto basis = canonical_basis(shape);
    const auto& jb = doc.at("basis");
    if (jb.size() != basis.size()) return std::nullopt;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const Monomial m{jb[i][0].get<std::uint32_t>(), jb[i][1].get<std::uint32_t>(),
                       jb[i][2].get<std::uint32_t>()};
      if (!(m == basis[i])) return std::nullopt;
    }
    const std::size_t n = basis.size();
    StructureConstants sc{PrimeField(shape.p), {}, std::vector<HamElement>(n * n)};
    for (const auto& m : basis) sc.parity.push_back(m.parity());
    for (const auto& b : doc.at("brackets")) {
      const auto x = b[0].get<std::size_t>(), y = b[1].get<std::size_t>();
      if (x >= n || y >= n) return std::nullopt;
      HamElement z;
      for (const auto& t : b[2]) {
        const auto idx = t[0].get<std::uint32_t>();
        const auto val = t[1].get<Residue>();
        if (idx >= n || val == 0 || val >= shape.p) return std::nullopt;
        z.push_back({idx, val});
      }
      sc.table[x * n + y] = std::move(z);
    }
    return HamAlgebra(shape, std::move(sc));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

HamAlgebra load_or_build(const Shape& shape, const std::optional<std::filesystem::path>& dir) {
  if (dir) {
    const auto file = *dir / structure_cache_name(shape);
    if (auto cached = load_structure_cache(shape, file)) return std::move(*cached);
    HamAlgebra g(shape);
    save_structure_cache(g, file);
    return g;
  }
  return HamAlgebra(shape);
}

}  // namespace hamkac
