#include "hamkac/l0rep.hpp"

#include <sstream>
#include <stdexcept>

#include "hamkac/repkit.hpp"

namespace hamkac {

std::optional<std::size_t> L0Module::index_of(std::uint32_t k, std::uint32_t l) const {
  if (l > 1) return std::nullopt;
  if (lambda == 0) return (k == 0 && l == 0) ? std::optional<std::size_t>(0) : std::nullopt;
  if (l == 0 && k > lambda) return std::nullopt;
  if (l == 1 && k >= lambda) return std::nullopt;
  return 2 * static_cast<std::size_t>(k) + l;
}

L0Module build_l0(const PrimeField& F, Residue lambda) {
  if (lambda >= F.modulus()) throw std::invalid_argument("lambda must lie in [0, p)");
  L0Module L{F, lambda, {}, {SparseMatrix(F, 0, 0), SparseMatrix(F, 0, 0), SparseMatrix(F, 0, 0),
                             SparseMatrix(F, 0, 0), SparseMatrix(F, 0, 0)}};
  for (std::uint32_t k = 0; k <= lambda; ++k) {
    L.basis.push_back({k, 0});
    if (k < lambda) L.basis.push_back({k, 1});
  }
  const std::size_t n = L.dim();
  std::array<std::vector<SparseVec>, 5> cols;
  for (auto& c : cols) c.resize(n);
  const std::int64_t lam = lambda;
  auto put = [&](OspName x, std::size_t col, std::int64_t k, std::uint32_t l, std::int64_t c) {
    if (k < 0) return;
    auto row = L.index_of(static_cast<std::uint32_t>(k), l);
    const Residue v = F.reduce(c);
    if (!row || v == 0) return;
    cols[static_cast<int>(x)][col].push_back({static_cast<std::uint32_t>(*row), v});
  };
  for (std::size_t j = 0; j < n; ++j) {
    const std::int64_t k = L.basis[j].k;
    if (L.basis[j].l == 0) {
      put(OspName::h, j, k, 0, lam - 2 * k);
      put(OspName::F, j, k, 1, 1);
      put(OspName::f, j, k + 1, 0, 1);
      put(OspName::e, j, k - 1, 0, k * (lam + 1 - k));
      put(OspName::E, j, k - 1, 1, k);
    } else {
      put(OspName::h, j, k, 1, lam - 2 * k - 1);
      put(OspName::F, j, k + 1, 0, -1);
      put(OspName::f, j, k + 1, 1, 1);
      put(OspName::e, j, k - 1, 1, k * (lam - k));
      put(OspName::E, j, k, 0, lam - k);
    }
  }
  for (int x = 0; x < 5; ++x) L.action[x] = SparseMatrix::from_columns(F, n, cols[x]);
  return L;
}

SparseMatrix rho_g0(const HamAlgebra& g, const L0Module& L, const HamElement& x) {
  const PrimeField& F = L.field;
  SparseMatrix out(F, L.dim(), L.dim());
  for (const auto& t : x) {
    const int gr = g.grade(t.index);
    if (gr < 0) throw std::invalid_argument("rho_g0: element has grade -1 support");
    if (gr > 0) continue;
    const Monomial& m = g.label(t.index);
    OspName name;
    Residue c = t.value;
    if (m == Monomial{1, 1, 0}) {
      name = OspName::h;
    } else if (m == Monomial{2, 0, 0}) {
      name = OspName::f;
    } else if (m == Monomial{0, 2, 0}) {
      name = OspName::e;
      c = F.neg(c);
    } else if (m == Monomial{1, 0, 1}) {
      name = OspName::F;
    } else {
      name = OspName::E;  // (0,1,1)
      c = F.neg(c);
    }
    out = add_scaled(out, c, L.rho(name));
  }
  return out;
}

bool L0Report::ok() const {
  if (failing_pair || pairs_checked != 25 || trace_h_table != trace_h_rule) return false;
  for (const auto& [name, good] : identities)
    if (!good) return false;
  return simple && endo_dim == 1;
}

L0Report check_l0(const L0Module& L, const HamAlgebra& g) {
  const PrimeField& F = L.field;
  const auto gens = osp_generators(g);
  const std::array<const HamElement*, 5> elems{&gens.h, &gens.e, &gens.f, &gens.E, &gens.F};
  L0Report rep;
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      ++rep.pairs_checked;
      const SparseMatrix lhs = rho_g0(g, L, g.bracket(*elems[a], *elems[b]));
      const Residue sign = (kOspParity[a] & kOspParity[b]) ? 1 : F.neg(1);
      const SparseMatrix rhs =
          add_scaled(multiply(L.action[a], L.action[b]), sign, multiply(L.action[b], L.action[a]));
      if (!(lhs == rhs) && !rep.failing_pair)
        rep.failing_pair = std::make_pair(static_cast<OspName>(a), static_cast<OspName>(b));
    }
  }
  const auto p = F.modulus();
  const std::size_t n = L.dim();
  const SparseMatrix zero(F, n, n);
  rep.identities.push_back({"rho(h)^p = rho(h)", matpow(L.rho(OspName::h), p) == L.rho(OspName::h)});
  rep.identities.push_back({"rho(e)^p = 0", matpow(L.rho(OspName::e), p) == zero});
  rep.identities.push_back({"rho(f)^p = 0", matpow(L.rho(OspName::f), p) == zero});
  rep.identities.push_back(
      {"rho(E)^2 = rho(e)", multiply(L.rho(OspName::E), L.rho(OspName::E)) == L.rho(OspName::e)});
  rep.identities.push_back({"rho(F)^2 = -rho(f)", multiply(L.rho(OspName::F), L.rho(OspName::F)) ==
                                                      scale(L.rho(OspName::f), F.neg(1))});

  for (std::size_t i = 0; i < n; ++i) {
    rep.trace_h_table += F.lift(L.rho(OspName::h).at(i, i));
    const std::int64_t k = L.basis[i].k;
    rep.trace_h_rule += F.lift(F.reduce(static_cast<std::int64_t>(L.lambda) - 2 * k -
                                        static_cast<std::int64_t>(L.basis[i].l)));
  }

  const Representation R = representation(L);
  rep.simple = true;
  for (std::size_t i = 0; i < n && rep.simple; ++i) {
    DenseVec v(n, 0);
    v[i] = 1;
    rep.simple = spin(F, n, {v}, R.generators).full();
  }
  rep.endo_dim = hom_dim_direct(R, R).even;
  return rep;
}

std::string dump_l0(const L0Module& L) {
  std::ostringstream os;
  os << "L0(" << L.lambda << ") over F_" << L.field.modulus() << ", dim " << L.dim() << "\nbasis:";
  for (const auto& b : L.basis) os << " v(" << b.k << "," << b.l << ")";
  os << '\n';
  for (int x = 0; x < 5; ++x) {
    os << kOspNames[x] << ":\n";
    for (std::size_t i = 0; i < L.dim(); ++i) {
      os << " ";
      for (std::size_t j = 0; j < L.dim(); ++j) os << ' ' << L.field.lift(L.action[x].at(i, j));
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace hamkac
