#include "hamkac/kacmod.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hamkac/digest.hpp"

namespace hamkac {

std::string to_string(ChiType t) {
  switch (t) {
    case ChiType::I: return "I";
    case ChiType::II: return "II";
    case ChiType::III: return "III";
    case ChiType::Custom: return "custom";
  }
  return "custom";
}

bool Character::is_zero() const {
  for (auto v : values)
    if (v) return false;
  return true;
}

Character make_character(const HamAlgebra& g, ChiType t) {
  const PrimeField& F = g.field();
  Character chi{t, std::vector<Residue>(g.dim(), 0)};
  const auto x1 = g.index({1, 0, 0}), x2 = g.index({0, 1, 0});
  // chi(D1) = -chi(D_H(x2)), chi(D2) = chi(D_H(x1)).
  switch (t) {
    case ChiType::I:
      chi.values[x2] = F.neg(1);
      chi.values[x1] = 1;
      break;
    case ChiType::II:
      chi.values[x2] = F.neg(1);
      break;
    case ChiType::III:
      chi.values[x1] = 1;
      break;
    case ChiType::Custom:
      throw std::invalid_argument("use custom_character for custom values");
  }
  return chi;
}

Character custom_character(const HamAlgebra& g, const std::map<std::size_t, Residue>& values) {
  Character chi{ChiType::Custom, std::vector<Residue>(g.dim(), 0)};
  for (const auto& [i, v] : values) {
    if (i >= g.dim()) throw std::invalid_argument("character index out of range");
    const Residue r = v % g.shape().p;
    if (r && g.parity(i)) throw std::invalid_argument("character must vanish on the odd part");
    chi.values[i] = r;
  }
  return chi;
}

Residue chi_D1(const HamAlgebra& g, const Character& chi) {
  return g.field().neg(chi.at(g.index({0, 1, 0})));
}

Residue chi_D2(const HamAlgebra& g, const Character& chi) { return chi.at(g.index({1, 0, 0})); }

int height(const Character& chi, const HamAlgebra& g) {
  int top = -2;
  for (std::size_t i = 0; i < g.dim(); ++i)
    if (chi.at(i)) top = std::max(top, g.grade(i));
  return top + 1;
}

std::uint64_t kac_dimension(const Shape& s, Residue lambda) {
  const std::uint64_t base = 2ull * s.n1() * s.n2();
  return lambda == 0 ? base : base * (2ull * lambda + 1);
}

// ----------------------------------------------------------------- module

KacModule::KacModule(const HamAlgebra& g, Character chi, L0Module l0,
                     std::vector<SparseMatrix> actions)
    : g_(&g),
      chi_(std::move(chi)),
      l0_(std::move(l0)),
      n1_(g.shape().n1()),
      n2_(g.shape().n2()),
      dim_(2 * n1_ * n2_ * l0_.dim()),
      actions_(std::move(actions)) {
  if (chi_.values.size() != g.dim()) throw std::invalid_argument("character size mismatch");
  if (!actions_.empty() && actions_.size() != g.dim())
    throw std::invalid_argument("one action matrix per basis element required");
}

std::size_t KacModule::index(const KacIndex& m) const {
  return ((static_cast<std::size_t>(m.a) * n2_ + m.b) * 2 + m.c) * l0_.dim() + m.r;
}

KacIndex KacModule::decode(std::size_t i) const {
  KacIndex m;
  const std::size_t d = l0_.dim();
  m.r = static_cast<std::uint32_t>(i % d);
  i /= d;
  m.c = static_cast<std::uint32_t>(i % 2);
  i /= 2;
  m.b = static_cast<std::uint32_t>(i % n2_);
  m.a = static_cast<std::uint32_t>(i / n2_);
  return m;
}

std::uint32_t KacModule::parity(std::size_t i) const {
  const KacIndex m = decode(i);
  return (m.c + l0_.parity(m.r)) & 1u;
}

SparseMatrix KacModule::rho(const HamElement& x) const {
  SparseMatrix out(g_->field(), dim_, dim_);
  for (const auto& t : x) out = add_scaled(out, t.value, actions_[t.index]);
  return out;
}

SparseVec KacModule::act(std::size_t x, const KacIndex& m) const {
  return actions_[x].column(index(m));
}

SparseVec KacModule::lower(int k, const SparseVec& v) const {
  const PrimeField& F = g_->field();
  SparseVec out;
  out.reserve(v.size());
  Residue wrap = 0;
  if (k == 1) wrap = F.pow(chi_D1(*g_, chi_), n1_);
  if (k == 2) wrap = F.pow(chi_D2(*g_, chi_), n2_);
  for (const auto& e : v) {
    KacIndex m = decode(e.index);
    Residue c = e.value;
    switch (k) {
      case 1:
        if (++m.a == n1_) {
          m.a = 0;
          c = F.mul(c, wrap);
        }
        break;
      case 2:
        if (++m.b == n2_) {
          m.b = 0;
          c = F.mul(c, wrap);
        }
        break;
      case 3:
        if (m.c == 1) c = 0;  // D3^2 = [D3,D3]/2 = 0
        m.c = 1;
        break;
      default:
        throw std::invalid_argument("lower: k must be 1, 2 or 3");
    }
    if (c) out.push_back({static_cast<std::uint32_t>(index(m)), c});
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
  // The shift is a bijection on indices, so entries stay distinct.
  return out;
}

namespace {

struct Peeled {
  int k;  // abbreviation D_k peeled from the left
  KacIndex rest;
};

Peeled peel(const KacIndex& m, PeelOrder order) {
  Peeled p{0, m};
  if (order == PeelOrder::D1First) {
    if (m.a > 0) {
      p.k = 1;
      --p.rest.a;
    } else if (m.b > 0) {
      p.k = 2;
      --p.rest.b;
    } else {
      p.k = 3;
      p.rest.c = 0;
    }
  } else {
    // D1^a D2^b D3 = D3 D1^a D2^b: D3 passes even factors without sign.
    if (m.c > 0) {
      p.k = 3;
      p.rest.c = 0;
    } else if (m.b > 0) {
      p.k = 2;
      --p.rest.b;
    } else {
      p.k = 1;
      --p.rest.a;
    }
  }
  return p;
}

/// Basis indices of D_H(x1), D_H(x2), D_H(xi) and the abbreviation map
/// D1 = -D_H(x2), D2 = D_H(x1), D3 = -D_H(xi).
struct LowDict {
  std::size_t x1, x2, xi;
  explicit LowDict(const HamAlgebra& g)
      : x1(g.index({1, 0, 0})), x2(g.index({0, 1, 0})), xi(g.index({0, 0, 1})) {}
  /// [x, D_k] as an element of g.
  HamElement bracket_with(const HamAlgebra& g, std::size_t x, int k) const {
    const PrimeField& F = g.field();
    switch (k) {
      case 1: return sparse_scale(F, g.bracket_basis(x, x2), F.neg(1));
      case 2: return g.bracket_basis(x, x1);
      default: return sparse_scale(F, g.bracket_basis(x, xi), F.neg(1));
    }
  }
  /// (k, coefficient) with basis element x = coefficient * D_k.
  std::pair<int, Residue> as_lowering(const HamAlgebra& g, std::size_t x) const {
    const PrimeField& F = g.field();
    if (x == x1) return {2, 1};
    if (x == x2) return {1, F.neg(1)};
    if (x == xi) return {3, F.neg(1)};
    throw std::logic_error("not a grade -1 basis element");
  }
};

void assert_negative_part_supercommutative(const HamAlgebra& g, const LowDict& d) {
  for (auto a : {d.x1, d.x2, d.xi})
    for (auto b : {d.x1, d.x2, d.xi})
      if (!g.bracket_basis(a, b).empty())
        throw std::logic_error("g_[-1] is not supercommutative");
}

template <bool Parallel>
KacModule build_impl(const HamAlgebra& g, const Character& chi, Residue lambda) {
  const PrimeField& F = g.field();
  KacModule M(g, chi, build_l0(F, lambda), {});
  const std::size_t N = M.dim();
  const LowDict dict(g);
  assert_negative_part_supercommutative(g, dict);

  std::vector<std::vector<SparseVec>> cols(g.dim());
  for (std::size_t x : g.graded_component(-1)) {
    const auto [k, coef] = dict.as_lowering(g, x);
    cols[x].resize(N);
    for (std::size_t m = 0; m < N; ++m)
      cols[x][m] = sparse_scale(F, M.lower(k, {{static_cast<std::uint32_t>(m), 1}}), coef);
  }

  for (int gr = 0; gr <= g.max_grade(); ++gr) {
    const auto xs = g.graded_component(gr);
    auto build_x = [&](std::size_t x) {
      std::vector<SparseVec>& col = cols[x];
      col.resize(N);
      const std::uint32_t px = g.parity(x);
      const std::array<HamElement, 3> br{dict.bracket_with(g, x, 1), dict.bracket_with(g, x, 2),
                                         dict.bracket_with(g, x, 3)};
      std::optional<SparseMatrix> base;
      if (gr == 0) base = rho_g0(g, M.l0(), g.basis_element(x));
      SparseAccumulator acc(F, N);
      for (std::size_t m = 0; m < N; ++m) {
        const KacIndex idx = M.decode(m);
        if (idx.a == 0 && idx.b == 0 && idx.c == 0) {
          // x . (1 (x) v) = 1 (x) x.v, and index(0,0,0,r) = r.
          if (base) col[m] = base->column(idx.r);
          continue;
        }
        const Peeled pl = peel(idx, PeelOrder::D1First);
        const std::size_t rest = M.index(pl.rest);
        const Residue sign = (px && pl.k == 3) ? F.neg(1) : 1;
        acc.add_scaled(M.lower(pl.k, col[rest]), sign);
        for (const auto& t : br[pl.k - 1]) acc.add_scaled(cols[t.index][rest], t.value);
        col[m] = acc.take();
      }
    };
    const auto n = static_cast<std::ptrdiff_t>(xs.size());
    if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < n; ++i) build_x(xs[static_cast<std::size_t>(i)]);
    } else {
      for (std::ptrdiff_t i = 0; i < n; ++i) build_x(xs[static_cast<std::size_t>(i)]);
    }
  }

  std::vector<SparseMatrix> actions;
  actions.reserve(g.dim());
  for (std::size_t x = 0; x < g.dim(); ++x) {
    actions.push_back(SparseMatrix::from_columns(F, N, cols[x]));
    std::vector<SparseVec>().swap(cols[x]);
  }
  return KacModule(g, chi, M.l0(), std::move(actions));
}

}  // namespace

KacModule build_kac(const HamAlgebra& g, const Character& chi, Residue lambda) {
  return build_impl<true>(g, chi, lambda);
}

KacModule build_kac_serial(const HamAlgebra& g, const Character& chi, Residue lambda) {
  return build_impl<false>(g, chi, lambda);
}

SparseVec KacModule::act_with_order(const HamElement& x, const KacIndex& m,
                                    PeelOrder order) const {
  const HamAlgebra& g = *g_;
  const PrimeField& F = g.field();
  const LowDict dict(g);
  std::function<SparseVec(std::size_t, const KacIndex&)> rec;
  auto act_vec = [&](const HamElement& y, const SparseVec& v) {
    SparseVec out;
    for (const auto& ty : y)
      for (const auto& tv : v)
        out = sparse_axpy(F, out, F.mul(ty.value, tv.value), rec(ty.index, decode(tv.index)));
    return out;
  };
  rec = [&](std::size_t xi, const KacIndex& mi) -> SparseVec {
    const SparseVec unit{{static_cast<std::uint32_t>(index(mi)), 1}};
    const int gr = g.grade(xi);
    if (gr == -1) {
      const auto [k, coef] = dict.as_lowering(g, xi);
      return sparse_scale(F, lower(k, unit), coef);
    }
    if (mi.a == 0 && mi.b == 0 && mi.c == 0) {
      if (gr > 0) return {};
      return rho_g0(g, l0_, g.basis_element(xi)).column(mi.r);
    }
    const Peeled pl = peel(mi, order);
    const SparseVec rest{{static_cast<std::uint32_t>(index(pl.rest)), 1}};
    const Residue sign = (g.parity(xi) && pl.k == 3) ? F.neg(1) : 1;
    SparseVec out = sparse_scale(F, lower(pl.k, rec(xi, pl.rest)), sign);
    return sparse_axpy(F, out, 1, act_vec(dict.bracket_with(g, xi, pl.k), rest));
  };
  return act_vec(x, {{static_cast<std::uint32_t>(index(m)), 1}});
}

// ------------------------------------------------------------ verification

namespace {

std::optional<std::size_t> first_differing_column(const SparseMatrix& A, const SparseMatrix& B) {
  const SparseMatrix At = A.transpose(), Bt = B.transpose();
  for (std::size_t j = 0; j < At.rows(); ++j)
    if (At.row(j) != Bt.row(j)) return j;
  return std::nullopt;
}

std::optional<std::size_t> law_witness(const KacModule& M, std::size_t x, std::size_t y) {
  const HamAlgebra& g = M.algebra();
  const PrimeField& F = g.field();
  const SparseMatrix lhs = M.rho(g.bracket_basis(x, y));
  const Residue sign = (g.parity(x) & g.parity(y)) ? 1 : F.neg(1);
  const SparseMatrix rhs =
      add_scaled(multiply(M.action(x), M.action(y)), sign, multiply(M.action(y), M.action(x)));
  if (lhs == rhs) return std::nullopt;
  return first_differing_column(lhs, rhs);
}

}  // namespace

LawReport verify_module_law(const KacModule& M, LawMode mode, std::size_t samples,
                            std::uint64_t seed) {
  const std::size_t n = M.algebra().dim();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (mode == LawMode::Full) {
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) pairs.emplace_back(x, y);
  } else {
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
      const auto x = uniform_below(rng, n);
      pairs.emplace_back(x, uniform_below(rng, n));
    }
  }
  std::vector<std::optional<std::size_t>> witness(pairs.size());
  const auto np = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < np; ++i) {
    const auto& [x, y] = pairs[static_cast<std::size_t>(i)];
    witness[static_cast<std::size_t>(i)] = law_witness(M, x, y);
  }
  LawReport rep;
  rep.pairs_checked = pairs.size();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!witness[i]) continue;
    if (!rep.failures) rep.first_failure = LawFailure{pairs[i].first, pairs[i].second, *witness[i]};
    ++rep.failures;
  }
  return rep;
}

ChiReducedReport verify_chi_reduced(const KacModule& M, const GRStructure& gr) {
  const HamAlgebra& g = M.algebra();
  const PrimeField& F = g.field();
  const std::size_t N = M.dim();
  const SparseMatrix I = SparseMatrix::identity(F, N);
  std::vector<char> bad(g.dim(), 0);

  const auto ne = static_cast<std::ptrdiff_t>(gr.ordered_even_basis.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < ne; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const std::size_t e = gr.ordered_even_basis[kk];
    std::uint64_t q = 1;
    for (std::uint32_t s = 0; s < gr.exponents[kk]; ++s) q *= F.modulus();
    const SparseMatrix lhs = add_scaled(matpow(M.action(e), q), F.neg(1), M.rho(gr.phi[kk]));
    if (!(lhs == scale(I, F.pow(M.chi().at(e), q)))) bad[e] = 1;
  }
  std::vector<std::size_t> odd;
  for (std::size_t x = 0; x < g.dim(); ++x)
    if (g.parity(x)) odd.push_back(x);
  const auto no = static_cast<std::ptrdiff_t>(odd.size());
  const Residue half = F.inv(2);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < no; ++k) {
    const std::size_t x = odd[static_cast<std::size_t>(k)];
    const SparseMatrix sq = multiply(M.action(x), M.action(x));
    if (!(sq == scale(M.rho(g.bracket_basis(x, x)), half))) bad[x] = 1;
  }
  ChiReducedReport rep;
  rep.even_checked = gr.ordered_even_basis.size();
  rep.odd_checked = odd.size();
  for (std::size_t x = 0; x < g.dim(); ++x)
    if (bad[x]) rep.failing.push_back(x);
  return rep;
}

bool check_parity(const KacModule& M) {
  const HamAlgebra& g = M.algebra();
  std::vector<std::uint32_t> par(M.dim());
  for (std::size_t i = 0; i < M.dim(); ++i) par[i] = M.parity(i);
  for (std::size_t x = 0; x < g.dim(); ++x) {
    const SparseMatrix& A = M.action(x);
    for (std::size_t i = 0; i < A.rows(); ++i)
      for (const auto& e : A.row(i))
        if (par[i] != (par[e.index] ^ g.parity(x))) return false;
  }
  return true;
}

// ------------------------------------------------------------------ cache

using nlohmann::json;

std::string kac_cache_name(const Shape& s, const Character& chi, Residue lambda) {
  std::string key = to_string(chi.type);
  for (auto v : chi.values) key += "," + std::to_string(v);
  std::ostringstream os;
  os << "kac-p" << s.p << "-t" << s.t1 << "-" << s.t2 << "-l" << lambda << "-"
     << sha256_hex(key).substr(0, 16) << ".json";
  return os.str();
}

namespace {

json chi_json(const Character& chi) {
  json vals = json::array();
  for (std::size_t i = 0; i < chi.values.size(); ++i)
    if (chi.values[i]) vals.push_back({i, chi.values[i]});
  return json{{"type", to_string(chi.type)}, {"values", vals}};
}

}  // namespace

void save_kac_cache(const KacModule& M, const std::filesystem::path& file) {
  const Shape& s = M.algebra().shape();
  json actions = json::array();
  for (std::size_t x = 0; x < M.actions().size(); ++x) {
    json entries = json::array();
    const SparseMatrix& A = M.action(x);
    for (std::size_t i = 0; i < A.rows(); ++i)
      for (const auto& e : A.row(i)) entries.push_back({i, e.index, e.value});
    actions.push_back({x, entries});
  }
  json doc{{"version", kKacCacheVersion},
           {"p", s.p},
           {"t1", s.t1},
           {"t2", s.t2},
           {"chi", chi_json(M.chi())},
           {"lambda", M.lambda()},
           {"dim", M.dim()},
           {"actions", actions}};
  doc["checksum"] = sha256_hex(doc.dump());
  if (!file.parent_path().empty()) std::filesystem::create_directories(file.parent_path());
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << doc.dump() << '\n';
  }
  std::filesystem::rename(tmp, file);
}

std::optional<KacModule> load_kac_cache(const HamAlgebra& g, const Character& chi, Residue lambda,
                                        const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  try {
    json doc = json::parse(in);
    const Shape& s = g.shape();
    if (doc.at("version").get<int>() != kKacCacheVersion || doc.at("p").get<std::uint32_t>() != s.p ||
        doc.at("t1").get<std::uint32_t>() != s.t1 || doc.at("t2").get<std::uint32_t>() != s.t2 ||
        doc.at("lambda").get<Residue>() != lambda || doc.at("chi") != chi_json(chi))
      return std::nullopt;
    const std::string checksum = doc.at("checksum").get<std::string>();
    doc.erase("checksum");
    if (sha256_hex(doc.dump()) != checksum) return std::nullopt;

    const PrimeField& F = g.field();
    L0Module l0 = build_l0(F, lambda);
    const std::size_t N = 2ull * s.n1() * s.n2() * l0.dim();
    if (doc.at("dim").get<std::size_t>() != N) return std::nullopt;
    const auto& ja = doc.at("actions");
    if (ja.size() != g.dim()) return std::nullopt;
    std::vector<SparseMatrix> actions;
    actions.reserve(g.dim());
    for (std::size_t x = 0; x < g.dim(); ++x) {
      if (ja[x][0].get<std::size_t>() != x) return std::nullopt;
      std::vector<SparseVec> rows(N);
      for (const auto& e : ja[x][1]) {
        const auto i = e[0].get<std::size_t>();
        const auto j = e[1].get<std::uint32_t>();
        const auto v = e[2].get<Residue>();
        if (i >= N || j >= N || v == 0 || v >= s.p) return std::nullopt;
        rows[i].push_back({j, v});
      }
      actions.push_back(SparseMatrix::from_rows(F, N, std::move(rows)));
    }
    return KacModule(g, chi, std::move(l0), std::move(actions));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace hamkac
