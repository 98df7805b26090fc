#include "hamkac/repkit.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

#include "hamkac/digest.hpp"

namespace hamkac {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Irreducible: return "irreducible";
    case Verdict::Reducible: return "reducible";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

// --------------------------------------------------------- representations

Representation representation(const L0Module& L) {
  Representation R{L.field, L.dim(), {}, {}, {}, {}};
  for (std::size_t i = 0; i < L.dim(); ++i) R.basis_parity.push_back(L.parity(i));
  for (int x = 0; x < 5; ++x) {
    R.generators.push_back(L.action[x]);
    R.generator_parity.push_back(kOspParity[x]);
    R.generator_names.emplace_back(kOspNames[x]);
  }
  return R;
}

std::vector<std::size_t> lie_generators(const HamAlgebra& g) {
  std::vector<std::size_t> gens;
  for (std::size_t i = 0; i < g.dim(); ++i)
    if (g.grade(i) <= 1) gens.push_back(i);
  const PrimeField& F = g.field();
  while (true) {
    // Span of all left-normed brackets of generators.
    EchelonBasis span(F, g.dim());
    std::deque<HamElement> queue;
    for (auto s : gens) {
      if (span.insert(to_dense(g.basis_element(s), g.dim()))) queue.push_back(g.basis_element(s));
    }
    while (!queue.empty() && !span.full()) {
      const HamElement y = std::move(queue.front());
      queue.pop_front();
      for (auto s : gens) {
        HamElement z = g.structure_constants().bracket_basis(s, y);
        if (!z.empty() && span.insert(to_dense(z, g.dim()))) queue.push_back(std::move(z));
      }
    }
    if (span.full()) return gens;
    // Add the lowest-grade basis element outside the generated subalgebra.
    std::optional<std::size_t> next;
    for (std::size_t i = 0; i < g.dim(); ++i) {
      if (span.contains(to_dense(g.basis_element(i), g.dim()))) continue;
      if (!next || g.grade(i) < g.grade(*next)) next = i;
    }
    gens.push_back(*next);
  }
}

namespace {

std::string element_name(const Monomial& m) {
  std::ostringstream os;
  os << "D_H(x1^(" << m.i1 << ")x2^(" << m.i2 << ")xi^" << m.j << ")";
  return os.str();
}

}  // namespace

Representation representation(const KacModule& M) {
  const HamAlgebra& g = M.algebra();
  Representation R{g.field(), M.dim(), {}, {}, {}, {}};
  for (std::size_t i = 0; i < M.dim(); ++i) R.basis_parity.push_back(M.parity(i));
  for (auto x : lie_generators(g)) {
    R.generators.push_back(M.action(x));
    R.generator_parity.push_back(g.parity(x));
    R.generator_names.push_back(element_name(g.label(x)));
  }
  return R;
}

Representation direct_sum(const Representation& M, const Representation& N) {
  if (M.generators.size() != N.generators.size())
    throw std::invalid_argument("direct_sum: generator lists differ");
  Representation S{M.field, M.dim + N.dim, M.basis_parity, {}, M.generator_parity,
                   M.generator_names};
  S.basis_parity.insert(S.basis_parity.end(), N.basis_parity.begin(), N.basis_parity.end());
  const auto shift = static_cast<std::uint32_t>(M.dim);
  for (std::size_t k = 0; k < M.generators.size(); ++k) {
    std::vector<SparseVec> rows;
    for (std::size_t i = 0; i < M.dim; ++i) rows.push_back(M.generators[k].row(i));
    for (std::size_t i = 0; i < N.dim; ++i) {
      SparseVec r = N.generators[k].row(i);
      for (auto& e : r) e.index += shift;
      rows.push_back(std::move(r));
    }
    S.generators.push_back(SparseMatrix::from_rows(M.field, S.dim, std::move(rows)));
  }
  return S;
}

// ---------------------------------------------------------------- spinning

SubmoduleBasis spin(const PrimeField& F, std::size_t dim, const std::vector<DenseVec>& seeds,
                    const std::vector<SparseMatrix>& generators) {
  EchelonBasis E(F, dim);
  std::deque<DenseVec> queue;
  for (const auto& s : seeds)
    if (E.insert(s)) queue.push_back(s);
  while (!queue.empty() && !E.full()) {
    const DenseVec v = std::move(queue.front());
    queue.pop_front();
    for (const auto& A : generators) {
      DenseVec w = A.apply(v);
      if (E.insert(w)) queue.push_back(std::move(w));
    }
  }
  SubmoduleBasis S{dim, E.canonical(), false};
  S.certified = S.full() || is_invariant(S, generators, F);
  return S;
}

bool is_invariant(const SubmoduleBasis& S, const std::vector<SparseMatrix>& generators,
                  const PrimeField& F) {
  EchelonBasis E(F, S.ambient_dim);
  for (const auto& v : S.basis) E.insert(v);
  for (const auto& A : generators)
    for (const auto& v : S.basis)
      if (!E.contains(A.apply(v))) return false;
  return true;
}

// --------------------------------------------------------- random elements

namespace {

// theta = A*B + A with A, B random combinations of the generators. Short
// generator words are close to unipotent on Kac modules (rho(D1) - chi(D1)
// is nilpotent) and rarely give a one-dimensional kernel; products of
// generic combinations do.
struct Theta {
  std::vector<Residue> a, b;
};

Theta random_theta(std::mt19937_64& rng, std::size_t ngens, std::uint32_t p) {
  Theta t{std::vector<Residue>(ngens), std::vector<Residue>(ngens)};
  for (auto& x : t.a) x = static_cast<Residue>(uniform_below(rng, p));
  for (auto& x : t.b) x = static_cast<Residue>(uniform_below(rng, p));
  return t;
}

std::string describe(const Theta& t, const Representation& R) {
  auto comb = [&](const std::vector<Residue>& c) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c[i]) continue;
      os << (first ? "" : " + ") << c[i] << '*' << R.generator_names[i];
      first = false;
    }
    return first ? std::string("0") : os.str();
  };
  return "A*B + A, A = " + comb(t.a) + "; B = " + comb(t.b);
}

/// theta - shift * I as a dense matrix.
DenseMatrix theta_matrix(const Representation& R, const Theta& t, Residue shift) {
  const PrimeField& F = R.field;
  SparseMatrix A(F, R.dim, R.dim), B(F, R.dim, R.dim);
  for (std::size_t i = 0; i < R.generators.size(); ++i) {
    if (t.a[i]) A = add_scaled(A, t.a[i], R.generators[i]);
    if (t.b[i]) B = add_scaled(B, t.b[i], R.generators[i]);
  }
  SparseMatrix acc = add(multiply(A, B), A);
  return add_scaled(acc, F.neg(shift), SparseMatrix::identity(F, R.dim)).to_dense();
}

std::vector<std::size_t> parity_indices(const Representation& R, std::uint32_t q) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < R.dim; ++i)
    if (R.basis_parity[i] == q) idx.push_back(i);
  return idx;
}

/// The block of A on the coordinates `idx`, minus c on the diagonal.
DenseMatrix block(const DenseMatrix& A, const std::vector<std::size_t>& idx, Residue c) {
  const PrimeField& F = A.field();
  DenseMatrix B(F, idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) B(i, j) = A(idx[i], idx[j]);
    B(i, i) = F.sub(B(i, i), c);
  }
  return B;
}

DenseVec embed(const DenseVec& v, const std::vector<std::size_t>& idx, std::size_t dim) {
  DenseVec out(dim, 0);
  for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] = v[i];
  return out;
}

/// Kernel of theta_even - c, where theta_even keeps the parity-preserving
/// blocks of theta (the contribution of its even words). Homogeneous basis.
std::vector<DenseVec> even_kernel(const Representation& R, const DenseMatrix& theta, Residue c) {
  std::vector<DenseVec> out;
  for (std::uint32_t q = 0; q < 2; ++q) {
    const auto idx = parity_indices(R, q);
    if (idx.empty()) continue;
    for (const auto& v : kernel_basis(block(theta, idx, c))) out.push_back(embed(v, idx, R.dim));
  }
  return out;
}

DenseMatrix dense_transpose(const DenseMatrix& A) {
  DenseMatrix T(A.field(), A.cols(), A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) T(j, i) = A(i, j);
  return T;
}

std::vector<SparseMatrix> transposed(const std::vector<SparseMatrix>& gens) {
  std::vector<SparseMatrix> out;
  for (const auto& A : gens) out.push_back(A.transpose());
  return out;
}

DenseVec parity_flip(const PrimeField& F, const DenseVec& v, const std::vector<std::uint32_t>& par) {
  DenseVec out = v;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (par[i]) out[i] = F.neg(out[i]);
  return out;
}

/// Coordinates of y in the span of `cols` (assumed independent), or nullopt.
std::optional<DenseVec> solve_in_span(const PrimeField& F, const std::vector<DenseVec>& cols,
                                      const DenseVec& y) {
  const std::size_t n = y.size(), d = cols.size();
  DenseMatrix A(F, n, d + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) A(i, k) = cols[k][i];
    A(i, d) = F.neg(y[i]);
  }
  const auto K = kernel_basis(A);
  for (const auto& z : K) {
    if (z[d] == 0) continue;
    const Residue inv = F.inv(z[d]);
    DenseVec coords(d);
    for (std::size_t k = 0; k < d; ++k) coords[k] = F.mul(z[k], inv);
    return coords;
  }
  return std::nullopt;
}

struct CyclicHomResult {
  bool cyclic = false;
  std::vector<DenseVec> solutions;  // T(u) for a basis of Hom
  HomDims dims;
};

/// Hom(M, N) through a generator u of M: every T is fixed by w = T(u),
/// which must lie in span(W). Spinning u records each dependency
/// g.m_j = sum c_r row_r, and each one cuts the candidate space down.
CyclicHomResult cyclic_hom(const Representation& M, const Representation& N, const DenseVec& u,
                           std::vector<DenseVec> W) {
  const PrimeField& F = M.field;
  const std::size_t m = M.dim, n = N.dim;
  EchelonBasis E(F, m);
  std::vector<DenseVec> vecs;                  // m_i
  std::vector<std::vector<DenseVec>> img;      // T_k(m_i)
  std::vector<std::vector<DenseVec>> row_img;  // T_k(row_r)

  auto constrain = [&](const std::vector<DenseVec>& resid) {
    const std::size_t d = W.size();
    DenseMatrix C(F, n, d);
    bool any = false;
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if ((C(i, k) = resid[k][i])) any = true;
    if (!any) return;
    const auto K = kernel_basis(C);
    auto combine = [&](const std::vector<DenseVec>& old) {
      std::vector<DenseVec> out;
      for (const auto& z : K) {
        DenseVec v(n, 0);
        for (std::size_t k = 0; k < d; ++k)
          if (z[k]) dense_axpy(F, v, z[k], old[k]);
        out.push_back(std::move(v));
      }
      return out;
    };
    W = combine(W);
    for (auto& im : img) im = combine(im);
    for (auto& im : row_img) im = combine(im);
  };

  // Inserts m = v with candidate images tv = T_k(v). Returns false and
  // applies the constraint when v is already in the span.
  auto push = [&](DenseVec v, std::vector<DenseVec> tv) {
    std::vector<Residue> coeffs;
    DenseVec r = v;
    E.reduce(r, coeffs);
    std::vector<DenseVec> tr = tv;
    for (std::size_t k = 0; k < tr.size(); ++k)
      for (std::size_t q = 0; q < coeffs.size(); ++q)
        if (coeffs[q]) dense_axpy(F, tr[k], F.neg(coeffs[q]), row_img[q][k]);
    auto lead = std::find_if(r.begin(), r.end(), [](Residue x) { return x != 0; });
    if (lead == r.end()) {
      constrain(tr);
      return false;
    }
    const Residue inv = F.inv(*lead);
    for (auto& t : tr)
      for (auto& x : t) x = F.mul(x, inv);
    E.insert(std::move(r));
    row_img.push_back(std::move(tr));
    vecs.push_back(std::move(v));
    img.push_back(std::move(tv));
    return true;
  };

  push(u, W);
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    for (std::size_t gidx = 0; gidx < M.generators.size(); ++gidx) {
      DenseVec v = M.generators[gidx].apply(vecs[i]);
      std::vector<DenseVec> tv;
      for (const auto& t : img[i]) tv.push_back(N.generators[gidx].apply(t));
      push(std::move(v), std::move(tv));
    }
  }

  CyclicHomResult res;
  res.cyclic = E.full();
  if (!res.cyclic) return res;
  res.solutions = W;
  const std::size_t d = W.size();
  if (d == 0) return res;

  // Split by T -> P_N T P_M, P the parity involutions.
  DenseVec pu = parity_flip(F, u, M.basis_parity);
  std::vector<Residue> coeffs;
  E.reduce(pu, coeffs);
  DenseMatrix J(F, d, d);
  for (std::size_t k = 0; k < d; ++k) {
    DenseVec y(n, 0);
    for (std::size_t q = 0; q < coeffs.size(); ++q)
      if (coeffs[q]) dense_axpy(F, y, coeffs[q], row_img[q][k]);
    y = parity_flip(F, y, N.basis_parity);
    const auto z = solve_in_span(F, W, y);
    if (!z) throw std::logic_error("parity involution left the hom space");
    for (std::size_t l = 0; l < d; ++l) J(l, k) = (*z)[l];
  }
  for (std::size_t k = 0; k < d; ++k) J(k, k) = F.sub(J(k, k), 1);
  const std::size_t rk = rank(J);
  res.dims.even = d - rk;
  res.dims.odd = rk;
  return res;
}

void check_compatible(const Representation& M, const Representation& N) {
  if (M.generators.size() != N.generators.size() || M.generator_parity != N.generator_parity ||
      !(M.field == N.field))
    throw std::invalid_argument("representations use different generator lists");
}

}  // namespace

// ----------------------------------------------------------------- MeatAxe

IrreducibilityCertificate meataxe(const Representation& R, std::uint64_t seed,
                                  std::size_t budget) {
  const PrimeField& F = R.field;
  IrreducibilityCertificate cert;
  cert.seed = seed;
  if (R.dim == 0 || R.generators.empty()) return cert;
  std::mt19937_64 rng(seed);
  const auto dual_gens = transposed(R.generators);
  // Norton's argument run on one parity block with an even theta: graded
  // submodules N meet the block in N_q, so a one-dimensional kernel there
  // either lies in N or gives a dual kernel vector annihilating N.
  const std::uint32_t q = parity_indices(R, 0).empty() ? 1 : 0;
  const auto idx = parity_indices(R, q);
  cert.block_parity = q;
  for (std::size_t attempt = 1; attempt <= budget; ++attempt) {
    cert.attempts = attempt;
    const Theta t = random_theta(rng, R.generators.size(), F.modulus());
    const DenseMatrix theta = theta_matrix(R, t, 0);
    for (Residue c = 0; c < F.modulus(); ++c) {
      const DenseMatrix B = block(theta, idx, c);
      const auto K = kernel_basis(B);
      if (K.empty()) continue;
      const DenseVec v = embed(K.front(), idx, R.dim);
      SubmoduleBasis S = spin(F, R.dim, {v}, R.generators);
      if (!S.full()) {
        cert.theta = describe(t, R);
        cert.shift = c;
        cert.nullity = K.size();
        cert.kernel_vector = v;
        cert.kernel_spin_dim = S.dim();
        cert.verdict = Verdict::Reducible;
        cert.invariant_subspace = std::move(S);
        return cert;
      }
      if (K.size() != 1) continue;
      cert.theta = describe(t, R);
      cert.shift = c;
      cert.nullity = 1;
      cert.kernel_vector = v;
      cert.kernel_spin_dim = S.dim();
      const auto KT = kernel_basis(dense_transpose(B));
      SubmoduleBasis D = spin(F, R.dim, {embed(KT.front(), idx, R.dim)}, dual_gens);
      cert.dual_spin_dim = D.dim();
      if (!D.full()) {
        // The annihilator of a proper dual submodule is a proper submodule.
        DenseMatrix A(F, D.dim(), R.dim);
        for (std::size_t i = 0; i < D.dim(); ++i)
          std::copy(D.basis[i].begin(), D.basis[i].end(), A.row(i).begin());
        cert.verdict = Verdict::Reducible;
        cert.invariant_subspace = spin(F, R.dim, kernel_basis(A), R.generators);
        return cert;
      }
      cert.verdict = Verdict::Irreducible;
      const auto hom = cyclic_hom(R, R, v, even_kernel(R, theta, c));
      cert.endo_dim = hom.dims.even;
      cert.endo_dim_odd = hom.dims.odd;
      return cert;
    }
  }
  return cert;
}

// -------------------------------------------------------------- hom spaces

HomDims hom_dim(const Representation& M, const Representation& N, std::uint64_t seed,
                std::uint64_t budget) {
  check_compatible(M, N);
  if (M.dim == 0 || N.dim == 0) return {};
  if (static_cast<std::uint64_t>(M.dim) * N.dim > budget)
    throw BudgetExceeded("hom_dim: " + std::to_string(M.dim) + " x " + std::to_string(N.dim) +
                         " exceeds the unknown budget of " + std::to_string(budget));
  const PrimeField& F = M.field;
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Theta t = random_theta(rng, M.generators.size(), F.modulus());
    const DenseMatrix thetaM = theta_matrix(M, t, 0), thetaN = theta_matrix(N, t, 0);
    for (Residue c = 0; c < F.modulus(); ++c) {
      const auto KM = even_kernel(M, thetaM, c);
      if (KM.empty()) continue;
      // A random kernel vector, since a fixed echelon one may only generate
      // one summand of a non-simple M.
      DenseVec u(M.dim, 0);
      for (const auto& k : KM) dense_axpy(F, u, static_cast<Residue>(rng() % F.modulus()), k);
      if (is_zero(u)) continue;
      // T commutes with theta_even, so T(ker theta_M) lies in ker theta_N.
      auto res = cyclic_hom(M, N, u, even_kernel(N, thetaN, c));
      if (res.cyclic) return res.dims;
    }
  }
  throw std::runtime_error("hom_dim: no cyclic generator found");
}

HomDims hom_dim_direct(const Representation& M, const Representation& N, std::uint64_t budget) {
  check_compatible(M, N);
  const PrimeField& F = M.field;
  const std::size_t m = M.dim, n = N.dim, nm = m * n;
  if (nm == 0) return {};
  if (nm > budget) throw BudgetExceeded("hom_dim_direct: too many unknowns");
  HomDims out;
  for (std::uint32_t tau = 0; tau < 2; ++tau) {
    // Unknown T[i][j] at i * m + j; T has parity tau and satisfies
    // T rho_M(g) = (-1)^{tau |g|} rho_N(g) T.
    EchelonBasis E(F, nm);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if ((N.basis_parity[i] ^ M.basis_parity[j]) != tau) {
          DenseVec e(nm, 0);
          e[i * m + j] = 1;
          E.insert(std::move(e));
        }
    for (std::size_t k = 0; k < M.generators.size(); ++k) {
      const SparseMatrix MT = M.generators[k].transpose();  // row j = column j
      const SparseMatrix& A = N.generators[k];
      const Residue sign = (tau & N.generator_parity[k]) ? F.neg(1) : 1;
      for (std::size_t i = 0; i < n && !E.full(); ++i) {
        for (std::size_t j = 0; j < m && !E.full(); ++j) {
          DenseVec row(nm, 0);
          for (const auto& e : MT.row(j))  // sum_q T[i][q] rho_M[q][j]
            row[i * m + e.index] = F.add(row[i * m + e.index], e.value);
          for (const auto& e : A.row(i))  // - sign sum_q rho_N[i][q] T[q][j]
            row[e.index * m + j] = F.sub(row[e.index * m + j], F.mul(sign, e.value));
          E.insert(std::move(row));
        }
      }
    }
    (tau ? out.odd : out.even) = nm - E.rank();
  }
  return out;
}

std::size_t endo_dim(const Representation& R, std::uint64_t seed) {
  return hom_dim(R, R, seed, std::numeric_limits<std::uint64_t>::max()).even;
}

// ------------------------------------------------------------------ weights

namespace {

bool is_diagonal(const SparseMatrix& A) {
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (const auto& e : A.row(i))
      if (e.index != i) return false;
  return true;
}

std::vector<DenseVec> eigenspace(const SparseMatrix& H, Residue c) {
  const PrimeField& F = H.field();
  const std::size_t n = H.rows();
  if (is_diagonal(H)) {
    std::vector<DenseVec> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (H.at(i, i) != c) continue;
      DenseVec v(n, 0);
      v[i] = 1;
      out.push_back(std::move(v));
    }
    return out;
  }
  return kernel_basis(add_scaled(H, F.neg(c), SparseMatrix::identity(F, n)));
}

}  // namespace

std::map<Residue, std::size_t> weight_spaces(const SparseMatrix& rho_h) {
  const PrimeField& F = rho_h.field();
  if (!(matpow(rho_h, F.modulus()) == rho_h))
    throw std::domain_error("rho(h)^p != rho(h): not a restricted weight module");
  std::map<Residue, std::size_t> dims;
  for (Residue c = 0; c < F.modulus(); ++c) {
    const std::size_t d = is_diagonal(rho_h) ? eigenspace(rho_h, c).size()
                                             : rho_h.rows() - rank(add_scaled(
                                                   rho_h, F.neg(c),
                                                   SparseMatrix::identity(F, rho_h.rows()))
                                                                          .to_dense());
    if (d) dims[c] = d;
  }
  return dims;
}

std::vector<SingularVector> singular_vectors(const SparseMatrix& rho_h,
                                             const std::vector<SparseMatrix>& raising) {
  const PrimeField& F = rho_h.field();
  const std::size_t n = rho_h.rows();
  std::vector<SingularVector> out;
  for (Residue c = 0; c < F.modulus(); ++c) {
    std::vector<DenseVec> V = eigenspace(rho_h, c);
    for (const auto& A : raising) {
      if (V.empty()) break;
      const std::size_t d = V.size();
      std::vector<DenseVec> images;
      std::vector<std::size_t> touched;
      std::vector<char> used(n, 0);
      for (const auto& v : V) {
        images.push_back(A.apply(v));
        for (std::size_t i = 0; i < n; ++i)
          if (images.back()[i] && !used[i]) used[i] = 1, touched.push_back(i);
      }
      if (touched.empty()) continue;
      DenseMatrix C(F, touched.size(), d);
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t r = 0; r < touched.size(); ++r) C(r, k) = images[k][touched[r]];
      std::vector<DenseVec> next;
      for (const auto& z : kernel_basis(C)) {
        DenseVec v(n, 0);
        for (std::size_t k = 0; k < d; ++k)
          if (z[k]) dense_axpy(F, v, z[k], V[k]);
        next.push_back(std::move(v));
      }
      V = std::move(next);
    }
    if (V.empty()) continue;
    EchelonBasis E(F, n);
    for (auto& v : V) E.insert(std::move(v));
    for (auto& v : E.canonical()) out.push_back({c, std::move(v)});
  }
  return out;
}

std::vector<SparseMatrix> raising_operators(const KacModule& M) {
  const HamAlgebra& g = M.algebra();
  const PrimeField& F = g.field();
  // e = -D_H(x2^(2)), E = -D_H(x2 xi).
  std::vector<SparseMatrix> ops{scale(M.action(g.index({0, 2, 0})), F.neg(1)),
                                scale(M.action(g.index({0, 1, 1})), F.neg(1))};
  for (std::size_t x = 0; x < g.dim(); ++x)
    if (g.grade(x) >= 1) ops.push_back(M.action(x));
  return ops;
}

// ---------------------------------------------------------- classification

ClassificationReport classify(const HamAlgebra& g, const std::vector<Character>& chis,
                              const std::vector<Residue>& lambdas,
                              const ClassificationOptions& opt) {
  const PrimeField& F = g.field();
  const GRStructure gr = gr_structure(g);
  struct Cell {
    std::size_t chi;
    Residue lambda;
  };
  std::vector<Cell> cells;
  for (std::size_t c = 0; c < chis.size(); ++c)
    for (auto l : lambdas) cells.push_back({c, l});

  ClassificationReport rep;
  rep.rows.resize(cells.size());
  std::vector<std::optional<Representation>> reps(cells.size());
  std::vector<std::string> errors(cells.size());
  const auto hom_wanted = [&](Residue l) {
    return opt.run_hom &&
           std::find(opt.hom_lambdas.begin(), opt.hom_lambdas.end(), l) != opt.hom_lambdas.end();
  };
  auto cell_key = [&](const Cell& c) {
    return to_string(chis[c.chi].type) + "/" + std::to_string(c.lambda);
  };

  const auto nc = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ci = 0; ci < nc; ++ci) {
    const auto i = static_cast<std::size_t>(ci);
    const Cell& cell = cells[i];
    ClassificationRow& row = rep.rows[i];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Character& chi = chis[cell.chi];
      row.chi_type = to_string(chi.type);
      row.lambda = cell.lambda;
      row.height = height(chi, g);
      row.expected_dim = kac_dimension(g.shape(), cell.lambda);
      std::optional<KacModule> cached;
      std::filesystem::path cache_file;
      if (opt.cache_dir) {
        cache_file = *opt.cache_dir / kac_cache_name(g.shape(), chi, cell.lambda);
        cached = load_kac_cache(g, chi, cell.lambda, cache_file);
      }
      const KacModule M = cached ? std::move(*cached) : build_kac(g, chi, cell.lambda);
      if (opt.cache_dir && !cached) save_kac_cache(M, cache_file);
      row.dim = M.dim();
      const LawReport law = verify_module_law(M, opt.law_mode, opt.law_samples,
                                              labeled_seed(opt.seed, "law:" + cell_key(cell)));
      row.module_law = law.ok();
      if (law.first_failure)
        row.witness = "module law fails on basis pair (" + std::to_string(law.first_failure->x) +
                      ", " + std::to_string(law.first_failure->y) + ") at vector " +
                      std::to_string(law.first_failure->witness);
      const ChiReducedReport cr = verify_chi_reduced(M, gr);
      row.chi_reduced = cr.ok();
      if (!cr.ok() && row.witness.empty())
        row.witness = "chi-reduced identity fails for basis element " + std::to_string(cr.failing[0]);
      const auto ws = weight_spaces(M.action(g.index({1, 1, 0})));
      row.weight_signature.assign(F.modulus(), 0);
      for (const auto& [w, d] : ws) row.weight_signature[w] = d;
      Representation R = representation(M);
      if (opt.run_meataxe) {
        row.meataxe_seed = labeled_seed(opt.seed, "meataxe:" + cell_key(cell));
        const auto cert = meataxe(R, row.meataxe_seed);
        row.irreducible = cert.verdict == Verdict::Irreducible;
        row.endo_dim = cert.endo_dim;
        row.endo_dim_odd = cert.endo_dim_odd;
        if (row.witness.empty() && cert.verdict == Verdict::Reducible)
          row.witness = "invariant subspace of dim " +
                        std::to_string(cert.invariant_subspace->dim()) + " (kernel nullity " +
                        std::to_string(cert.nullity) + " at shift " +
                        std::to_string(cert.shift) + ")";
        else if (row.witness.empty() && cert.verdict == Verdict::Inconclusive)
          row.witness = "meataxe inconclusive after " + std::to_string(cert.attempts) + " attempts";
        else if (row.witness.empty() && cert.endo_dim != 1)
          row.witness = "endomorphism algebra has dim " + std::to_string(cert.endo_dim);
      }
      if (hom_wanted(cell.lambda)) reps[i] = std::move(R);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
    if (opt.timings)
      row.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  }

  for (std::size_t i = 0; i < cells.size() && rep.ok; ++i) {
    const auto& row = rep.rows[i];
    // Characters nonzero on g_0 clash with the restricted L0; such rows and
    // chi = 0 are exploratory for simplicity.
    const bool theorem_regime = row.height == 0;
    const bool good = errors[i].empty() && row.dim == row.expected_dim && row.module_law &&
                      (row.chi_reduced || row.height > 0) &&
                      (!opt.run_meataxe || !theorem_regime || (row.irreducible && row.endo_dim == 1));
    if (!good) {
      rep.ok = false;
      rep.failing_cell = cell_key(cells[i]) + (errors[i].empty() ? "" : ": " + errors[i]);
    }
  }

  // Dimensions within one character are pairwise distinct.
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j)
      if (cells[i].chi == cells[j].chi && cells[i].lambda != cells[j].lambda &&
          rep.rows[i].dim == rep.rows[j].dim)
        rep.dims_distinct = false;

  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (cells[i].chi != cells[j].chi || !reps[i] || !reps[j]) continue;
      HomCheck h{to_string(chis[cells[i].chi].type), cells[i].lambda, cells[j].lambda, {}, false};
      try {
        h.dims = hom_dim(*reps[i], *reps[j], labeled_seed(opt.seed, "hom:" + cell_key(cells[i]) +
                                                                        ":" + cell_key(cells[j])),
                         opt.hom_budget);
      } catch (const BudgetExceeded&) {
        h.refused = true;
      }
      const bool expect_iso = h.lambda == h.mu;
      if (!h.refused && rep.ok && rep.rows[i].height == 0 &&
          (expect_iso ? (h.dims.even != 1 || h.dims.odd != 0) : h.dims.total() != 0)) {
        rep.ok = false;
        rep.failing_cell = "hom " + h.chi_type + " " + std::to_string(h.lambda) + "->" +
                           std::to_string(h.mu);
      }
      rep.hom_checks.push_back(std::move(h));
    }
  }
  if (!rep.dims_distinct && rep.ok) {
    rep.ok = false;
    rep.failing_cell = "dimensions not pairwise distinct";
  }
  return rep;
}

}  // namespace hamkac
