#include <doctest.h>

#include <stdexcept>

#include <random>

#include "hamkac/gfp.hpp"

using namespace hamkac;

namespace {

DenseMatrix random_dense(const PrimeField& F, std::size_t r, std::size_t c, std::mt19937_64& rng,
                         int zero_percent = 0) {
  DenseMatrix M(F, r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      if (static_cast<int>(rng() % 100) >= zero_percent) M(i, j) = rng() % F.modulus();
  return M;
}

// Schoolbook product, used as the reference for both kernels.
DenseMatrix naive_product(const DenseMatrix& A, const DenseMatrix& B) {
  const PrimeField& F = A.field();
  DenseMatrix C(F, A.rows(), B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < B.cols(); ++j) {
      std::uint64_t s = 0;
      for (std::size_t k = 0; k < A.cols(); ++k) s += std::uint64_t{A(i, k)} * B(k, j);
      C(i, j) = static_cast<Residue>(s % F.modulus());
    }
  return C;
}

}  // namespace

TEST_SUITE("gfp") {

TEST_CASE("field operations agree with integer arithmetic") {
  for (std::uint32_t p : {5u, 7u, 11u, 13u}) {
    const PrimeField F(p);
    for (Residue a = 0; a < p; ++a) {
      for (Residue b = 0; b < p; ++b) {
        CHECK(F.add(a, b) == (a + b) % p);
        CHECK(F.sub(a, b) == (a + p - b) % p);
        CHECK(F.mul(a, b) == (a * b) % p);
      }
      if (a) CHECK(F.mul(a, F.inv(a)) == 1);
      CHECK(F.pow(a, p) == a);  // Fermat
      CHECK(F.add(a, F.neg(a)) == 0);
    }
    CHECK(F.reduce(-1) == p - 1);
    CHECK(F.lift(p - 1) == -1);
  }
  CHECK_THROWS(PrimeField(5).inv(0));
}

TEST_CASE("primality") {
  CHECK(is_prime(2));
  CHECK(is_prime(7919));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(7917));
  CHECK_FALSE(is_prime(25));
}

TEST_CASE("Lucas binomials match Pascal's triangle mod p") {
  for (std::uint32_t p : {5u, 7u}) {
    const std::size_t N = 3 * p * p;
    std::vector<std::vector<std::uint32_t>> pascal(N, std::vector<std::uint32_t>(N, 0));
    for (std::size_t n = 0; n < N; ++n) {
      pascal[n][0] = 1;
      for (std::size_t k = 1; k <= n; ++k) pascal[n][k] = (pascal[n - 1][k - 1] + pascal[n - 1][k]) % p;
    }
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t k = 0; k < N; ++k) CHECK(binom_mod_p(n, k, p) == pascal[n][k]);
  }
  // C(p^2, p) vanishes, C(2p, p) = 2.
  CHECK(binom_mod_p(25, 5, 5) == 0);
  CHECK(binom_mod_p(10, 5, 5) == 2);
}

TEST_CASE("sparse vectors stay canonical") {
  const PrimeField F(5);
  const SparseVec a{{1, 2}, {4, 3}};
  const SparseVec b{{1, 3}, {2, 1}};
  const SparseVec s = sparse_axpy(F, a, 1, b);
  CHECK(s == SparseVec{{2, 1}, {4, 3}});  // index 1 cancels
  CHECK(sparse_scale(F, a, 0).empty());
  CHECK(to_sparse(to_dense(s, 6)) == s);
}

TEST_CASE("sparse and dense products agree with the schoolbook product") {
  std::mt19937_64 rng(1);
  const PrimeField F(7);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseMatrix A = random_dense(F, 23, 31, rng, 70), B = random_dense(F, 31, 17, rng, 60);
    const DenseMatrix want = naive_product(A, B);
    const SparseMatrix SA = SparseMatrix::from_dense(A), SB = SparseMatrix::from_dense(B);
    CHECK(multiply(SA, SB).to_dense() == want);
    CHECK(multiply_serial(SA, SB).to_dense() == want);
    CHECK(multiply(A, B) == want);
    CHECK(multiply_serial(A, B) == want);
  }
}

TEST_CASE("transpose, apply and column access") {
  std::mt19937_64 rng(2);
  const PrimeField F(11);
  const DenseMatrix A = random_dense(F, 9, 6, rng, 50);
  const SparseMatrix S = SparseMatrix::from_dense(A);
  CHECK(S.transpose().transpose() == S);
  DenseVec x(6);
  for (auto& v : x) v = rng() % 11;
  const DenseVec y = S.apply(std::span<const Residue>(x));
  for (std::size_t i = 0; i < 9; ++i) {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < 6; ++j) s += std::uint64_t{A(i, j)} * x[j];
    CHECK(y[i] == s % 11);
  }
  for (std::size_t j = 0; j < 6; ++j)
    CHECK(to_dense(S.column(j), 9) == to_dense(S.transpose().row(j), 9));
}

TEST_CASE("matpow matches repeated multiplication") {
  std::mt19937_64 rng(3);
  const PrimeField F(5);
  const SparseMatrix A = SparseMatrix::from_dense(random_dense(F, 12, 12, rng, 80));
  SparseMatrix acc = SparseMatrix::identity(F, 12);
  for (int e = 0; e <= 13; ++e) {
    CHECK(matpow(A, e) == acc);
    acc = multiply(acc, A);
  }
  // Dense path: a full matrix crosses the fill threshold.
  const SparseMatrix D = SparseMatrix::from_dense(random_dense(F, 10, 10, rng));
  CHECK(matpow(D, 7) == multiply(multiply(matpow(D, 3), matpow(D, 3)), D));
  CHECK_THROWS_AS(matpow(SparseMatrix(F, 2, 3), 2), std::invalid_argument);
}

TEST_CASE("rref, rank and kernels") {
  std::mt19937_64 rng(4);
  const PrimeField F(7);
  for (std::size_t k : {0u, 1u, 3u, 8u}) {
    // A product through a k-dimensional space has rank at most k; random
    // factors reach k with high probability, checked against the kernel.
    const DenseMatrix M = multiply(random_dense(F, 14, k, rng), random_dense(F, k, 11, rng));
    const auto R = rref(M);
    const auto Rs = rref_serial(M);
    CHECK(R.matrix == Rs.matrix);
    CHECK(R.rank == Rs.rank);
    CHECK(R.rank <= k);
    CHECK(rank(M) == R.rank);
    const auto K = kernel_basis(M);
    CHECK(K.size() == 11 - R.rank);
    for (const auto& v : K) {
      const DenseVec Mv = SparseMatrix::from_dense(M).apply(std::span<const Residue>(v));
      CHECK(is_zero(Mv));
    }
    // Reduced form: pivot columns are unit vectors.
    for (std::size_t r = 0; r < R.rank; ++r)
      for (std::size_t i = 0; i < R.rank; ++i)
        CHECK(R.matrix(i, R.pivot_cols[r]) == (i == r ? 1u : 0u));
  }
  CHECK(rank(DenseMatrix::identity(F, 6)) == 6);
  CHECK(kernel_basis(DenseMatrix::identity(F, 6)).empty());
}

TEST_CASE("sparse rref agrees with dense") {
  std::mt19937_64 rng(5);
  const PrimeField F(13);
  const DenseMatrix M = random_dense(F, 20, 25, rng, 85);
  CHECK(rref(SparseMatrix::from_dense(M)).matrix == rref(M).matrix);
  CHECK(kernel_basis(SparseMatrix::from_dense(M)).size() == kernel_basis(M).size());
}

TEST_CASE("echelon basis tracks the row space") {
  std::mt19937_64 rng(6);
  const PrimeField F(5);
  EchelonBasis E(F, 8);
  std::vector<DenseVec> added;
  for (int i = 0; i < 5; ++i) {
    DenseVec v(8);
    for (auto& x : v) x = rng() % 5;
    if (E.insert(v)) added.push_back(v);
  }
  // A combination of inserted vectors is contained; coefficients rebuild it.
  DenseVec combo(8, 0);
  for (std::size_t i = 0; i < added.size(); ++i) dense_axpy(F, combo, Residue(i + 1), added[i]);
  CHECK(E.contains(combo));
  CHECK_FALSE(E.insert(combo));
  DenseVec r = combo;
  std::vector<Residue> coeffs;
  E.reduce(r, coeffs);
  CHECK(is_zero(r));
  DenseVec rebuilt(8, 0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) dense_axpy(F, rebuilt, coeffs[i], E.rows()[i]);
  CHECK(rebuilt == combo);
  // The canonical basis is the rref of the inserted vectors.
  DenseMatrix A(F, added.size(), 8);
  for (std::size_t i = 0; i < added.size(); ++i)
    std::copy(added[i].begin(), added[i].end(), A.row(i).begin());
  const auto R = rref(A);
  const auto C = E.canonical();
  REQUIRE(C.size() == R.rank);
  for (std::size_t i = 0; i < C.size(); ++i)
    CHECK(std::equal(C[i].begin(), C[i].end(), R.matrix.row(i).begin()));
}

}  // TEST_SUITE
