// Serial reference against the OpenMP version of each parallel kernel.
// Arg(0) runs the serial code, Arg(1) the parallel one.
#include <benchmark/benchmark.h>

#include <random>

#include "hamkac/kacmod.hpp"

using namespace hamkac;

namespace {

DenseMatrix random_dense(const PrimeField& F, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DenseMatrix M(F, n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) M(i, j) = static_cast<Residue>(rng() % F.modulus());
  return M;
}

const HamAlgebra& alg(std::uint32_t t1) {
  static const HamAlgebra g11(Shape(5, 1, 1)), g21(Shape(5, 2, 1));
  return t1 == 1 ? g11 : g21;
}

void BM_DenseMultiply(benchmark::State& st) {
  const PrimeField F(5);
  const auto A = random_dense(F, 256, 1), B = random_dense(F, 256, 2);
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? multiply(A, B) : multiply_serial(A, B));
}
BENCHMARK(BM_DenseMultiply)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SparseMultiply(benchmark::State& st) {
  const HamAlgebra& g = alg(1);
  const KacModule M = build_kac(g, make_character(g, ChiType::I), 4);
  const SparseMatrix& A = M.action(g.index({1, 0, 0}));
  const SparseMatrix& B = M.action(g.index({0, 1, 1}));
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? multiply(A, B) : multiply_serial(A, B));
}
BENCHMARK(BM_SparseMultiply)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_Rref(benchmark::State& st) {
  const PrimeField F(7);
  const auto A = random_dense(F, 300, 3);
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? rref(A) : rref_serial(A));
}
BENCHMARK(BM_Rref)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_StructureConstants(benchmark::State& st) {
  const Shape s(5, 2, 1);
  const auto basis = canonical_basis(s);
  for (auto _ : st)
    benchmark::DoNotOptimize(st.range(0) ? build_structure_constants(s, basis)
                                         : build_structure_constants_serial(s, basis));
}
BENCHMARK(BM_StructureConstants)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Jacobi(benchmark::State& st) {
  const auto& sc = alg(1).structure_constants();
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? check_jacobi(sc) : check_jacobi_serial(sc));
}
BENCHMARK(BM_Jacobi)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BuildKac(benchmark::State& st) {
  const HamAlgebra& g = alg(2);
  const Character chi = make_character(g, ChiType::I);
  for (auto _ : st) benchmark::DoNotOptimize(st.range(0) ? build_kac(g, chi, 2) : build_kac_serial(g, chi, 2));
}
BENCHMARK(BM_BuildKac)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
