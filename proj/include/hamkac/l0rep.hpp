#pragma once

// Simple restricted osp(1|2)-modules L0(lambda), inflated to g_0 with the
// positive-grade part acting trivially.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamkac/gfp.hpp"
#include "hamkac/hamalg.hpp"

namespace hamkac {

/// v_{lambda,k,l}; parity l.
struct L0Index {
  std::uint32_t k = 0;
  std::uint32_t l = 0;
  bool operator==(const L0Index&) const = default;
};

enum class OspName { h = 0, e = 1, f = 2, E = 3, F = 4 };
inline constexpr std::array<const char*, 5> kOspNames{"h", "e", "f", "E", "F"};
inline constexpr std::array<std::uint32_t, 5> kOspParity{0, 0, 0, 1, 1};

struct L0Module {
  PrimeField field;
  Residue lambda;              // integer representative in [0, p)
  std::vector<L0Index> basis;  // (k, l) lexicographic, l inner
  std::array<SparseMatrix, 5> action;  // indexed by OspName

  std::size_t dim() const { return basis.size(); }
  std::uint32_t parity(std::size_t i) const { return basis[i].l; }
  std::optional<std::size_t> index_of(std::uint32_t k, std::uint32_t l) const;
  const SparseMatrix& rho(OspName x) const { return action[static_cast<int>(x)]; }
};

/// Materializes the ten action rules. Throws unless lambda < p.
L0Module build_l0(const PrimeField& F, Residue lambda);

/// rho(x) for x in g_0 = g_[0] + g_1, translated through
/// h = D_H(x1x2), f = D_H(x1^(2)), e = -D_H(x2^(2)), F = D_H(x1 xi),
/// E = -D_H(x2 xi); positive grades act by zero. Throws on grade -1 support.
SparseMatrix rho_g0(const HamAlgebra& g, const L0Module& L, const HamElement& x);

struct L0Report {
  std::size_t pairs_checked = 0;
  std::optional<std::pair<OspName, OspName>> failing_pair;
  std::vector<std::pair<std::string, bool>> identities;  // restrictedness
  std::int64_t trace_h_table = 0;  // lifted diagonal sum
  std::int64_t trace_h_rule = 0;   // sum of lambda-2k and lambda-2k-1
  bool simple = false;             // every basis vector spins to the module
  std::size_t endo_dim = 0;
  bool ok() const;
};

L0Report check_l0(const L0Module& L, const HamAlgebra& g);

/// Human-readable dump of the five action matrices.
std::string dump_l0(const L0Module& L);

}  // namespace hamkac
