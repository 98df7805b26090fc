#pragma once

// The Hamiltonian superalgebra H(2,1;t) realized inside the derivations of
// the divided power superalgebra. Elements are coordinate vectors over the
// canonical basis D_H(x1^(i1) x2^(i2) xi^j), i1+i2+j >= 1.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hamkac/dpsuper.hpp"
#include "hamkac/gfp.hpp"

namespace hamkac {

/// Coordinates over the canonical basis, sorted, no zeros.
using HamElement = SparseVec;

/// The constant tables attached to the three variables: i -> i', sign
/// sigma(i), parity tau(i). Indexed 1..3 (slot 0 unused).
struct SigmaTauTables {
  static constexpr std::array<int, 4> prime{0, 2, 1, 3};
  static constexpr std::array<int, 4> sigma{0, 1, -1, 1};
  static constexpr std::array<int, 4> tau{0, 0, 0, 1};
};

/// Element sum_k components[k] * D_{k+1} of the full derivation algebra.
struct AmbientDerivation {
  std::array<SuperPoly, 3> components;
  std::uint32_t parity = 0;
};

/// D(g) = sum_k components[k] * D_{k+1}(g).
SuperPoly apply(const AmbientDerivation& D, const SuperPoly& g);
/// Supercommutator of two homogeneous derivations.
AmbientDerivation supercommutator(const AmbientDerivation& A, const AmbientDerivation& B);

/// Bracket table over a fixed basis with parities. Kept separate from the
/// algebra so checks can run against perturbed copies.
struct StructureConstants {
  PrimeField field;
  std::vector<std::uint32_t> parity;
  std::vector<HamElement> table;  // [x * n + y]

  std::size_t dim() const { return parity.size(); }
  const HamElement& at(std::size_t x, std::size_t y) const { return table[x * dim() + y]; }
  HamElement bracket(const HamElement& x, const HamElement& y) const;
  HamElement bracket_basis(std::size_t x, const HamElement& y) const;
};

struct JacobiWitness {
  std::size_t x, y, z;
  HamElement residual;
};

struct JacobiReport {
  std::uint64_t triples_checked = 0;
  std::uint64_t failures = 0;
  std::optional<JacobiWitness> first_failure;
  bool ok() const { return failures == 0; }
};

/// Exhaustive super-Jacobi over all basis triples, parallel over x.
JacobiReport check_jacobi(const StructureConstants& sc);
JacobiReport check_jacobi_serial(const StructureConstants& sc);
/// Super-Jacobi on `samples` random triples.
JacobiReport check_jacobi_sampled(const StructureConstants& sc, std::size_t samples,
                                  std::uint64_t seed);

class HamAlgebra {
 public:
  explicit HamAlgebra(const Shape& shape);
  /// Adopts a precomputed table (cache load); the table is trusted to
  /// match the canonical basis order of `shape`.
  HamAlgebra(const Shape& shape, StructureConstants table);

  const Shape& shape() const { return shape_; }
  const PrimeField& field() const { return sc_.field; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<Monomial>& basis() const { return basis_; }
  const Monomial& label(std::size_t i) const { return basis_[i]; }
  std::optional<std::size_t> index_of(const Monomial& m) const;
  std::size_t index(const Monomial& m) const;  // throws if absent

  std::uint32_t parity(std::size_t i) const { return basis_[i].parity(); }
  int grade(std::size_t i) const { return static_cast<int>(degree(basis_[i])) - 2; }
  bool filtration_member(std::size_t i, int level) const { return grade(i) >= level; }
  int min_grade() const { return -1; }
  int max_grade() const { return max_grade_; }
  /// The upper grading bound written in the source literature,
  /// p^(t1+t2) - 3, which differs from the enumerated one.
  std::int64_t stated_max_grade() const;
  std::vector<std::size_t> graded_component(int g) const;

  /// D_H(f) in the canonical basis; constants map to zero.
  HamElement d_h(const SuperPoly& f) const;
  /// The three component functions (f_1, f_2, f_3) of D_H(f).
  AmbientDerivation ambient(const SuperPoly& f) const;
  AmbientDerivation ambient(const HamElement& x) const;

  const StructureConstants& structure_constants() const { return sc_; }
  const HamElement& bracket_basis(std::size_t x, std::size_t y) const { return sc_.at(x, y); }
  HamElement bracket(const HamElement& x, const HamElement& y) const {
    return sc_.bracket(x, y);
  }
  HamElement basis_element(std::size_t i, Residue c = 1) const;
  /// Parity of a homogeneous element; throws on mixed support.
  std::uint32_t parity_of(const HamElement& x) const;

  /// ad(x) on all of g, column j = [x, b_j].
  SparseMatrix ad(const HamElement& x) const;

  // The abbreviations used throughout: D1 = -D_H(x2), D2 = D_H(x1),
  // D3 = -D_H(xi).
  HamElement D1() const;
  HamElement D2() const;
  HamElement D3() const;

 private:
  void enumerate_basis();

  Shape shape_;
  StructureConstants sc_;
  std::vector<Monomial> basis_;
  std::vector<std::int64_t> index_;  // dense lookup over (i1, i2, j)
  int max_grade_ = -1;
};

/// Builds the bracket table with rows computed in parallel.
StructureConstants build_structure_constants(const Shape& shape,
                                             const std::vector<Monomial>& basis);
StructureConstants build_structure_constants_serial(const Shape& shape,
                                                    const std::vector<Monomial>& basis);
std::vector<Monomial> canonical_basis(const Shape& shape);

// ------------------------------------------------------------------ GR

struct GRStructure {
  std::vector<std::size_t> ordered_even_basis;
  std::vector<std::uint32_t> exponents;  // s_i
  std::vector<HamElement> phi;           // phi_s(e_i)
};

/// Ordered even basis, exponents (t2, t1, 1, ...) and phi_s(e_i), the
/// element whose adjoint is (ad e_i)^(p^s_i) (zero if none exists).
GRStructure gr_structure(const HamAlgebra& g);

struct GRReport {
  GRStructure structure;
  bool ok = true;
  std::size_t checked = 0;
  // First failing pair: (basis element e_i, target basis vector y).
  std::optional<std::pair<std::size_t, std::size_t>> counterexample;
};

/// Checks (ad e_i)^(p^s_i) == ad phi_s(e_i) as matrices on all of g.
GRReport verify_gr(const HamAlgebra& g);

// ----------------------------------------------------------------- osp(1|2)

struct OspGenerators {
  HamElement h, e, f, E, F;
};

OspGenerators osp_generators(const HamAlgebra& g);

struct OspRelationResult {
  std::string name;
  bool ok;
  std::string actual;  // computed bracket in the h, e, f, E, F basis
};

struct OspReport {
  /// The twelve displayed relations, checked literally.
  std::vector<OspRelationResult> relations;
  /// Super-Jacobi failures of the 5-dimensional bracket defined by the
  /// twelve displayed relations alone (nonzero means they are inconsistent).
  std::uint64_t literal_jacobi_failures = 0;
  /// All 25 generator pairs against the supercommutators of the 3x3
  /// supermatrices h = E22-E33, e = E23, f = E32, E = E13+E21, F = E12-E31.
  std::size_t realization_pairs = 0;
  std::size_t realization_failures = 0;
  std::size_t zero_component_dim = 0;
  std::size_t span_rank = 0;
  bool spans_zero_component = false;

  bool literal_ok() const;
  bool realization_ok() const;
  bool ok() const { return literal_ok() && realization_ok(); }
};

/// Coordinates of x in g_[0] over (h, e, f, E, F); throws if x has
/// support outside g_[0].
std::array<Residue, 5> osp_coordinates(const HamAlgebra& g, const HamElement& x);

OspReport verify_osp(const HamAlgebra& g);

/// Brackets computed through the derivation supercommutator agree with the
/// table for every basis pair. Returns the number of mismatches.
std::size_t check_closure_in_derivations(const HamAlgebra& g);

// -------------------------------------------------------------- cache file

inline constexpr int kStructureCacheVersion = 1;

void save_structure_cache(const HamAlgebra& g, const std::filesystem::path& file);
/// Returns nullopt if the file is missing, unreadable, of another version
/// or shape, or fails its checksum.
std::optional<HamAlgebra> load_structure_cache(const Shape& shape,
                                               const std::filesystem::path& file);
/// Loads from `dir` when a valid cache exists, otherwise builds and writes.
HamAlgebra load_or_build(const Shape& shape, const std::optional<std::filesystem::path>& dir);

std::string structure_cache_name(const Shape& shape);

}  // namespace hamkac
