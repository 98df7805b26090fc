#pragma once

// Verdicts on finite-dimensional representations: spinning, the Norton
// irreducibility test, endomorphism and hom spaces, weight spaces and the
// classification table.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamkac/gfp.hpp"
#include "hamkac/kacmod.hpp"
#include "hamkac/l0rep.hpp"

namespace hamkac {

/// A super vector space with a list of operators acting on it.
struct Representation {
  PrimeField field;
  std::size_t dim = 0;
  std::vector<std::uint32_t> basis_parity;
  std::vector<SparseMatrix> generators;
  std::vector<std::uint32_t> generator_parity;
  std::vector<std::string> generator_names;
};

/// The five osp(1|2) generators.
Representation representation(const L0Module& L);
/// rho of a Lie generating set of g: grades -1..1 plus the lowest-grade
/// basis elements needed until the generated subalgebra is all of g.
Representation representation(const KacModule& M);
/// The same operators on M + N (block diagonal).
Representation direct_sum(const Representation& M, const Representation& N);
/// Basis indices of g forming the Lie generating set used above.
std::vector<std::size_t> lie_generators(const HamAlgebra& g);

struct SubmoduleBasis {
  std::size_t ambient_dim = 0;
  std::vector<DenseVec> basis;  // reduced echelon, pivots ascending
  bool certified = false;       // closure under every generator checked
  std::size_t dim() const { return basis.size(); }
  bool full() const { return basis.size() == ambient_dim; }
};

/// Smallest subspace containing `seeds` and stable under `generators`.
SubmoduleBasis spin(const PrimeField& F, std::size_t dim, const std::vector<DenseVec>& seeds,
                    const std::vector<SparseMatrix>& generators);
bool is_invariant(const SubmoduleBasis& S, const std::vector<SparseMatrix>& generators,
                  const PrimeField& F);

enum class Verdict { Irreducible, Reducible, Inconclusive };
std::string to_string(Verdict v);

struct IrreducibilityCertificate {
  Verdict verdict = Verdict::Inconclusive;
  std::uint64_t seed = 0;
  std::size_t attempts = 0;
  std::string theta;  // description of the accepted algebra element
  Residue shift = 0;  // theta - shift * I was singular
  std::size_t nullity = 0;
  DenseVec kernel_vector;
  std::size_t kernel_spin_dim = 0;
  std::size_t dual_spin_dim = 0;
  std::optional<SubmoduleBasis> invariant_subspace;  // reducible only
  std::uint32_t block_parity = 0;  // parity block theta was restricted to
  std::size_t endo_dim = 0;        // even endomorphisms
  std::size_t endo_dim_odd = 0;
  bool absolutely_irreducible() const {
    return verdict == Verdict::Irreducible && endo_dim == 1;
  }
};

/// Norton's test for graded submodules with random theta = A*B + A (A, B
/// random combinations of the generators, deterministic in `seed`),
/// restricted to one parity block; gives up after `budget` candidates.
IrreducibilityCertificate meataxe(const Representation& R, std::uint64_t seed,
                                  std::size_t budget = 64);

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HomDims {
  std::size_t even = 0;
  std::size_t odd = 0;
  std::size_t total() const { return even + odd; }
};

inline constexpr std::uint64_t kDefaultHomBudget = 250000;

/// Parity-homogeneous intertwiners M -> N. The generator lists must match.
/// Throws BudgetExceeded when dim M * dim N exceeds `budget`.
HomDims hom_dim(const Representation& M, const Representation& N, std::uint64_t seed = 0,
                std::uint64_t budget = kDefaultHomBudget);
/// Independent check: solves T rho_M(g) = rho_N(g) T as one linear system
/// in dim M * dim N unknowns. Small inputs only.
HomDims hom_dim_direct(const Representation& M, const Representation& N,
                       std::uint64_t budget = 1024);
/// Even endomorphisms of R.
std::size_t endo_dim(const Representation& R, std::uint64_t seed = 0);

/// Eigenspace dimensions of rho(h), keyed by eigenvalue. Throws
/// std::domain_error unless rho(h)^p = rho(h).
std::map<Residue, std::size_t> weight_spaces(const SparseMatrix& rho_h);

struct SingularVector {
  Residue weight;
  DenseVec vector;
};

/// Joint kernel of `raising`, split into rho(h)-eigenspaces.
std::vector<SingularVector> singular_vectors(const SparseMatrix& rho_h,
                                             const std::vector<SparseMatrix>& raising);
/// Raising operators e, E and all positive-grade basis elements.
std::vector<SparseMatrix> raising_operators(const KacModule& M);

// ---------------------------------------------------------- classification

struct ClassificationRow {
  std::string chi_type;
  Residue lambda = 0;
  std::uint64_t dim = 0;
  std::uint64_t expected_dim = 0;
  int height = 0;
  bool module_law = false;
  bool chi_reduced = false;
  bool irreducible = false;
  std::size_t endo_dim = 0;
  std::size_t endo_dim_odd = 0;
  std::vector<std::size_t> weight_signature;  // dims of weight 0..p-1
  std::uint64_t meataxe_seed = 0;
  std::int64_t elapsed_ms = 0;
  std::string witness;  // first failing check, empty when all pass
};

struct HomCheck {
  std::string chi_type;
  Residue lambda = 0, mu = 0;
  HomDims dims;
  bool refused = false;  // over the hom budget
};

struct ClassificationOptions {
  LawMode law_mode = LawMode::Sampled;
  std::size_t law_samples = 200;
  bool run_meataxe = true;
  bool run_hom = true;
  std::uint64_t hom_budget = kDefaultHomBudget;
  std::vector<Residue> hom_lambdas{0, 1, 2};  // ordered pairs among these
  std::uint64_t seed = 0;
  bool timings = false;
  std::optional<std::filesystem::path> cache_dir;  // Kac action matrices
};

struct ClassificationReport {
  std::vector<ClassificationRow> rows;
  std::vector<HomCheck> hom_checks;
  bool dims_distinct = true;
  bool ok = true;
  std::string failing_cell;
};

ClassificationReport classify(const HamAlgebra& g, const std::vector<Character>& chis,
                              const std::vector<Residue>& lambdas,
                              const ClassificationOptions& opt);

}  // namespace hamkac
