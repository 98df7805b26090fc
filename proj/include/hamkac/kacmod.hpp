#pragma once

// Height-0 characters and the Kac modules K_chi(lambda), realized as one
// sparse action matrix per canonical basis element of H(2,1;t).

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hamkac/gfp.hpp"
#include "hamkac/hamalg.hpp"
#include "hamkac/l0rep.hpp"

namespace hamkac {

enum class ChiType { I, II, III, Custom };

std::string to_string(ChiType t);

/// chi on the canonical basis; odd entries are always zero.
struct Character {
  ChiType type = ChiType::Custom;
  std::vector<Residue> values;

  Residue at(std::size_t i) const { return values[i]; }
  bool is_zero() const;
};

/// Canonical types: I has chi(D1) = chi(D2) = 1, II has chi(D1) = 1,
/// III has chi(D2) = 1; every other even basis value is 0.
Character make_character(const HamAlgebra& g, ChiType t);
/// Throws std::invalid_argument if an odd basis element gets a nonzero value.
Character custom_character(const HamAlgebra& g, const std::map<std::size_t, Residue>& values);

/// chi(D1) = -chi(D_H(x2)), chi(D2) = chi(D_H(x1)).
Residue chi_D1(const HamAlgebra& g, const Character& chi);
Residue chi_D2(const HamAlgebra& g, const Character& chi);

/// Least i >= -1 with chi vanishing on the filtration piece g_i.
int height(const Character& chi, const HamAlgebra& g);

/// D1^a D2^b D3^c (x) v_r, r indexing the L0 basis.
struct KacIndex {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint32_t c = 0;
  std::uint32_t r = 0;
  bool operator==(const KacIndex&) const = default;
};

/// Order in which (a, b, c) factors are peeled off by act_with_order.
enum class PeelOrder { D1First, D3First };

class KacModule {
 public:
  /// `g` must outlive the module.
  KacModule(const HamAlgebra& g, Character chi, L0Module l0, std::vector<SparseMatrix> actions);

  const HamAlgebra& algebra() const { return *g_; }
  const Character& chi() const { return chi_; }
  const L0Module& l0() const { return l0_; }
  Residue lambda() const { return l0_.lambda; }

  std::size_t dim() const { return dim_; }
  std::size_t index(const KacIndex& m) const;
  KacIndex decode(std::size_t i) const;
  std::uint32_t parity(std::size_t i) const;

  const std::vector<SparseMatrix>& actions() const { return actions_; }
  const SparseMatrix& action(std::size_t x) const { return actions_[x]; }
  /// For negative controls only.
  SparseMatrix& mutable_action(std::size_t x) { return actions_[x]; }
  /// rho(x) for a general element.
  SparseMatrix rho(const HamElement& x) const;

  /// x . m from the stored matrices.
  SparseVec act(std::size_t x, const KacIndex& m) const;
  /// Recomputes x . m by direct recursion, without memoization, peeling
  /// the PBW monomial in the given order.
  SparseVec act_with_order(const HamElement& x, const KacIndex& m, PeelOrder order) const;

  /// Left multiplication by D1, D2, D3 on the PBW basis (with the
  /// chi-reduction on overflow).
  SparseVec lower(int k, const SparseVec& v) const;

 private:
  const HamAlgebra* g_;
  Character chi_;
  L0Module l0_;
  std::size_t n1_, n2_, dim_;
  std::vector<SparseMatrix> actions_;
};

/// Builds all action matrices, grade by grade; basis elements of one grade
/// are processed in parallel.
KacModule build_kac(const HamAlgebra& g, const Character& chi, Residue lambda);
KacModule build_kac_serial(const HamAlgebra& g, const Character& chi, Residue lambda);

std::uint64_t kac_dimension(const Shape& s, Residue lambda);

enum class LawMode { Full, Sampled };

struct LawFailure {
  std::size_t x, y;
  std::size_t witness;  // basis vector on which the two sides differ
};

struct LawReport {
  std::size_t pairs_checked = 0;
  std::size_t failures = 0;
  std::optional<LawFailure> first_failure;
  bool ok() const { return failures == 0 && pairs_checked > 0; }
};

/// rho([x,y]) = rho(x)rho(y) - (-1)^{|x||y|} rho(y)rho(x) over all basis
/// pairs (Full) or `samples` random pairs (Sampled).
LawReport verify_module_law(const KacModule& M, LawMode mode, std::size_t samples = 200,
                            std::uint64_t seed = 0);

struct ChiReducedReport {
  std::size_t even_checked = 0;
  std::size_t odd_checked = 0;
  std::vector<std::size_t> failing;  // basis indices
  bool ok() const { return failing.empty(); }
};

/// rho(e)^(p^s) - rho(phi(e)) = chi(e)^(p^s) I on even basis elements and
/// rho(x)^2 = rho([x,x]) / 2 on odd ones.
ChiReducedReport verify_chi_reduced(const KacModule& M, const GRStructure& gr);

/// Parity homogeneity of every action matrix.
bool check_parity(const KacModule& M);

// ------------------------------------------------------------------ cache

inline constexpr int kKacCacheVersion = 1;

std::string kac_cache_name(const Shape& s, const Character& chi, Residue lambda);
void save_kac_cache(const KacModule& M, const std::filesystem::path& file);
/// nullopt on any mismatch, parse error or checksum failure.
std::optional<KacModule> load_kac_cache(const HamAlgebra& g, const Character& chi, Residue lambda,
                                        const std::filesystem::path& file);

}  // namespace hamkac
