#pragma once

// Exact arithmetic in F_p and sparse/dense linear algebra over it.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hamkac {

using Residue = std::uint32_t;

bool is_prime(std::uint64_t n);

/// The prime field F_p, p > 3. Values are plain residues in [0, p).
class PrimeField {
 public:
  explicit PrimeField(std::uint32_t p);

  std::uint32_t modulus() const { return p_; }

  Residue reduce(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    return static_cast<Residue>(r < 0 ? r + p_ : r);
  }
  Residue add(Residue a, Residue b) const {
    Residue s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Residue sub(Residue a, Residue b) const { return a >= b ? a - b : a + p_ - b; }
  Residue neg(Residue a) const { return a == 0 ? 0 : p_ - a; }
  Residue mul(Residue a, Residue b) const {
    return static_cast<Residue>((static_cast<std::uint64_t>(a) * b) % p_);
  }
  Residue pow(Residue a, std::uint64_t e) const;
  Residue inv(Residue a) const;  // throws on a == 0

  /// Signed lift in (-p/2, p/2], for printing.
  std::int64_t lift(Residue a) const {
    return a > p_ / 2 ? static_cast<std::int64_t>(a) - p_ : a;
  }

  bool operator==(const PrimeField& o) const { return p_ == o.p_; }

 private:
  std::uint32_t p_;
};

/// C(n, k) mod p by Lucas' theorem, digit by digit in base p.
Residue binom_mod_p(std::uint64_t n, std::uint64_t k, std::uint32_t p);

struct Entry {
  std::uint32_t index;
  Residue value;
  bool operator==(const Entry&) const = default;
};

/// Sparse vector: entries sorted by index, no stored zeros.
using SparseVec = std::vector<Entry>;
using DenseVec = std::vector<Residue>;

/// Adds `scale * src` into `dst`, both sorted; result stays canonical.
SparseVec sparse_axpy(const PrimeField& F, const SparseVec& dst, Residue scale,
                      const SparseVec& src);
SparseVec sparse_scale(const PrimeField& F, const SparseVec& v, Residue scale);
SparseVec to_sparse(std::span<const Residue> v);
DenseVec to_dense(const SparseVec& v, std::size_t n);

/// Accumulates sparse rows into a dense scratch buffer and extracts the
/// nonzero pattern in sorted order. One instance per thread.
class SparseAccumulator {
 public:
  SparseAccumulator(const PrimeField& F, std::size_t n);
  void add(std::uint32_t index, Residue v);
  void add_scaled(const SparseVec& v, Residue scale);
  SparseVec take();  // resets the accumulator

 private:
  const PrimeField* F_;
  std::vector<Residue> values_;
  std::vector<char> used_;
  std::vector<std::uint32_t> touched_;
};

class DenseMatrix;

/// Row-major sparse matrix over F_p in canonical form (each row sorted,
/// no explicit zeros).
class SparseMatrix {
 public:
  SparseMatrix(const PrimeField& F, std::size_t rows, std::size_t cols);

  static SparseMatrix identity(const PrimeField& F, std::size_t n);
  static SparseMatrix from_rows(const PrimeField& F, std::size_t cols,
                                std::vector<SparseVec> rows);
  static SparseMatrix from_columns(const PrimeField& F, std::size_t rows,
                                   const std::vector<SparseVec>& columns);
  static SparseMatrix from_dense(const DenseMatrix& D);

  const PrimeField& field() const { return F_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const;
  double fill() const;
  bool is_zero() const { return nnz() == 0; }

  const SparseVec& row(std::size_t i) const { return data_[i]; }
  Residue at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, Residue v);

  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;

  DenseVec apply(std::span<const Residue> v) const;
  SparseVec apply(const SparseVec& v) const;
  SparseVec column(std::size_t j) const;

  bool operator==(const SparseMatrix& o) const;

 private:
  PrimeField F_;
  std::size_t rows_, cols_;
  std::vector<SparseVec> data_;
};

SparseMatrix add(const SparseMatrix& A, const SparseMatrix& B);
SparseMatrix scale(const SparseMatrix& A, Residue s);
/// A + s*B
SparseMatrix add_scaled(const SparseMatrix& A, Residue s, const SparseMatrix& B);

/// Row-parallel Gustavson product (OpenMP).
SparseMatrix multiply(const SparseMatrix& A, const SparseMatrix& B);
/// Serial reference for `multiply`.
SparseMatrix multiply_serial(const SparseMatrix& A, const SparseMatrix& B);

/// Fill ratio above which matpow switches to the dense kernel.
inline constexpr double kDenseFillThreshold = 0.25;

/// A^e by repeated squaring; throws std::invalid_argument on non-square A.
SparseMatrix matpow(const SparseMatrix& A, std::uint64_t e);

class DenseMatrix {
 public:
  DenseMatrix(const PrimeField& F, std::size_t rows, std::size_t cols);
  static DenseMatrix identity(const PrimeField& F, std::size_t n);
  static DenseMatrix from_rows(const PrimeField& F,
                               const std::vector<std::vector<std::int64_t>>& rows);

  const PrimeField& field() const { return F_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Residue& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  Residue operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  std::span<Residue> row(std::size_t i) { return {a_.data() + i * cols_, cols_}; }
  std::span<const Residue> row(std::size_t i) const {
    return {a_.data() + i * cols_, cols_};
  }
  std::size_t nnz() const;

  bool operator==(const DenseMatrix& o) const {
    return F_ == o.F_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

 private:
  PrimeField F_;
  std::size_t rows_, cols_;
  std::vector<Residue> a_;
};

DenseMatrix multiply(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix multiply_serial(const DenseMatrix& A, const DenseMatrix& B);

struct RrefResult {
  DenseMatrix matrix;
  std::size_t rank;
  std::vector<std::size_t> pivot_cols;
};

/// Reduced row-echelon form; elimination of each pivot column runs
/// row-parallel.
RrefResult rref(DenseMatrix M);
RrefResult rref_serial(DenseMatrix M);
RrefResult rref(const SparseMatrix& M);

std::size_t rank(const DenseMatrix& M);

/// Basis of the right null space, one vector per free column.
std::vector<DenseVec> kernel_basis(const DenseMatrix& M);
std::vector<DenseVec> kernel_basis(const SparseMatrix& M);

/// Incrementally maintained row space in semi-echelon form. Rows are kept
/// with distinct pivots; insertion reduces against existing rows in order.
class EchelonBasis {
 public:
  EchelonBasis(const PrimeField& F, std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return rows_.size(); }
  bool full() const { return rows_.size() == dim_; }

  /// Reduces `v` in place; returns the coefficients used (one per row).
  void reduce(DenseVec& v) const;
  void reduce(DenseVec& v, std::vector<Residue>& coeffs) const;
  /// Returns true if `v` was independent and has been added.
  bool insert(DenseVec v);
  bool contains(DenseVec v) const;

  const std::vector<DenseVec>& rows() const { return rows_; }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  /// Fully reduced row-echelon basis, pivots ascending.
  std::vector<DenseVec> canonical() const;

 private:
  PrimeField F_;
  std::size_t dim_;
  std::vector<DenseVec> rows_;
  std::vector<std::size_t> pivots_;
  std::vector<std::ptrdiff_t> pivot_row_;
};

void dense_axpy(const PrimeField& F, std::span<Residue> y, Residue a,
                std::span<const Residue> x);
bool is_zero(std::span<const Residue> v);

}  // namespace hamkac
