#include "hamkac/gfp.hpp"

#include <algorithm>
#include <stdexcept>

namespace hamkac {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

PrimeField::PrimeField(std::uint32_t p) : p_(p) {
  if (p <= 3 || !is_prime(p) || p >= (1u << 31))
    throw std::invalid_argument("p must be prime > 3, got " + std::to_string(p));
}

Residue PrimeField::pow(Residue a, std::uint64_t e) const {
  Residue result = 1 % p_;
  Residue base = a % p_;
  while (e) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

Residue PrimeField::inv(Residue a) const {
  if (a % p_ == 0) throw std::domain_error("inverse of zero in F_p");
  return pow(a, p_ - 2);
}

Residue binom_mod_p(std::uint64_t n, std::uint64_t k, std::uint32_t p) {
  if (k > n) return 0;
  // Small-digit binomials by the multiplicative formula with inverses.
  auto small = [p](std::uint64_t nn, std::uint64_t kk) -> std::uint64_t {
    if (kk > nn) return 0;
    std::uint64_t num = 1, den = 1;
    for (std::uint64_t i = 0; i < kk; ++i) {
      num = num * ((nn - i) % p) % p;
      den = den * ((i + 1) % p) % p;
    }
    std::uint64_t inv = 1, b = den, e = p - 2;
    while (e) {
      if (e & 1) inv = inv * b % p;
      b = b * b % p;
      e >>= 1;
    }
    return num * inv % p;
  };
  std::uint64_t result = 1;
  while (n || k) {
    std::uint64_t nd = n % p, kd = k % p;
    if (kd > nd) return 0;
    result = result * small(nd, kd) % p;
    n /= p;
    k /= p;
  }
  return static_cast<Residue>(result);
}

// ---------------------------------------------------------------- sparse vec

SparseVec sparse_axpy(const PrimeField& F, const SparseVec& dst, Residue scale,
                      const SparseVec& src) {
  if (scale == 0 || src.empty()) return dst;
  SparseVec out;
  out.reserve(dst.size() + src.size());
  auto a = dst.begin(), b = src.begin();
  while (a != dst.end() || b != src.end()) {
    if (b == src.end() || (a != dst.end() && a->index < b->index)) {
      out.push_back(*a++);
    } else if (a == dst.end() || b->index < a->index) {
      out.push_back({b->index, F.mul(scale, b->value)});
      ++b;
    } else {
      Residue v = F.add(a->value, F.mul(scale, b->value));
      if (v) out.push_back({a->index, v});
      ++a;
      ++b;
    }
  }
  return out;
}

SparseVec sparse_scale(const PrimeField& F, const SparseVec& v, Residue scale) {
  SparseVec out;
  if (scale == 0) return out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back({e.index, F.mul(e.value, scale)});
  return out;
}

SparseVec to_sparse(std::span<const Residue> v) {
  SparseVec out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i]) out.push_back({static_cast<std::uint32_t>(i), v[i]});
  return out;
}

DenseVec to_dense(const SparseVec& v, std::size_t n) {
  DenseVec out(n, 0);
  for (const auto& e : v) out[e.index] = e.value;
  return out;
}

SparseAccumulator::SparseAccumulator(const PrimeField& F, std::size_t n)
    : F_(&F), values_(n, 0), used_(n, 0) {}

void SparseAccumulator::add(std::uint32_t index, Residue v) {
  if (!used_[index]) {
    used_[index] = 1;
    touched_.push_back(index);
  }
  values_[index] = F_->add(values_[index], v);
}

void SparseAccumulator::add_scaled(const SparseVec& v, Residue scale) {
  if (scale == 0) return;
  for (const auto& e : v) add(e.index, F_->mul(e.value, scale));
}

SparseVec SparseAccumulator::take() {
  std::sort(touched_.begin(), touched_.end());
  SparseVec out;
  out.reserve(touched_.size());
  for (auto i : touched_) {
    if (values_[i]) out.push_back({i, values_[i]});
    values_[i] = 0;
    used_[i] = 0;
  }
  touched_.clear();
  return out;
}

// ------------------------------------------------------------- sparse matrix

SparseMatrix::SparseMatrix(const PrimeField& F, std::size_t rows, std::size_t cols)
    : F_(F), rows_(rows), cols_(cols), data_(rows) {}

SparseMatrix SparseMatrix::identity(const PrimeField& F, std::size_t n) {
  SparseMatrix I(F, n, n);
  for (std::size_t i = 0; i < n; ++i)
    I.data_[i].push_back({static_cast<std::uint32_t>(i), 1});
  return I;
}

SparseMatrix SparseMatrix::from_rows(const PrimeField& F, std::size_t cols,
                                     std::vector<SparseVec> rows) {
  SparseMatrix M(F, rows.size(), cols);
  M.data_ = std::move(rows);
  return M;
}

SparseMatrix SparseMatrix::from_columns(const PrimeField& F, std::size_t rows,
                                        const std::vector<SparseVec>& columns) {
  SparseMatrix M(F, rows, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (const auto& e : columns[j])
      M.data_[e.index].push_back({static_cast<std::uint32_t>(j), e.value});
  return M;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& D) {
  SparseMatrix M(D.field(), D.rows(), D.cols());
  for (std::size_t i = 0; i < D.rows(); ++i) M.data_[i] = to_sparse(D.row(i));
  return M;
}

std::size_t SparseMatrix::nnz() const {
  std::size_t n = 0;
  for (const auto& r : data_) n += r.size();
  return n;
}

double SparseMatrix::fill() const {
  if (rows_ == 0 || cols_ == 0) return 0.0;
  return static_cast<double>(nnz()) / (static_cast<double>(rows_) * cols_);
}

Residue SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto& r = data_.at(i);
  auto it = std::lower_bound(r.begin(), r.end(), j,
                             [](const Entry& e, std::size_t c) { return e.index < c; });
  return (it != r.end() && it->index == j) ? it->value : 0;
}

void SparseMatrix::set(std::size_t i, std::size_t j, Residue v) {
  if (i >= rows_ || j >= cols_) throw std::out_of_range("SparseMatrix::set");
  v %= F_.modulus();
  auto& r = data_[i];
  auto it = std::lower_bound(r.begin(), r.end(), j,
                             [](const Entry& e, std::size_t c) { return e.index < c; });
  if (it != r.end() && it->index == j) {
    if (v) it->value = v;
    else r.erase(it);
  } else if (v) {
    r.insert(it, {static_cast<std::uint32_t>(j), v});
  }
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix T(F_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (const auto& e : data_[i])
      T.data_[e.index].push_back({static_cast<std::uint32_t>(i), e.value});
  return T;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix D(F_, rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (const auto& e : data_[i]) D(i, e.index) = e.value;
  return D;
}

DenseVec SparseMatrix::apply(std::span<const Residue> v) const {
  if (v.size() != cols_) throw std::invalid_argument("apply: dimension mismatch");
  DenseVec out(rows_, 0);
  const std::uint64_t p = F_.modulus();
  for (std::size_t i = 0; i < rows_; ++i) {
    std::uint64_t acc = 0;
    for (const auto& e : data_[i]) {
      acc += static_cast<std::uint64_t>(e.value) * v[e.index];
      if (acc >= (1ull << 62)) acc %= p;
    }
    out[i] = static_cast<Residue>(acc % p);
  }
  return out;
}

SparseVec SparseMatrix::apply(const SparseVec& v) const {
  // Sparse v: go through the transpose pattern implicitly via a dense pass.
  if (v.empty()) return {};
  DenseVec dv = hamkac::to_dense(v, cols_);
  return to_sparse(apply(dv));
}

SparseVec SparseMatrix::column(std::size_t j) const {
  SparseVec out;
  for (std::size_t i = 0; i < rows_; ++i) {
    Residue v = at(i, j);
    if (v) out.push_back({static_cast<std::uint32_t>(i), v});
  }
  return out;
}

bool SparseMatrix::operator==(const SparseMatrix& o) const {
  return F_ == o.F_ && rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

namespace {

void require_same_shape(const SparseMatrix& A, const SparseMatrix& B) {
  if (!(A.field() == B.field()) || A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("matrix shape or field mismatch");
}

SparseVec gustavson_row(const SparseMatrix& A, const SparseMatrix& B, std::size_t i,
                        SparseAccumulator& acc) {
  for (const auto& e : A.row(i)) acc.add_scaled(B.row(e.index), e.value);
  return acc.take();
}

}  // namespace

SparseMatrix add_scaled(const SparseMatrix& A, Residue s, const SparseMatrix& B) {
  require_same_shape(A, B);
  std::vector<SparseVec> rows(A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i)
    rows[i] = sparse_axpy(A.field(), A.row(i), s, B.row(i));
  return SparseMatrix::from_rows(A.field(), A.cols(), std::move(rows));
}

SparseMatrix add(const SparseMatrix& A, const SparseMatrix& B) {
  return add_scaled(A, 1, B);
}

SparseMatrix scale(const SparseMatrix& A, Residue s) {
  std::vector<SparseVec> rows(A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i)
    rows[i] = sparse_scale(A.field(), A.row(i), s % A.field().modulus());
  return SparseMatrix::from_rows(A.field(), A.cols(), std::move(rows));
}

SparseMatrix multiply_serial(const SparseMatrix& A, const SparseMatrix& B) {
  if (A.cols() != B.rows() || !(A.field() == B.field()))
    throw std::invalid_argument("multiply: dimension mismatch");
  std::vector<SparseVec> rows(A.rows());
  SparseAccumulator acc(A.field(), B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) rows[i] = gustavson_row(A, B, i, acc);
  return SparseMatrix::from_rows(A.field(), B.cols(), std::move(rows));
}

SparseMatrix multiply(const SparseMatrix& A, const SparseMatrix& B) {
  if (A.cols() != B.rows() || !(A.field() == B.field()))
    throw std::invalid_argument("multiply: dimension mismatch");
  std::vector<SparseVec> rows(A.rows());
  const auto n = static_cast<std::ptrdiff_t>(A.rows());
#pragma omp parallel
  {
    SparseAccumulator acc(A.field(), B.cols());
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      rows[static_cast<std::size_t>(i)] =
          gustavson_row(A, B, static_cast<std::size_t>(i), acc);
  }
  return SparseMatrix::from_rows(A.field(), B.cols(), std::move(rows));
}

SparseMatrix matpow(const SparseMatrix& A, std::uint64_t e) {
  if (A.rows() != A.cols()) throw std::invalid_argument("matpow: matrix not square");
  const PrimeField& F = A.field();
  SparseMatrix result = SparseMatrix::identity(F, A.rows());
  SparseMatrix base = A;
  while (e) {
    if (base.fill() > kDenseFillThreshold || result.fill() > kDenseFillThreshold) {
      DenseMatrix dres = result.to_dense(), dbase = base.to_dense();
      while (e) {
        if (e & 1) dres = multiply(dres, dbase);
        e >>= 1;
        if (e) dbase = multiply(dbase, dbase);
      }
      return SparseMatrix::from_dense(dres);
    }
    if (e & 1) result = multiply(result, base);
    e >>= 1;
    if (e) {
      base = multiply(base, base);
      if (base.is_zero()) return SparseMatrix(F, A.rows(), A.cols());
    }
  }
  return result;
}

// -------------------------------------------------------------- dense matrix

DenseMatrix::DenseMatrix(const PrimeField& F, std::size_t rows, std::size_t cols)
    : F_(F), rows_(rows), cols_(cols), a_(rows * cols, 0) {}

DenseMatrix DenseMatrix::identity(const PrimeField& F, std::size_t n) {
  DenseMatrix I(F, n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1;
  return I;
}

DenseMatrix DenseMatrix::from_rows(const PrimeField& F,
                                   const std::vector<std::vector<std::int64_t>>& rows) {
  std::size_t cols = rows.empty() ? 0 : rows.front().size();
  DenseMatrix M(F, rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument("ragged rows");
    for (std::size_t j = 0; j < cols; ++j) M(i, j) = F.reduce(rows[i][j]);
  }
  return M;
}

std::size_t DenseMatrix::nnz() const {
  return static_cast<std::size_t>(std::count_if(a_.begin(), a_.end(),
                                                [](Residue v) { return v != 0; }));
}

namespace {

void dense_row_product(const DenseMatrix& A, const DenseMatrix& B, DenseMatrix& C,
                       std::size_t i, std::vector<std::uint64_t>& acc) {
  const std::uint64_t p = A.field().modulus();
  std::fill(acc.begin(), acc.end(), 0);
  const std::size_t m = B.cols();
  // Periodic reduction keeps the 64-bit accumulators from overflowing.
  const std::size_t flush = std::max<std::size_t>(
      1, static_cast<std::size_t>((1ull << 62) / ((p - 1) * (p - 1) + 1)));
  std::size_t pending = 0;
  for (std::size_t k = 0; k < A.cols(); ++k) {
    const std::uint64_t a = A(i, k);
    if (!a) continue;
    auto brow = B.row(k);
    for (std::size_t j = 0; j < m; ++j) acc[j] += a * brow[j];
    if (++pending == flush) {
      for (auto& x : acc) x %= p;
      pending = 0;
    }
  }
  for (std::size_t j = 0; j < m; ++j) C(i, j) = static_cast<Residue>(acc[j] % p);
}

}  // namespace

DenseMatrix multiply_serial(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.cols() != B.rows()) throw std::invalid_argument("multiply: dimension mismatch");
  DenseMatrix C(A.field(), A.rows(), B.cols());
  std::vector<std::uint64_t> acc(B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i) dense_row_product(A, B, C, i, acc);
  return C;
}

DenseMatrix multiply(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.cols() != B.rows()) throw std::invalid_argument("multiply: dimension mismatch");
  DenseMatrix C(A.field(), A.rows(), B.cols());
  const auto n = static_cast<std::ptrdiff_t>(A.rows());
#pragma omp parallel
  {
    std::vector<std::uint64_t> acc(B.cols());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      dense_row_product(A, B, C, static_cast<std::size_t>(i), acc);
  }
  return C;
}

void dense_axpy(const PrimeField& F, std::span<Residue> y, Residue a,
                std::span<const Residue> x) {
  if (a == 0) return;
  const std::uint64_t p = F.modulus();
  for (std::size_t j = 0; j < y.size(); ++j)
    if (x[j]) y[j] = static_cast<Residue>((y[j] + static_cast<std::uint64_t>(a) * x[j]) % p);
}

bool is_zero(std::span<const Residue> v) {
  return std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; });
}

namespace {

template <bool Parallel>
RrefResult rref_impl(DenseMatrix M) {
  const PrimeField& F = M.field();
  const std::size_t rows = M.rows(), cols = M.cols();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && M(piv, c) == 0) ++piv;
    if (piv == rows) continue;
    if (piv != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(M(piv, j), M(r, j));
    const Residue inv = F.inv(M(r, c));
    for (std::size_t j = c; j < cols; ++j) M(r, j) = F.mul(M(r, j), inv);
    const auto prow = std::span<const Residue>(M.row(r));
    const auto n = static_cast<std::ptrdiff_t>(rows);
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto ii = static_cast<std::size_t>(i);
        if (ii == r) continue;
        Residue f = M(ii, c);
        if (f) dense_axpy(F, M.row(ii), F.neg(f), prow);
      }
    } else {
      for (std::size_t i = 0; i < rows; ++i) {
        if (i == r) continue;
        Residue f = M(i, c);
        if (f) dense_axpy(F, M.row(i), F.neg(f), prow);
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return RrefResult{std::move(M), r, std::move(pivots)};
}

}  // namespace

RrefResult rref(DenseMatrix M) { return rref_impl<true>(std::move(M)); }
RrefResult rref_serial(DenseMatrix M) { return rref_impl<false>(std::move(M)); }
RrefResult rref(const SparseMatrix& M) { return rref(M.to_dense()); }

std::size_t rank(const DenseMatrix& M) { return rref(M).rank; }

std::vector<DenseVec> kernel_basis(const DenseMatrix& M) {
  const PrimeField& F = M.field();
  auto R = rref(M);
  const std::size_t cols = M.cols();
  std::vector<char> is_pivot(cols, 0);
  for (auto c : R.pivot_cols) is_pivot[c] = 1;
  std::vector<DenseVec> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    DenseVec v(cols, 0);
    v[free] = 1;
    for (std::size_t k = 0; k < R.rank; ++k) v[R.pivot_cols[k]] = F.neg(R.matrix(k, free));
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<DenseVec> kernel_basis(const SparseMatrix& M) {
  return kernel_basis(M.to_dense());
}

// ------------------------------------------------------------ echelon basis

EchelonBasis::EchelonBasis(const PrimeField& F, std::size_t dim)
    : F_(F), dim_(dim), pivot_row_(dim, -1) {}

void EchelonBasis::reduce(DenseVec& v) const {
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    Residue c = v[pivots_[k]];
    if (c) dense_axpy(F_, v, F_.neg(c), rows_[k]);
  }
}

void EchelonBasis::reduce(DenseVec& v, std::vector<Residue>& coeffs) const {
  coeffs.assign(rows_.size(), 0);
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    Residue c = v[pivots_[k]];
    coeffs[k] = c;
    if (c) dense_axpy(F_, v, F_.neg(c), rows_[k]);
  }
}

bool EchelonBasis::insert(DenseVec v) {
  if (v.size() != dim_) throw std::invalid_argument("EchelonBasis: wrong length");
  reduce(v);
  auto it = std::find_if(v.begin(), v.end(), [](Residue x) { return x != 0; });
  if (it == v.end()) return false;
  const auto piv = static_cast<std::size_t>(it - v.begin());
  const Residue inv = F_.inv(*it);
  for (auto& x : v) x = F_.mul(x, inv);
  pivot_row_[piv] = static_cast<std::ptrdiff_t>(rows_.size());
  pivots_.push_back(piv);
  rows_.push_back(std::move(v));
  return true;
}

bool EchelonBasis::contains(DenseVec v) const {
  reduce(v);
  return is_zero(v);
}

std::vector<DenseVec> EchelonBasis::canonical() const {
  DenseMatrix M(F_, rows_.size(), dim_);
  for (std::size_t i = 0; i < rows_.size(); ++i)
    std::copy(rows_[i].begin(), rows_[i].end(), M.row(i).begin());
  auto R = rref(std::move(M));
  std::vector<DenseVec> out;
  for (std::size_t i = 0; i < R.rank; ++i)
    out.emplace_back(R.matrix.row(i).begin(), R.matrix.row(i).end());
  return out;
}

}  // namespace hamkac
