#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tropkm/errors.hpp"
#include "tropkm/field.hpp"

// Dense linear algebra over the coefficient field itself (no t).

namespace tropkm {

template <ExactField F>
using FieldVector = std::vector<typename F::Element>;

/// Row-major list of rows, each of length `cols`.
template <ExactField F>
using FieldRows = std::vector<FieldVector<F>>;

template <ExactField F>
struct Echelon {
  FieldRows<F> rows;               // nonzero rows, reduced, pivot entries 1
  std::vector<std::size_t> pivots;  // ascending pivot column per row
};

/// Reduced row echelon form.
template <ExactField F>
Echelon<F> rref(const F& f, FieldRows<F> rows, std::size_t cols) {
  for (const auto& r : rows) {
    if (r.size() != cols) throw DimensionMismatch("row length " + std::to_string(r.size()) + " != " + std::to_string(cols));
  }
  Echelon<F> out;
  std::size_t lead_row = 0;
  for (std::size_t c = 0; c < cols && lead_row < rows.size(); ++c) {
    std::size_t piv = lead_row;
    while (piv < rows.size() && f.is_zero(rows[piv][c])) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[lead_row]);
    auto& pr = rows[lead_row];
    const auto inv = f.inv(pr[c]);
    for (std::size_t k = c; k < cols; ++k) pr[k] = f.mul(pr[k], inv);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == lead_row || f.is_zero(rows[i][c])) continue;
      const auto q = rows[i][c];
      for (std::size_t k = c; k < cols; ++k) rows[i][k] = f.sub(rows[i][k], f.mul(q, pr[k]));
    }
    out.pivots.push_back(c);
    ++lead_row;
  }
  rows.resize(lead_row);
  out.rows = std::move(rows);
  return out;
}

template <ExactField F>
std::size_t rank(const F& f, const FieldRows<F>& rows, std::size_t cols) {
  return rref(f, rows, cols).pivots.size();
}

/// Subspace of F^n stored as the nonzero rows of its reduced row echelon form,
/// so equal subspaces have identical representations.
template <ExactField F>
class SubspaceBasis {
 public:
  using Element = typename F::Element;
  using Vec = FieldVector<F>;

  SubspaceBasis(const F& f, std::size_t ambient) : f_(f), n_(ambient) {}

  static SubspaceBasis span(const F& f, std::size_t ambient, const FieldRows<F>& vectors) {
    SubspaceBasis s(f, ambient);
    auto e = rref(f, vectors, ambient);
    s.rows_ = std::move(e.rows);
    s.pivots_ = std::move(e.pivots);
    return s;
  }

  static SubspaceBasis full(const F& f, std::size_t ambient) {
    FieldRows<F> id(ambient, Vec(ambient, f.zero()));
    for (std::size_t i = 0; i < ambient; ++i) id[i][i] = f.one();
    return span(f, ambient, id);
  }

  const F& field() const noexcept { return f_; }
  std::size_t ambient() const noexcept { return n_; }
  std::size_t dim() const noexcept { return rows_.size(); }
  bool is_zero() const noexcept { return rows_.empty(); }
  const FieldRows<F>& basis() const noexcept { return rows_; }
  const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

  /// v minus its projection along pivot coordinates; zero iff v lies in the subspace.
  Vec reduce(Vec v) const {
    check(v);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const Element q = v[pivots_[k]];
      if (f_.is_zero(q)) continue;
      for (std::size_t j = 0; j < n_; ++j) v[j] = f_.sub(v[j], f_.mul(q, rows_[k][j]));
    }
    return v;
  }

  bool contains(const Vec& v) const {
    for (const auto& x : reduce(v)) {
      if (!f_.is_zero(x)) return false;
    }
    return true;
  }

  /// Coefficients of v in the stored basis, or nullopt if v is outside.
  std::optional<Vec> coordinates(const Vec& v) const {
    if (!contains(v)) return std::nullopt;
    Vec c(rows_.size());
    for (std::size_t k = 0; k < rows_.size(); ++k) c[k] = v[pivots_[k]];
    return c;
  }

  Vec combine(const Vec& coeffs) const {
    if (coeffs.size() != rows_.size()) throw DimensionMismatch("coefficient count differs from dimension");
    Vec v(n_, f_.zero());
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      if (f_.is_zero(coeffs[k])) continue;
      for (std::size_t j = 0; j < n_; ++j) v[j] = f_.add(v[j], f_.mul(coeffs[k], rows_[k][j]));
    }
    return v;
  }

  Vec random_element(std::mt19937_64& rng) const {
    Vec c(rows_.size());
    for (auto& x : c) x = f_.random(rng);
    return combine(c);
  }

  friend SubspaceBasis operator+(const SubspaceBasis& a, const SubspaceBasis& b) {
    if (a.n_ != b.n_) throw DimensionMismatch("subspaces of different ambient spaces");
    FieldRows<F> all = a.rows_;
    all.insert(all.end(), b.rows_.begin(), b.rows_.end());
    return span(a.f_, a.n_, all);
  }

  friend bool operator==(const SubspaceBasis& a, const SubspaceBasis& b) {
    if (a.n_ != b.n_ || a.pivots_ != b.pivots_) return false;
    for (std::size_t k = 0; k < a.rows_.size(); ++k) {
      for (std::size_t j = 0; j < a.n_; ++j) {
        if (!a.f_.equal(a.rows_[k][j], b.rows_[k][j])) return false;
      }
    }
    return true;
  }

 private:
  void check(const Vec& v) const {
    if (v.size() != n_) throw DimensionMismatch("vector of length " + std::to_string(v.size()) + " in F^" + std::to_string(n_));
  }

  F f_;
  std::size_t n_;
  FieldRows<F> rows_;
  std::vector<std::size_t> pivots_;
};

/// Null space of the matrix with the given rows, as a subspace of F^cols.
template <ExactField F>
SubspaceBasis<F> kernel(const F& f, const FieldRows<F>& rows, std::size_t cols) {
  auto e = rref(f, rows, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  FieldRows<F> gens;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    FieldVector<F> v(cols, f.zero());
    v[free] = f.one();
    for (std::size_t k = 0; k < e.rows.size(); ++k) v[e.pivots[k]] = f.neg(e.rows[k][free]);
    gens.push_back(std::move(v));
  }
  return SubspaceBasis<F>::span(f, cols, gens);
}

/// Some x with A x = b, or nullopt when inconsistent. A has `cols` columns.
template <ExactField F>
std::optional<FieldVector<F>> solve(const F& f, const FieldRows<F>& a, const FieldVector<F>& b, std::size_t cols) {
  if (a.size() != b.size()) throw DimensionMismatch("right-hand side length differs from row count");
  FieldRows<F> aug = a;
  for (std::size_t i = 0; i < aug.size(); ++i) {
    if (aug[i].size() != cols) throw DimensionMismatch("ragged matrix");
    aug[i].push_back(b[i]);
  }
  auto e = rref(f, std::move(aug), cols + 1);
  FieldVector<F> x(cols, f.zero());
  for (std::size_t k = 0; k < e.rows.size(); ++k) {
    if (e.pivots[k] == cols) return std::nullopt;
    x[e.pivots[k]] = e.rows[k][cols];
  }
  return x;
}

/// Inverse of a square matrix, or nullopt when singular.
template <ExactField F>
std::optional<FieldRows<F>> inverse(const F& f, const FieldRows<F>& a) {
  const std::size_t n = a.size();
  FieldRows<F> aug(n, FieldVector<F>(2 * n, f.zero()));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw DimensionMismatch("inverse of a non-square matrix");
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n + i] = f.one();
  }
  auto e = rref(f, std::move(aug), 2 * n);
  if (e.rows.size() < n || e.pivots[n - 1] != n - 1) return std::nullopt;
  FieldRows<F> inv(n, FieldVector<F>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = e.rows[i][n + j];
  }
  return inv;
}

}  // namespace tropkm
