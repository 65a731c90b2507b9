#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tropkm/errors.hpp"
#include "tropkm/residue.hpp"
#include "tropkm/series.hpp"

namespace tropkm {

template <ExactField F>
using SeriesVector = std::vector<Series<F>>;

/// Dense row-major matrix of series over one field.
template <ExactField F>
class SeriesMatrix {
 public:
  using S = Series<F>;
  using Ctx = Context<F>;

  SeriesMatrix(const Ctx& ctx, std::size_t rows, std::size_t cols)
      : ctx_(ctx), rows_(rows), cols_(cols), data_(rows * cols, S(ctx)) {}

  static SeriesMatrix identity(const Ctx& ctx, std::size_t n) {
    SeriesMatrix m(ctx, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S::one(ctx);
    return m;
  }

  /// diag(t^e_1, ..., t^e_n).
  static SeriesMatrix diagonal(const Ctx& ctx, const std::vector<std::int64_t>& exponents) {
    SeriesMatrix m(ctx, exponents.size(), exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i) m(i, i) = S::t_power(ctx, exponents[i]);
    return m;
  }

  static SeriesMatrix from_columns(const Ctx& ctx, std::size_t rows, const std::vector<SeriesVector<F>>& columns) {
    SeriesMatrix m(ctx, rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) m.set_column(j, columns[j]);
    return m;
  }

  /// Constant matrix from field rows.
  static SeriesMatrix constant(const Ctx& ctx, const FieldRows<F>& rows, std::size_t cols) {
    SeriesMatrix m(ctx, rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = S::constant(ctx, rows[i][j]);
    }
    return m;
  }

  const Ctx& context() const noexcept { return ctx_; }
  const F& field() const noexcept { return ctx_.field; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  SeriesVector<F> column(std::size_t j) const {
    SeriesVector<F> c;
    c.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c.push_back((*this)(i, j));
    return c;
  }

  void set_column(std::size_t j, const SeriesVector<F>& c) {
    if (c.size() != rows_) throw DimensionMismatch("column length " + std::to_string(c.size()) + " != " + std::to_string(rows_));
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }

  SeriesMatrix transpose() const {
    SeriesMatrix t(ctx_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
  }

  /// Every entry multiplied by t^k.
  SeriesMatrix shifted(std::int64_t k) const {
    SeriesMatrix r = *this;
    for (auto& x : r.data_) x = x.shifted(k);
    return r;
  }

  SeriesMatrix rebased(const Ctx& ctx) const {
    SeriesMatrix r(ctx, rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k].rebased(ctx);
    return r;
  }

  /// [this | other].
  SeriesMatrix hstack(const SeriesMatrix& other) const {
    if (rows_ != other.rows_) throw DimensionMismatch("hstack of matrices with different row counts");
    SeriesMatrix r(ctx_, rows_, cols_ + other.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
      for (std::size_t j = 0; j < other.cols_; ++j) r(i, cols_ + j) = other(i, j);
    }
    return r;
  }

  bool exact() const {
    return std::all_of(data_.begin(), data_.end(), [](const S& s) { return s.exact(); });
  }

  /// Minimum valuation over all entries (kInfinity for the zero matrix).
  std::int64_t min_valuation() const {
    std::int64_t v = kInfinity;
    for (const auto& x : data_) v = std::min(v, x.valuation());
    return v;
  }

  /// Coefficients of t^0; every entry must have nonnegative valuation.
  FieldRows<F> residue() const {
    FieldRows<F> r(rows_, FieldVector<F>(cols_));
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        const S& x = (*this)(i, j);
        if (!x.is_zero() && x.lead() < 0) throw DomainError("residue of a matrix with a pole");
        r[i][j] = x.coefficient(0);
      }
    }
    return r;
  }

  friend SeriesMatrix operator*(const SeriesMatrix& a, const SeriesMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw DimensionMismatch("product of " + std::to_string(a.rows_) + "x" + std::to_string(a.cols_) + " and " +
                              std::to_string(b.rows_) + "x" + std::to_string(b.cols_));
    }
    SeriesMatrix r(a.ctx_, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t j = 0; j < b.cols_; ++j) {
        S acc(a.ctx_);
        for (std::size_t k = 0; k < a.cols_; ++k) {
          const S& x = a(i, k);
          const S& y = b(k, j);
          if ((x.is_zero() && x.exact()) || (y.is_zero() && y.exact())) continue;
          acc += x * y;
        }
        r(i, j) = std::move(acc);
      }
    }
    return r;
  }

  friend SeriesVector<F> operator*(const SeriesMatrix& a, const SeriesVector<F>& v) {
    if (a.cols_ != v.size()) throw DimensionMismatch("matrix-vector size mismatch");
    SeriesVector<F> r(a.rows_, S(a.ctx_));
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero() && a(i, k).exact()) continue;
        r[i] += a(i, k) * v[k];
      }
    }
    return r;
  }

  friend SeriesMatrix operator+(const SeriesMatrix& a, const SeriesMatrix& b) { return combine(a, b, false); }
  friend SeriesMatrix operator-(const SeriesMatrix& a, const SeriesMatrix& b) { return combine(a, b, true); }

  /// Entrywise identical terms (horizons ignored).
  bool same_terms(const SeriesMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) return false;
    for (std::size_t k = 0; k < data_.size(); ++k) {
      if (!data_[k].same_terms(other.data_[k])) return false;
    }
    return true;
  }

  /// Entrywise agreement below each pair's common horizon.
  bool agrees(const SeriesMatrix& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) return false;
    for (std::size_t k = 0; k < data_.size(); ++k) {
      const std::int64_t h = std::min(data_[k].effective_horizon(), other.data_[k].effective_horizon());
      const std::int64_t bound = h == kInfinity ? std::max(data_[k].end(), other.data_[k].end()) : h;
      if (!data_[k].agrees_below(other.data_[k], bound)) return false;
    }
    return true;
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < rows_; ++i) {
      out += "[";
      for (std::size_t j = 0; j < cols_; ++j) {
        if (j != 0) out += ", ";
        out += (*this)(i, j).to_string();
      }
      out += "]\n";
    }
    return out;
  }

 private:
  static SeriesMatrix combine(const SeriesMatrix& a, const SeriesMatrix& b, bool subtract) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("sum of matrices of different shapes");
    SeriesMatrix r(a.ctx_, a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = subtract ? a.data_[k] - b.data_[k] : a.data_[k] + b.data_[k];
    return r;
  }

  Ctx ctx_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<S> data_;
};

/// Minimum valuation over the entries of a vector.
template <ExactField F>
std::int64_t min_valuation(const SeriesVector<F>& v) {
  std::int64_t m = kInfinity;
  for (const auto& x : v) m = std::min(m, x.valuation());
  return m;
}

template <ExactField F>
SeriesVector<F> shifted(const SeriesVector<F>& v, std::int64_t k) {
  SeriesVector<F> r;
  r.reserve(v.size());
  for (const auto& x : v) r.push_back(x.shifted(k));
  return r;
}

}  // namespace tropkm
