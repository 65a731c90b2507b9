#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tropkm/errors.hpp"
#include "tropkm/matrix.hpp"
#include "tropkm/precision.hpp"

namespace tropkm {

/// M = U * diag(t^exponents) * V with U, V invertible over O.
template <ExactField F>
struct SnfResult {
  SeriesMatrix<F> U;
  std::vector<std::int64_t> exponents;  // ascending
  SeriesMatrix<F> V;
  SeriesMatrix<F> V_inverse;
  SeriesMatrix<F> U_inverse;
};

namespace detail {

struct Pivot {
  std::size_t row;
  std::size_t col;
};

// Minimum-valuation entry of a(r0.., c0..), first in row-major order among ties.
// A zero whose valuation is unknown blocks the choice unless every candidate
// it could undercut is strictly smaller than its horizon.
template <ExactField F>
Pivot pick_min_valuation(const SeriesMatrix<F>& a, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
  std::int64_t best = kInfinity;
  std::int64_t unknown = kInfinity;
  Pivot pos{r0, c0};
  bool found = false;
  for (std::size_t i = r0; i < r1; ++i) {
    for (std::size_t j = c0; j < c1; ++j) {
      const auto& e = a(i, j);
      if (!e.is_zero()) {
        if (e.lead() < best) {
          best = e.lead();
          pos = {i, j};
          found = true;
        }
      } else if (!e.exact()) {
        unknown = std::min(unknown, e.horizon());
      }
    }
  }
  if (!found) {
    if (unknown != kInfinity) throw IndeterminateValuation("every remaining entry vanishes below its horizon");
    throw SingularMatrix("matrix is singular");
  }
  if (unknown <= best) {
    throw IndeterminateValuation("pivot valuation " + std::to_string(best) + " not separated from an unknown entry");
  }
  return pos;
}

template <ExactField F>
void clear_entry(Series<F>& s) {
  s = Series<F>(s.context());
}

template <ExactField F>
bool is_exact_zero(const Series<F>& s) {
  return s.is_zero() && s.exact();
}

template <ExactField F>
bool is_exact_one(const Series<F>& s) {
  return s.exact() && s.lead() == 0 && s.coeffs().size() == 1 && s.field().equal(s.coeffs()[0], s.field().one());
}

// x <- u*x - q*y, skipping work for trivial factors.
template <ExactField F>
void eliminate(Series<F>& x, const Series<F>& u, const Series<F>& q, const Series<F>& y) {
  Series<F> scaled = is_exact_one(u) ? x : (is_exact_zero(x) ? x : u * x);
  if (is_exact_zero(y) || is_exact_zero(q)) {
    x = std::move(scaled);
  } else {
    x = scaled - q * y;
  }
}

enum class Track { kNone, kInverses, kFull };

// Fraction-free Smith reduction: a pivot t^v u clears its row and column with
// the operations R <- u R - q R_k, C <- u C - q C_k, so exact inputs stay exact.
// Afterwards U_inverse * m * V_inverse = diag(t^{a_k} u_k).
template <ExactField F>
SnfResult<F> snf_once(const SeriesMatrix<F>& m, Track track) {
  using S = Series<F>;
  const auto& ctx = m.context();
  const std::size_t n = m.rows();
  const bool tr = track != Track::kNone;
  SeriesMatrix<F> a = m;
  SeriesMatrix<F> empty(ctx, 0, 0);
  SnfResult<F> out{empty, {}, empty, tr ? SeriesMatrix<F>::identity(ctx, n) : empty,
                   tr ? SeriesMatrix<F>::identity(ctx, n) : empty};
  auto& Ui = out.U_inverse;
  auto& Vi = out.V_inverse;
  std::vector<S> units;
  for (std::size_t k = 0; k < n; ++k) {
    const Pivot p = pick_min_valuation(a, k, n, k, n);
    a.swap_rows(k, p.row);
    a.swap_cols(k, p.col);
    if (tr) {
      Ui.swap_rows(k, p.row);
      Vi.swap_cols(k, p.col);
    }
    const S pivot = a(k, k);
    const std::int64_t e = pivot.lead();
    const S u = pivot.shifted(-e);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (is_exact_zero(a(i, k))) continue;
      const S q = a(i, k).shifted(-e);
      for (std::size_t j = k + 1; j < n; ++j) eliminate(a(i, j), u, q, a(k, j));
      clear_entry(a(i, k));
      if (tr) {
        for (std::size_t c = 0; c < n; ++c) eliminate(Ui(i, c), u, q, Ui(k, c));
      }
    }
    for (std::size_t j = k + 1; j < n; ++j) {
      if (is_exact_zero(a(k, j))) continue;
      const S q = a(k, j).shifted(-e);
      for (std::size_t i = k + 1; i < n; ++i) {
        if (!is_exact_one(u) && !is_exact_zero(a(i, j))) a(i, j) = u * a(i, j);
      }
      clear_entry(a(k, j));
      if (tr) {
        for (std::size_t r = 0; r < n; ++r) eliminate(Vi(r, j), u, q, Vi(r, k));
      }
    }
    units.push_back(u);
    out.exponents.push_back(e);
  }
  if (track == Track::kFull) {
    out.U = inverse_in_K(Ui);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t r = 0; r < n; ++r) out.U(r, k) = out.U(r, k) * units[k];
    }
    out.V = inverse_in_K(Vi);
  }
  return out;
}

template <ExactField F, class Fn>
auto escalate_if_exact(const SeriesMatrix<F>& m, Fn&& fn) {
  if (!m.exact()) return fn(m);
  return with_escalation(m.context().precision, [&](std::int64_t p) {
    return fn(m.rebased(m.context().with_precision(p)));
  });
}

}  // namespace detail

/// Smith normal form over O with min-valuation pivoting.
template <ExactField F>
SnfResult<F> snf_over_O(const SeriesMatrix<F>& m) {
  if (!m.square()) throw DimensionMismatch("Smith form of a non-square matrix");
  return detail::escalate_if_exact(m, [](const SeriesMatrix<F>& x) { return detail::snf_once(x, detail::Track::kFull); });
}

/// Invariant-factor exponents only.
template <ExactField F>
std::vector<std::int64_t> snf_exponents(const SeriesMatrix<F>& m) {
  if (!m.square()) throw DimensionMismatch("Smith form of a non-square matrix");
  return detail::escalate_if_exact(m, [](const SeriesMatrix<F>& x) { return detail::snf_once(x, detail::Track::kNone).exponents; });
}

/// Valuation of the determinant; kInfinity when singular.
template <ExactField F>
std::int64_t det_valuation(const SeriesMatrix<F>& m) {
  try {
    auto e = snf_exponents(m);
    return std::accumulate(e.begin(), e.end(), std::int64_t{0});
  } catch (const SingularMatrix&) {
    return kInfinity;
  }
}

namespace detail {

// Gaussian elimination on [m | rhs] choosing the min-valuation known entry of
// each column; back-substitutes to return m^{-1} rhs.
template <ExactField F>
SeriesMatrix<F> solve_once(SeriesMatrix<F> m, SeriesMatrix<F> rhs) {
  using S = Series<F>;
  const std::size_t n = m.rows();
  const std::size_t k_rhs = rhs.cols();
  for (std::size_t k = 0; k < n; ++k) {
    std::optional<std::size_t> best;
    bool unknown = false;
    for (std::size_t i = k; i < n; ++i) {
      const S& e = m(i, k);
      if (!e.is_zero()) {
        if (!best || e.lead() < m(*best, k).lead()) best = i;
      } else if (!e.exact()) {
        unknown = true;
      }
    }
    if (!best) {
      if (unknown) throw IndeterminateValuation("pivot column vanishes below its horizon");
      throw SingularMatrix("matrix is singular");
    }
    m.swap_rows(k, *best);
    rhs.swap_rows(k, *best);
    const std::int64_t e = m(k, k).lead();
    const S u = m(k, k).shifted(-e);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (is_exact_zero(m(i, k))) continue;
      const S q = m(i, k).shifted(-e);
      for (std::size_t j = k + 1; j < n; ++j) eliminate(m(i, j), u, q, m(k, j));
      for (std::size_t j = 0; j < k_rhs; ++j) eliminate(rhs(i, j), u, q, rhs(k, j));
      clear_entry(m(i, k));
    }
  }
  SeriesMatrix<F> x(m.context(), n, k_rhs);
  for (std::size_t kk = n; kk-- > 0;) {
    const S inv = m(kk, kk).inverse();
    for (std::size_t j = 0; j < k_rhs; ++j) {
      S acc = rhs(kk, j);
      for (std::size_t c = kk + 1; c < n; ++c) {
        if (!(m(kk, c).is_zero() && m(kk, c).exact())) acc -= m(kk, c) * x(c, j);
      }
      x(kk, j) = acc * inv;
    }
  }
  return x;
}

}  // namespace detail

/// m^{-1} rhs over K.
template <ExactField F>
SeriesMatrix<F> solve_in_K(const SeriesMatrix<F>& m, const SeriesMatrix<F>& rhs) {
  if (!m.square()) throw DimensionMismatch("solve with a non-square matrix");
  if (rhs.rows() != m.rows()) throw DimensionMismatch("right-hand side has the wrong number of rows");
  if (m.exact() && rhs.exact()) {
    return with_escalation(m.context().precision, [&](std::int64_t p) {
      auto ctx = m.context().with_precision(p);
      return detail::solve_once(m.rebased(ctx), rhs.rebased(ctx));
    });
  }
  return detail::solve_once(m, rhs);
}

template <ExactField F>
SeriesVector<F> solve_in_K(const SeriesMatrix<F>& m, const SeriesVector<F>& w) {
  SeriesMatrix<F> rhs = SeriesMatrix<F>::from_columns(m.context(), w.size(), {w});
  return solve_in_K(m, rhs).column(0);
}

template <ExactField F>
SeriesMatrix<F> inverse_in_K(const SeriesMatrix<F>& m) {
  return solve_in_K(m, SeriesMatrix<F>::identity(m.context(), m.rows()));
}

}  // namespace tropkm
