#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tropkm/errors.hpp"
#include "tropkm/fraction.hpp"
#include "tropkm/linalg.hpp"
#include "tropkm/matrix.hpp"
#include "tropkm/precision.hpp"
#include "tropkm/residue.hpp"

namespace tropkm {

namespace detail {

// Column Hermite form over O of an n x m generating matrix: upper triangular,
// diagonal t^{d_i}, entries above the diagonal carrying only exponents < d_i.
template <ExactField F>
SeriesMatrix<F> hermite_once(const SeriesMatrix<F>& g, std::vector<std::int64_t>& pivots) {
  using S = Series<F>;
  const auto& ctx = g.context();
  const std::size_t n = g.rows();
  const std::size_t m = g.cols();
  SeriesMatrix<F> w = g;
  std::vector<bool> active(m, true);
  SeriesMatrix<F> h(ctx, n, n);
  pivots.assign(n, 0);
  std::vector<S> units(n, S(ctx));
  for (std::size_t i = n; i-- > 0;) {
    std::int64_t best = kInfinity;
    std::int64_t unknown = kInfinity;
    std::size_t p = m;
    for (std::size_t j = 0; j < m; ++j) {
      if (!active[j]) continue;
      const S& e = w(i, j);
      if (!e.is_zero()) {
        if (e.lead() < best) {
          best = e.lead();
          p = j;
        }
      } else if (!e.exact()) {
        unknown = std::min(unknown, e.horizon());
      }
    }
    if (p == m) {
      if (unknown != kInfinity) throw IndeterminateValuation("row vanishes below its horizon");
      throw SingularMatrix("generators do not span K^" + std::to_string(n));
    }
    if (unknown <= best) throw IndeterminateValuation("pivot not separated from an unknown entry");
    const std::int64_t d = best;
    const S u = w(i, p).shifted(-d);
    for (std::size_t j = 0; j < m; ++j) {
      if (!active[j] || j == p || is_exact_zero(w(i, j))) continue;
      const S q = w(i, j).shifted(-d);
      for (std::size_t r = 0; r < i; ++r) eliminate(w(r, j), u, q, w(r, p));
      clear_entry(w(i, j));
    }
    for (std::size_t r = 0; r <= i; ++r) h(r, i) = w(r, p);
    units[i] = u;
    pivots[i] = d;
    active[p] = false;
  }
  // Pivots become t^{d_i}; only now do truncated inverses enter.
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_exact_one(units[i])) {
      const S uinv = units[i].inverse();
      for (std::size_t r = 0; r < i; ++r) {
        if (!is_exact_zero(h(r, i))) h(r, i) = h(r, i) * uinv;
      }
    }
    h(i, i) = S::t_power(ctx, pivots[i]);
  }
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = j; i-- > 0;) {
      const S x = h(i, j);
      if (is_exact_zero(x)) continue;
      const S q = x.terms_from(pivots[i]).shifted(-pivots[i]);
      if (!is_exact_zero(q)) {
        for (std::size_t r = 0; r < i; ++r) {
          if (!is_exact_zero(h(r, i))) h(r, j) -= q * h(r, i);
        }
      }
      h(i, j) = x.truncated_below(pivots[i]);
    }
  }
  return h;
}

}  // namespace detail

/// Full-rank O-submodule of K^n, held in canonical column Hermite form so that
/// equality of lattices is equality of bases.
template <ExactField F>
class Lattice {
 public:
  using S = Series<F>;

  /// Lattice generated by the columns of an n x m matrix (m >= n).
  explicit Lattice(const SeriesMatrix<F>& generators) : basis_(generators.context(), 0, 0), inverse_(basis_) {
    if (generators.cols() < generators.rows()) {
      throw SingularMatrix("fewer generators than the dimension");
    }
    if (generators.rows() == 0) throw DimensionMismatch("lattice of dimension 0");
    auto run = [&](const SeriesMatrix<F>& g) {
      std::vector<std::int64_t> piv;
      auto h = detail::hermite_once(g, piv);
      return std::make_pair(std::move(h), std::move(piv));
    };
    std::pair<SeriesMatrix<F>, std::vector<std::int64_t>> result =
        generators.exact() ? with_escalation(generators.context().precision,
                                             [&](std::int64_t p) {
                                               return run(generators.rebased(generators.context().with_precision(p)));
                                             })
                           : run(generators);
    basis_ = result.first.rebased(generators.context());
    pivots_ = std::move(result.second);
    det_val_ = std::accumulate(pivots_.begin(), pivots_.end(), std::int64_t{0});
    inverse_ = inverse_in_K(basis_);
    std::int64_t mv = inverse_.min_valuation();
    containment_ = -mv;
  }

  static Lattice standard(const Context<F>& ctx, std::size_t n) { return Lattice(SeriesMatrix<F>::identity(ctx, n)); }

  /// Lattice with basis diag(t^e_1, ..., t^e_n).
  static Lattice diagonal(const Context<F>& ctx, const std::vector<std::int64_t>& exponents) {
    return Lattice(SeriesMatrix<F>::diagonal(ctx, exponents));
  }

  std::size_t n() const noexcept { return basis_.rows(); }
  const Context<F>& context() const noexcept { return basis_.context(); }
  const F& field() const noexcept { return basis_.field(); }
  /// Canonical basis; columns generate the lattice.
  const SeriesMatrix<F>& basis() const noexcept { return basis_; }
  /// Exact inverse of the canonical basis.
  const SeriesMatrix<F>& inverse_basis() const noexcept { return inverse_; }
  /// Diagonal exponents d_i of the canonical basis.
  const std::vector<std::int64_t>& pivot_exponents() const noexcept { return pivots_; }
  std::int64_t det_val() const noexcept { return det_val_; }
  /// Least k with t^k O^n contained in the lattice.
  std::int64_t containment_exponent() const noexcept { return containment_; }

  /// Coordinates of w in the canonical basis.
  SeriesVector<F> coordinates(const SeriesVector<F>& w) const {
    if (w.size() != n()) throw DimensionMismatch("vector length differs from lattice dimension");
    return inverse_ * w;
  }

  friend bool operator==(const Lattice& a, const Lattice& b) { return a.basis_.same_terms(b.basis_); }

  std::string to_string() const { return basis_.to_string(); }

 private:
  SeriesMatrix<F> basis_;
  SeriesMatrix<F> inverse_;
  std::vector<std::int64_t> pivots_;
  std::int64_t det_val_ = 0;
  std::int64_t containment_ = 0;
};

template <ExactField F>
Lattice<F> lattice_from_basis(const SeriesMatrix<F>& m) {
  if (!m.square()) throw DimensionMismatch("basis must be square");
  return Lattice<F>(m);
}

template <ExactField F>
void require_same_dimension(const Lattice<F>& a, const Lattice<F>& b) {
  if (a.n() != b.n()) {
    throw DimensionMismatch("lattices of dimension " + std::to_string(a.n()) + " and " + std::to_string(b.n()));
  }
  if (!(a.field() == b.field())) throw DomainError("lattices over different fields");
}

template <ExactField F>
bool member(const SeriesVector<F>& w, const Lattice<F>& l) {
  for (const auto& x : l.coordinates(w)) {
    if (x.valuation() < 0) return false;
  }
  return true;
}

/// Least c with t^c w in L.
template <ExactField F>
std::int64_t c_vector(const SeriesVector<F>& w, const Lattice<F>& l) {
  const std::int64_t v = min_valuation(l.coordinates(w));
  if (v == kInfinity) throw DomainError("scaling exponent of the zero vector");
  return -v;
}

/// Basis of M^{-1} times basis of L: the relative position of L against M.
template <ExactField F>
SeriesMatrix<F> relative_matrix(const Lattice<F>& l, const Lattice<F>& m) {
  require_same_dimension(l, m);
  return m.inverse_basis() * l.basis();
}

/// Minimum of c(w, M) over generators w of L.
template <ExactField F>
std::int64_t c_lattice(const Lattice<F>& l, const Lattice<F>& m) {
  auto e = snf_exponents(relative_matrix(l, m));
  return -e.back();
}

/// Everything needed about tight generators of L with respect to M.
template <ExactField F>
struct TightAnalysis {
  std::int64_t c = 0;
  std::vector<std::int64_t> exponents;
  SubspaceBasis<F> subspace;   // residues in L/tL, coordinates in the canonical basis of L
  FieldRows<F> v_residue;      // V mod t
  SeriesMatrix<F> v_inverse;
};

namespace detail {

template <ExactField F>
TightAnalysis<F> tight_analysis_once(const SeriesMatrix<F>& rel) {
  auto snf = snf_once(rel, Track::kInverses);
  const auto& f = rel.field();
  const std::size_t n = rel.rows();
  const std::int64_t top = snf.exponents.back();
  auto vbar_opt = inverse(f, snf.V_inverse.residue());
  if (!vbar_opt) throw VerificationFailed("column transform is not invertible over O");
  FieldRows<F> vbar = std::move(*vbar_opt);
  FieldRows<F> constraints;
  for (std::size_t j = 0; j < n; ++j) {
    if (snf.exponents[j] < top) constraints.push_back(vbar[j]);
  }
  return TightAnalysis<F>{-top, snf.exponents, kernel(f, constraints, n), std::move(vbar), std::move(snf.V_inverse)};
}

}  // namespace detail

template <ExactField F>
TightAnalysis<F> tight_analysis(const Lattice<F>& l, const Lattice<F>& m) {
  const auto rel = relative_matrix(l, m);
  return with_escalation(rel.context().precision, [&](std::int64_t p) {
    return detail::tight_analysis_once(rel.rebased(rel.context().with_precision(p)));
  });
}

/// Residues in L/tL of the generators w of L with c(w, M) = c(L, M), plus zero.
template <ExactField F>
SubspaceBasis<F> tight_subspace(const Lattice<F>& l, const Lattice<F>& m) {
  return tight_analysis(l, m).subspace;
}

/// An exact polynomial generator w of L with residue `xbar` and c(w, M) = c(L, M).
template <ExactField F>
SeriesVector<F> tight_lift(const FieldVector<F>& xbar, const Lattice<F>& l, const Lattice<F>& m) {
  using S = Series<F>;
  const auto rel = relative_matrix(l, m);
  const std::size_t n = l.n();
  const auto& f = l.field();
  bool nonzero = std::any_of(xbar.begin(), xbar.end(), [&](const auto& x) { return !f.is_zero(x); });
  auto w = with_escalation(rel.context().precision, [&](std::int64_t p) {
    const auto ctx = rel.context().with_precision(p);
    auto ta = detail::tight_analysis_once(rel.rebased(ctx));
    if (!nonzero || !ta.subspace.contains(xbar)) {
      throw NotInTightSubspace("residue vector is not the image of a tight generator");
    }
    const std::int64_t top = -ta.c;
    SeriesVector<F> y(n, S(ctx));
    for (std::size_t j = 0; j < n; ++j) {
      if (ta.exponents[j] < top) continue;
      auto acc = f.zero();
      for (std::size_t k = 0; k < n; ++k) acc = f.add(acc, f.mul(ta.v_residue[j][k], xbar[k]));
      y[j] = S::constant(ctx, acc);
    }
    SeriesVector<F> full = l.basis().rebased(ctx) * (ta.v_inverse * y);
    const std::int64_t cut = std::max(l.containment_exponent() + 1, m.containment_exponent() - ta.c + 1);
    SeriesVector<F> out;
    out.reserve(n);
    for (const auto& x : full) out.push_back(x.truncated_below(cut).rebased(l.context()));
    return std::make_pair(std::move(out), ta.c);
  });
  if (c_vector(w.first, m) != w.second) throw VerificationFailed("tight lift misses the scaling exponent");
  const auto coords = l.coordinates(w.first);
  for (std::size_t k = 0; k < n; ++k) {
    if (coords[k].valuation() < 0 || !f.equal(coords[k].coefficient(0), xbar[k])) {
      throw VerificationFailed("tight lift has the wrong residue");
    }
  }
  return w.first;
}

template <ExactField F>
Lattice<F> lattice_sum(const Lattice<F>& a, const Lattice<F>& b) {
  require_same_dimension(a, b);
  return Lattice<F>(a.basis().hstack(b.basis()));
}

/// Lattice generated by all the given lattices.
template <ExactField F>
Lattice<F> lattice_sum(const std::vector<Lattice<F>>& ls) {
  if (ls.empty()) throw DomainError("sum of no lattices");
  SeriesMatrix<F> g = ls.front().basis();
  for (std::size_t k = 1; k < ls.size(); ++k) {
    require_same_dimension(ls.front(), ls[k]);
    g = g.hstack(ls[k].basis());
  }
  return Lattice<F>(g);
}

/// t^k L.
template <ExactField F>
Lattice<F> scale(const Lattice<F>& l, std::int64_t k) {
  return Lattice<F>(l.basis().shifted(k));
}

/// {x : <x, L> in O}, with basis the inverse transpose.
template <ExactField F>
Lattice<F> dual(const Lattice<F>& l) {
  return Lattice<F>(l.inverse_basis().transpose());
}

/// Integer n-tuple, weakly decreasing when dominant.
struct Coweight {
  enum class Flavor { kGL, kSL, kPGL };

  std::vector<std::int64_t> entries;
  Flavor flavor = Flavor::kGL;

  std::size_t n() const noexcept { return entries.size(); }
  std::int64_t sum() const { return std::accumulate(entries.begin(), entries.end(), std::int64_t{0}); }
  bool dominant() const { return std::is_sorted(entries.begin(), entries.end(), std::greater<>()); }

  /// Pairing with the i-th fundamental weight, trace removed.
  Rational omega(std::size_t i) const {
    if (i == 0 || i >= n()) {
      if (i == 0 || i == n()) return Rational(0);
      throw DomainError("fundamental weight index out of range");
    }
    std::int64_t prefix = 0;
    for (std::size_t j = 0; j < i; ++j) prefix += entries[j];
    return Rational(prefix) - Rational(static_cast<std::int64_t>(i) * sum(), static_cast<std::int64_t>(n()));
  }

  Coweight operator+(const Coweight& o) const {
    if (o.n() != n()) throw DimensionMismatch("coweights of different rank");
    Coweight r = *this;
    for (std::size_t j = 0; j < n(); ++j) r.entries[j] += o.entries[j];
    return r;
  }

  /// Equality with PGL coweights compared modulo (1, ..., 1).
  friend bool operator==(const Coweight& a, const Coweight& b) {
    if (a.n() != b.n()) return false;
    if (a.flavor == Flavor::kPGL || b.flavor == Flavor::kPGL) {
      if (a.n() == 0) return true;
      const std::int64_t shift = a.entries[0] - b.entries[0];
      for (std::size_t j = 0; j < a.n(); ++j) {
        if (a.entries[j] - b.entries[j] != shift) return false;
      }
      return true;
    }
    return a.entries == b.entries;
  }

  std::string to_string() const {
    std::string out = "(";
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (j != 0) out += ", ";
      out += std::to_string(entries[j]);
    }
    return out + ")";
  }
};

/// mu -> -w0 mu: negate and reverse.
inline Coweight coweight_involution(const Coweight& mu) {
  Coweight r = mu;
  std::reverse(r.entries.begin(), r.entries.end());
  for (auto& x : r.entries) x = -x;
  return r;
}

/// mu <= nu: nu - mu is a nonnegative rational combination of positive coroots,
/// after removing traces.
inline bool dominated_by(const Coweight& mu, const Coweight& nu) {
  if (mu.n() != nu.n()) throw DimensionMismatch("coweights of different rank");
  for (std::size_t i = 1; i < mu.n(); ++i) {
    if (nu.omega(i) < mu.omega(i)) return false;
  }
  return true;
}

/// Vector distance from L to M: the negated Smith exponents of
/// basis(L)^{-1} basis(M), sorted decreasingly.
template <ExactField F>
Coweight distance(const Lattice<F>& l, const Lattice<F>& m) {
  auto e = snf_exponents(relative_matrix(m, l));
  Coweight mu;
  for (auto a : e) mu.entries.push_back(-a);
  std::sort(mu.entries.begin(), mu.entries.end(), std::greater<>());
  return mu;
}

/// omega_i paired with distance(L, M); lies in (1/n)Z.
template <ExactField F>
Rational d_i(const Lattice<F>& l, const Lattice<F>& m, std::size_t i) {
  if (i > l.n()) throw DomainError("index " + std::to_string(i) + " exceeds dimension");
  if (i == 0 || i == l.n()) return Rational(0);
  return distance(l, m).omega(i);
}

}  // namespace tropkm
