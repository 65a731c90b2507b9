#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tropkm/ball.hpp"
#include "tropkm/errors.hpp"
#include "tropkm/invariants.hpp"

// The four-flag web function F. From flags T, U, V, W it splits U_b by the
// comultiplication into degrees (a+b-n, n-a), pairs the second factor with T_a
// and the first with W_d and V_c, and sums the products. Everything here is
// experimental: the tropical statement is a conjecture and reports never gate
// anything else.

namespace tropkm {

/// Sorted 0-based index set.
using Subset = std::vector<std::size_t>;

namespace detail {

// Sign of the permutation sorting the concatenation of two disjoint sorted sets.
inline int merge_sign(const Subset& s, const Subset& t) {
  std::size_t inversions = 0;
  for (auto x : s) {
    for (auto y : t) inversions += x > y;
  }
  return inversions % 2 ? -1 : 1;
}

inline std::optional<Subset> disjoint_union(const Subset& s, const Subset& t) {
  Subset out;
  std::set_union(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(out));
  if (out.size() != s.size() + t.size()) return std::nullopt;
  return out;
}

inline Subset complement(const Subset& s, std::size_t n) {
  Subset out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::binary_search(s.begin(), s.end(), i)) out.push_back(i);
  }
  return out;
}

inline std::vector<Subset> subsets_of_size(const Subset& from, std::size_t k) {
  std::vector<Subset> out;
  if (k > from.size()) return out;
  std::vector<bool> pick(from.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    Subset s;
    for (std::size_t i = 0; i < from.size(); ++i) {
      if (pick[i]) s.push_back(from[i]);
    }
    out.push_back(std::move(s));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

inline Subset range_set(std::size_t n) {
  Subset s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i;
  return s;
}

}  // namespace detail

/// An element of the exterior power of degree `degree` of K^n in the basis e_S.
template <ExactField F>
class ExteriorVector {
 public:
  using S = Series<F>;

  ExteriorVector(const Context<F>& ctx, std::size_t n, std::size_t degree) : ctx_(ctx), n_(n), degree_(degree) {
    if (degree > n) throw DomainError("exterior degree " + std::to_string(degree) + " above dimension " + std::to_string(n));
  }

  static ExteriorVector basis(const Context<F>& ctx, std::size_t n, const Subset& s) {
    ExteriorVector v(ctx, n, s.size());
    v.add_term(s, S::one(ctx));
    return v;
  }

  /// v_1 ^ ... ^ v_k; the empty product is 1 in degree 0.
  static ExteriorVector from_vectors(const Context<F>& ctx, std::size_t n, const std::vector<SeriesVector<F>>& vs) {
    ExteriorVector out = basis(ctx, n, {});
    for (const auto& v : vs) {
      if (v.size() != n) throw DimensionMismatch("vector of length " + std::to_string(v.size()) + " in dimension " + std::to_string(n));
      ExteriorVector one(ctx, n, 1);
      for (std::size_t i = 0; i < n; ++i) one.add_term({i}, v[i]);
      out = out.wedge(one);
    }
    return out;
  }

  const Context<F>& context() const noexcept { return ctx_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t degree() const noexcept { return degree_; }
  const std::map<Subset, S>& components() const noexcept { return comps_; }
  bool is_zero() const noexcept { return comps_.empty(); }

  S coefficient(const Subset& s) const {
    auto it = comps_.find(s);
    return it == comps_.end() ? S::zero(ctx_) : it->second;
  }

  void add_term(const Subset& s, const S& c) {
    if (s.size() != degree_) throw DomainError("basis element of the wrong degree");
    if (!std::is_sorted(s.begin(), s.end()) || std::adjacent_find(s.begin(), s.end()) != s.end() ||
        (!s.empty() && s.back() >= n_)) {
      throw DomainError("basis index set is not strictly increasing in [0, n)");
    }
    auto [it, fresh] = comps_.try_emplace(s, c);
    if (!fresh) it->second = it->second + c;
    if (it->second.is_zero() && it->second.exact()) comps_.erase(it);
  }

  ExteriorVector operator+(const ExteriorVector& o) const {
    check_compatible(o);
    ExteriorVector r = *this;
    for (const auto& [s, c] : o.comps_) r.add_term(s, c);
    return r;
  }

  ExteriorVector scaled(const S& c) const {
    ExteriorVector r(ctx_, n_, degree_);
    for (const auto& [s, x] : comps_) r.add_term(s, x * c);
    return r;
  }

  ExteriorVector wedge(const ExteriorVector& o) const {
    if (o.n_ != n_) throw DimensionMismatch("wedge of exterior vectors in different dimensions");
    if (degree_ + o.degree_ > n_) return ExteriorVector(ctx_, n_, std::min(n_, degree_ + o.degree_));
    ExteriorVector r(ctx_, n_, degree_ + o.degree_);
    for (const auto& [s, x] : comps_) {
      for (const auto& [t, y] : o.comps_) {
        auto u = detail::disjoint_union(s, t);
        if (!u) continue;
        auto prod = x * y;
        r.add_term(*u, detail::merge_sign(s, t) < 0 ? -prod : prod);
      }
    }
    return r;
  }

  /// Coefficient of e_1 ^ ... ^ e_n; requires full degree.
  S volume() const {
    if (degree_ != n_) throw DomainError("volume of a non-top exterior vector");
    return coefficient(detail::range_set(n_));
  }

  bool operator==(const ExteriorVector& o) const {
    if (n_ != o.n_ || degree_ != o.degree_ || comps_.size() != o.comps_.size()) return false;
    for (const auto& [s, x] : comps_) {
      auto it = o.comps_.find(s);
      if (it == o.comps_.end() || !(it->second == x)) return false;
    }
    return true;
  }

 private:
  void check_compatible(const ExteriorVector& o) const {
    if (o.n_ != n_ || o.degree_ != degree_) throw DimensionMismatch("exterior vectors of different shape");
  }

  Context<F> ctx_;
  std::size_t n_;
  std::size_t degree_;
  std::map<Subset, S> comps_;
};

template <ExactField F>
using Coproduct = std::map<std::pair<Subset, Subset>, Series<F>>;

/// e_S -> sum over S = S_1 u S_2 with |S_1| = k1 of sign(S_1, S_2) e_{S_1} (x) e_{S_2}, extended linearly.
template <ExactField F>
Coproduct<F> comultiply(const ExteriorVector<F>& u, std::size_t k1, std::size_t k2) {
  if (k1 + k2 != u.degree()) {
    throw DomainError("split (" + std::to_string(k1) + ", " + std::to_string(k2) + ") does not add up to degree " +
                      std::to_string(u.degree()));
  }
  Coproduct<F> out;
  for (const auto& [s, c] : u.components()) {
    for (auto& s1 : detail::subsets_of_size(s, k1)) {
      Subset s2;
      std::set_difference(s.begin(), s.end(), s1.begin(), s1.end(), std::back_inserter(s2));
      const auto term = detail::merge_sign(s1, s2) < 0 ? -c : c;
      auto key = std::make_pair(std::move(s1), std::move(s2));
      auto [it, fresh] = out.try_emplace(key, term);
      if (!fresh) it->second = it->second + term;
      if (it->second.is_zero() && it->second.exact()) out.erase(it);
    }
  }
  return out;
}

struct WebParams {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 0;

  std::string to_string() const {
    return "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + "," + std::to_string(d) + ")";
  }
};

inline void validate(const WebParams& w, std::size_t n) {
  const auto nn = static_cast<std::int64_t>(n);
  for (auto x : {w.a, w.b, w.c, w.d}) {
    if (x < 1 || x >= nn) throw DomainError("web degrees must lie in [1, n) for n = " + std::to_string(n) + ", got " + w.to_string());
  }
  if (w.a + w.b + w.c + w.d != 2 * nn) throw IndexSumMismatch("web degrees " + w.to_string() + " must sum to 2n");
  if (w.a + w.b <= nn) throw DomainError("web degrees " + w.to_string() + " need a + b > n");
}

/// F(T, U, V, W) = sum over phi(U) = sum x (x) y of vol(W ^ x ^ V) vol(T ^ y).
template <ExactField F>
Series<F> web_F(const WebParams& w, const ExteriorVector<F>& t, const ExteriorVector<F>& u, const ExteriorVector<F>& v,
                const ExteriorVector<F>& wd) {
  const std::size_t n = t.n();
  for (const auto* x : {&u, &v, &wd}) {
    if (x->n() != n) throw DimensionMismatch("web arguments in different dimensions");
  }
  validate(w, n);
  const auto deg = [](std::int64_t k) { return static_cast<std::size_t>(k); };
  if (t.degree() != deg(w.a) || u.degree() != deg(w.b) || v.degree() != deg(w.c) || wd.degree() != deg(w.d)) {
    throw DomainError("web argument degrees do not match " + w.to_string());
  }
  const auto& ctx = t.context();
  const std::size_t k1 = deg(w.a + w.b) - n;
  const std::size_t k2 = n - deg(w.a);
  Series<F> total(ctx);
  for (const auto& [key, coeff] : comultiply(u, k1, k2)) {
    const auto& [s1, s2] = key;
    // vol(T ^ e_{s2}): only the complementary component of T contributes.
    const auto st = detail::complement(s2, n);
    const auto tc = t.coefficient(st);
    if (tc.is_zero() && tc.exact()) continue;
    const auto left = detail::merge_sign(st, s2) < 0 ? -tc : tc;
    // vol(W ^ e_{s1} ^ V).
    Series<F> right(ctx);
    for (const auto& [sw, xw] : wd.components()) {
      auto mid = detail::disjoint_union(sw, s1);
      if (!mid) continue;
      const auto sv = detail::complement(*mid, n);
      const auto xv = v.coefficient(sv);
      if (xv.is_zero() && xv.exact()) continue;
      auto term = xw * xv;
      if (detail::merge_sign(sw, s1) * detail::merge_sign(*mid, sv) < 0) term = -term;
      right = right + term;
    }
    total = total + coeff * left * right;
  }
  return total;
}

/// O-basis of the exterior power of L: wedges of the canonical basis columns.
template <ExactField F>
std::vector<ExteriorVector<F>> exterior_lattice_basis(const Lattice<F>& l, std::size_t degree) {
  std::vector<ExteriorVector<F>> out;
  for (const auto& s : detail::subsets_of_size(detail::range_set(l.n()), degree)) {
    std::vector<SeriesVector<F>> cols;
    for (auto j : s) cols.push_back(l.basis().column(j));
    out.push_back(ExteriorVector<F>::from_vectors(l.context(), l.n(), cols));
  }
  return out;
}

/// Random O-combination (polynomial coefficients of degree at most 2) of the exterior lattice basis.
template <ExactField F>
ExteriorVector<F> random_exterior_member(std::mt19937_64& rng, const std::vector<ExteriorVector<F>>& basis) {
  if (basis.empty()) throw DomainError("empty exterior basis");
  const auto& ctx = basis.front().context();
  ExteriorVector<F> out(ctx, basis.front().n(), basis.front().degree());
  for (const auto& b : basis) {
    std::vector<typename F::Element> c(3);
    for (auto& x : c) x = ctx.field.random(rng);
    out = out + b.scaled(Series<F>::polynomial(ctx, 0, c));
  }
  return out;
}

struct WebEstimate {
  /// Best sampled -val F plus the scale normalization; empty when every sample vanished.
  std::optional<Rational> value;
  int trials = 0;
  int nonzero_samples = 0;
};

/// Sampled lower estimate of the tropical web function on four points.
template <ExactField F>
WebEstimate web_F_tropical(const WebParams& w, const Configuration<F>& conf, int trials, std::uint64_t seed = 0) {
  validate(conf);
  if (conf.points.size() != 4) throw DomainError("the web function takes four points");
  if (trials < 1) throw DomainError("trials must be at least 1");
  const std::size_t n = conf.n();
  validate(w, n);
  const std::array<std::int64_t, 4> deg{w.a, w.b, w.c, w.d};
  std::array<std::vector<ExteriorVector<F>>, 4> bases;
  Rational norm(0);
  for (std::size_t s = 0; s < 4; ++s) {
    bases[s] = exterior_lattice_basis(conf.points[s], static_cast<std::size_t>(deg[s]));
    norm += Rational(deg[s] * conf.points[s].det_val(), static_cast<std::int64_t>(n));
  }
  std::mt19937_64 rng(seed);
  WebEstimate out;
  out.trials = trials;
  std::optional<std::int64_t> best;
  for (int k = 0; k < trials; ++k) {
    std::array<std::optional<ExteriorVector<F>>, 4> x;
    for (std::size_t s = 0; s < 4; ++s) x[s] = random_exterior_member(rng, bases[s]);
    const auto val = web_F(w, *x[0], *x[1], *x[2], *x[3]);
    if (val.is_zero()) continue;
    ++out.nonzero_samples;
    const std::int64_t v = -val.valuation();
    if (!best || v > *best) best = v;
  }
  if (best) out.value = Rational(*best) + norm;
  return out;
}

inline constexpr std::uint64_t kConjectureCache = 100000;
inline constexpr const char* kConjectureLabel = "conjectural, report only";

template <ExactField F>
struct ConjectureReport {
  WebParams params;
  int radius = 0;
  int trials = 0;
  WebEstimate lhs;
  Rational rhs;
  std::optional<Lattice<F>> rhs_p;
  std::uint64_t ball_size = 0;
  std::uint64_t inner_evaluations = 0;
  /// LHS estimate does not exceed the RHS.
  bool lhs_le_rhs = false;
  bool agree = false;
  std::string label = kConjectureLabel;
};

/// RHS = min over p in the ball around the sum of the points of
/// d_a(p,x_1) + d_b(p,x_2) + min_q [d_{a+b-n}(q,p) + d_c(q,x_3) + d_d(q,x_4)].
/// The inner minimum over all q is f^t_{a+b-n,c,d}(p, x_3, x_4) by the metric
/// formula. Points are visited in increasing order of the outer terms and the
/// search stops once they alone reach the best value, since every d_i is >= 0.
inline ConjectureReport<PrimeField> conjecture_check(const WebParams& w, const Configuration<PrimeField>& conf, int radius,
                                                     int trials, std::uint64_t seed = 0) {
  using F = PrimeField;
  validate(conf);
  if (conf.points.size() != 4) throw DomainError("the web function takes four points");
  const std::size_t n = conf.n();
  validate(w, n);
  ConjectureReport<F> rep;
  rep.params = w;
  rep.radius = radius;
  rep.trials = trials;
  rep.lhs = web_F_tropical(w, conf, trials, seed);

  BallEnumerator en(lattice_sum(conf.points), radius);
  BallMetric outer(en, Indices{w.a, w.b, 0, 0}, conf);
  std::map<std::int64_t, std::uint64_t> histogram;
  en.for_each([&](const ball::Point& pt) { ++histogram[outer.scaled_value(pt)]; });
  for (const auto& [v, cnt] : histogram) rep.ball_size += cnt;

  const auto nn = static_cast<std::int64_t>(n);
  const Indices inner_idx{w.a + w.b - nn, w.c, w.d};
  std::optional<Rational> best;
  std::optional<ball::Point> best_pt;
  auto visit = [&](const ball::Point& pt, std::int64_t v) {
    const auto p = en.materialize(pt);
    ++rep.inner_evaluations;
    const auto total =
        Rational(v, nn) + f_t(inner_idx, Configuration<F>{Group::kPGL, {p, conf.points[2], conf.points[3]}}, seed).value;
    if (!best || total < *best) {
      best = total;
      best_pt = pt;
    }
  };
  // The lowest buckets are kept from one pass; later buckets cost a pass each.
  std::int64_t cached_below = histogram.begin()->first;
  std::uint64_t cached = 0;
  for (const auto& [v, cnt] : histogram) {
    if (cached + cnt > kConjectureCache) break;
    cached += cnt;
    cached_below = v + 1;
  }
  std::vector<std::pair<std::int64_t, ball::Point>> low;
  low.reserve(cached);
  en.for_each([&](const ball::Point& pt) {
    const auto v = outer.scaled_value(pt);
    if (v < cached_below) low.emplace_back(v, pt);
  });
  std::stable_sort(low.begin(), low.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  bool finished = false;
  for (const auto& [v, pt] : low) {
    if (best && Rational(v, nn) >= *best) {
      finished = true;
      break;
    }
    visit(pt, v);
  }
  for (auto it = histogram.lower_bound(cached_below); !finished && it != histogram.end(); ++it) {
    const auto v = it->first;
    if (best && Rational(v, nn) >= *best) break;
    en.for_each([&](const ball::Point& pt) {
      if (outer.scaled_value(pt) == v) visit(pt, v);
    });
  }
  rep.rhs = *best;
  rep.rhs_p = en.materialize(*best_pt);
  rep.lhs_le_rhs = !rep.lhs.value || *rep.lhs.value <= rep.rhs;
  rep.agree = rep.lhs.value && *rep.lhs.value == rep.rhs;
  return rep;
}

}  // namespace tropkm
