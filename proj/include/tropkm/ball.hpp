#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tropkm/errors.hpp"
#include "tropkm/fraction.hpp"
#include "tropkm/invariants.hpp"
#include "tropkm/lattice.hpp"

// Exhaustive enumeration of the lattices p with t^r c <= p <= t^{-r} c over a
// small prime field. In the coordinates Q = t^r c^{-1} p every such p is a
// lattice t^R O^n <= Q <= O^n (R = 2r) with a unique lower-triangular Hermite
// basis: diagonal t^{d_j}, entry (i, j) below the diagonal a polynomial of
// degree < d_i.

namespace tropkm {

inline constexpr std::uint64_t kBallMaxPrime = 7;
inline constexpr std::size_t kBallMaxDim = 3;
inline constexpr int kBallMaxRadius = 2;
inline constexpr std::size_t kBallMaxMaterialized = 200000;

namespace ball {

inline constexpr int kMaxLevel = 2 * kBallMaxRadius;
using Poly = std::array<int, kMaxLevel>;             // coefficients of t^0 .. t^{R-1}
using Vec = std::array<Poly, kBallMaxDim>;

/// Hermite data of one lattice of the ball.
struct Point {
  std::size_t n = 0;
  int level = 0;  // R
  std::array<int, kBallMaxDim> d{};
  std::array<std::array<Poly, kBallMaxDim>, kBallMaxDim> a{};  // a[i][j], i > j

  /// Column j of the Hermite basis modulo t^R.
  Vec column(std::size_t j) const {
    Vec v{};
    if (d[j] < level) v[j][static_cast<std::size_t>(d[j])] = 1;
    for (std::size_t i = j + 1; i < n; ++i) v[i] = a[i][j];
    return v;
  }
};

// v <- v reduced against the columns j0.. of `pt`; returns false at the first
// nonzero coefficient that cannot be cleared. With `residual`, records every
// such coefficient instead of stopping.
inline bool reduce(const Point& pt, Vec& v, std::size_t j0, int p, std::vector<int>* residual) {
  const int big_r = pt.level;
  for (std::size_t j = j0; j < pt.n; ++j) {
    const int dj = pt.d[j];
    for (int e = 0; e < dj && e < big_r; ++e) {
      if (residual) {
        residual->push_back(v[j][static_cast<std::size_t>(e)]);
      } else if (v[j][static_cast<std::size_t>(e)] != 0) {
        return false;
      }
    }
    // y = v_j / t^{d_j}, known modulo t^{R - d_j}.
    for (int e = 0; e + dj < big_r; ++e) {
      const int y = v[j][static_cast<std::size_t>(e + dj)];
      if (y == 0) continue;
      for (std::size_t i = j + 1; i < pt.n; ++i) {
        const auto& aij = pt.a[i][j];
        for (int f = 0; f < pt.d[i] && e + f < big_r; ++f) {
          if (aij[static_cast<std::size_t>(f)] == 0) continue;
          auto& slot = v[i][static_cast<std::size_t>(e + f)];
          slot = (slot + (p - y) * aij[static_cast<std::size_t>(f)]) % p;
        }
      }
    }
    for (auto& c : v[j]) c = 0;
  }
  return true;
}

}  // namespace ball

class BallEnumerator {
 public:
  using F = PrimeField;

  BallEnumerator(const Lattice<F>& center, int radius) : center_(center), radius_(radius) {
    if (radius < 0) throw DomainError("negative radius");
    if (center.field().modulus() > kBallMaxPrime) {
      throw SizeLimit("ball enumeration needs a prime at most " + std::to_string(kBallMaxPrime) + ", got " +
                      center.field().name());
    }
    if (center.n() > kBallMaxDim) throw SizeLimit("ball enumeration above dimension " + std::to_string(kBallMaxDim));
    if (radius > kBallMaxRadius) throw SizeLimit("ball enumeration above radius " + std::to_string(kBallMaxRadius));
  }

  const Lattice<F>& center() const noexcept { return center_; }
  int radius() const noexcept { return radius_; }
  std::size_t n() const noexcept { return center_.n(); }
  int level() const noexcept { return 2 * radius_; }
  int prime() const noexcept { return static_cast<int>(center_.field().modulus()); }

  /// Calls fn(const ball::Point&) once per lattice of the ball.
  template <class Fn>
  void for_each(Fn&& fn) const {
    ball::Point pt;
    pt.n = n();
    pt.level = level();
    descend(pt, static_cast<std::ptrdiff_t>(n()) - 1, fn);
  }

  std::uint64_t count() const {
    std::uint64_t c = 0;
    for_each([&](const ball::Point&) { ++c; });
    return c;
  }

  /// Basis t^{-r} c Q of the lattice described by `pt`.
  Lattice<F> materialize(const ball::Point& pt) const {
    const auto& ctx = center_.context();
    SeriesMatrix<F> q(ctx, n(), n());
    for (std::size_t j = 0; j < n(); ++j) {
      q(j, j) = Series<F>::t_power(ctx, pt.d[j]);
      for (std::size_t i = j + 1; i < n(); ++i) {
        std::vector<F::Element> c;
        for (int e = 0; e < pt.d[i]; ++e) c.push_back(static_cast<F::Element>(pt.a[i][j][static_cast<std::size_t>(e)]));
        q(i, j) = Series<F>::polynomial(ctx, 0, c);
      }
    }
    return Lattice<F>((center_.basis() * q).shifted(-radius_));
  }

  /// t^r c <= l <= t^{-r} c.
  bool contains(const Lattice<F>& l) const {
    require_same_dimension(center_, l);
    const auto inner = scale(center_, radius_);
    for (std::size_t j = 0; j < n(); ++j) {
      if (!member(inner.basis().column(j), l)) return false;
    }
    const auto outer = scale(center_, -radius_);
    for (std::size_t j = 0; j < n(); ++j) {
      if (!member(l.basis().column(j), outer)) return false;
    }
    return true;
  }

  /// Some t^m l lies in the ball.
  bool contains_class(const Lattice<F>& l) const {
    require_same_dimension(center_, l);
    // Largest j with l <= t^j c; the only candidate is t^{-r-j} l.
    const std::int64_t j = (center_.inverse_basis() * l.basis()).min_valuation();
    return contains(scale(l, -radius_ - j));
  }

 private:
  template <class Fn>
  void descend(ball::Point& pt, std::ptrdiff_t j, Fn& fn) const {
    if (j < 0) {
      fn(static_cast<const ball::Point&>(pt));
      return;
    }
    const auto col = static_cast<std::size_t>(j);
    const int big_r = level();
    const int p = prime();
    const PrimeField f(static_cast<std::uint64_t>(p));
    for (int dj = 0; dj <= big_r; ++dj) {
      pt.d[col] = dj;
      // Reduced tails: monomials t^e e_i with i > j and e < d_i.
      std::vector<std::pair<std::size_t, int>> mono;
      for (std::size_t i = col + 1; i < n(); ++i) {
        for (int e = 0; e < pt.d[i]; ++e) mono.emplace_back(i, e);
      }
      for (std::size_t i = col + 1; i < n(); ++i) pt.a[i][col] = ball::Poly{};
      if (mono.empty()) {
        descend(pt, j - 1, fn);
        continue;
      }
      // The tail a is admissible iff t^{R-d_j} a lies in the span of the later columns.
      FieldRows<F> by_column;
      std::size_t res_len = 0;
      for (const auto& [i, e] : mono) {
        ball::Vec v{};
        if (e + big_r - dj < big_r) v[i][static_cast<std::size_t>(e + big_r - dj)] = 1;
        std::vector<int> residual;
        ball::reduce(pt, v, col + 1, p, &residual);
        res_len = residual.size();
        FieldVector<F> row;
        for (int x : residual) row.push_back(static_cast<F::Element>(x));
        by_column.push_back(std::move(row));
      }
      FieldRows<F> rows(res_len, FieldVector<F>(mono.size(), 0));
      for (std::size_t m = 0; m < mono.size(); ++m) {
        for (std::size_t r = 0; r < res_len; ++r) rows[r][m] = by_column[m][r];
      }
      const auto ker = kernel(f, rows, mono.size());
      const auto& basis = ker.basis();
      const std::size_t k = basis.size();
      std::vector<int> digits(k, 0);
      while (true) {
        for (std::size_t i = col + 1; i < n(); ++i) pt.a[i][col] = ball::Poly{};
        for (std::size_t b = 0; b < k; ++b) {
          if (digits[b] == 0) continue;
          for (std::size_t m = 0; m < mono.size(); ++m) {
            const auto& [i, e] = mono[m];
            auto& slot = pt.a[i][col][static_cast<std::size_t>(e)];
            slot = static_cast<int>((slot + digits[b] * static_cast<std::int64_t>(basis[b][m])) % p);
          }
        }
        descend(pt, j - 1, fn);
        std::size_t pos = 0;
        while (pos < k && ++digits[pos] == p) digits[pos++] = 0;
        if (pos == k) break;
      }
    }
  }

  Lattice<F> center_;
  int radius_;
};

/// Every lattice of the ball, in enumeration order.
inline std::vector<Lattice<PrimeField>> enumerate_ball(const Lattice<PrimeField>& center, int radius) {
  BallEnumerator en(center, radius);
  std::vector<Lattice<PrimeField>> out;
  en.for_each([&](const ball::Point& pt) {
    if (out.size() == kBallMaxMaterialized) {
      throw SizeLimit("ball has more than " + std::to_string(kBallMaxMaterialized) + " lattices; stream it instead");
    }
    out.push_back(en.materialize(pt));
  });
  return out;
}

/// Evaluates sum_s d_{i_s}(p, x_s) on ball points without Smith forms, using
/// d_1 = -alpha - S/n and d_{n-1} = S/n - beta, where alpha = max{k : x <= t^k p},
/// beta = max{k : p <= t^k x} and S = det_val(p) - det_val(x).
class BallMetric {
 public:
  using F = PrimeField;

  BallMetric(const BallEnumerator& en, const Indices& idx, const Configuration<F>& conf)
      : en_(en), idx_(idx), n_(en.n()), level_(en.level()), p_(en.prime()) {
    validate(conf);
    if (idx.size() != conf.points.size()) throw IndexSumMismatch("one index per point is required");
    require_same_dimension(en.center(), conf.points.front());
    const auto& cinv = en.center().inverse_basis();
    const std::int64_t r = en.radius();
    for (std::size_t s = 0; s < idx.size(); ++s) {
      const auto i = idx[s];
      if (i < 0 || i > static_cast<std::int64_t>(n_)) throw DomainError("index outside [0, n]");
      Term term;
      term.det_val = conf.points[s].det_val();
      if (i == 0 || i == static_cast<std::int64_t>(n_)) {
        term.kind = Kind::kNone;
      } else if (i == 1) {
        term.kind = Kind::kAlpha;
        // X' = t^r c^{-1} x, inside t^r O^n.
        const auto xs = (cinv * conf.points[s].basis()).shifted(r);
        const std::int64_t kappa = xs.min_valuation();
        if (kappa < r) throw DomainError("configuration point is not inside the ball center");
        term.lo = -r + 1;
        term.hi = kappa;
        for (std::int64_t k = term.lo; k <= term.hi; ++k) {
          std::vector<ball::Vec> gens;
          for (std::size_t j = 0; j < n_; ++j) {
            ball::Vec v{};
            for (std::size_t row = 0; row < n_; ++row) {
              for (int e = 0; e < level_; ++e) v[row][static_cast<std::size_t>(e)] = static_cast<int>(xs(row, j).coefficient(e + k));
            }
            gens.push_back(v);
          }
          term.alpha_gens.push_back(std::move(gens));
        }
      } else if (i == static_cast<std::int64_t>(n_) - 1) {
        term.kind = Kind::kBeta;
        // X'^{-1} = t^{-r} x^{-1} c.
        const auto xinv = (conf.points[s].inverse_basis() * en.center().basis()).shifted(-r);
        const std::int64_t lambda = xinv.min_valuation();
        term.lo = lambda + 1;
        term.hi = lambda + level_;
        for (std::int64_t k = term.lo; k <= term.hi; ++k) {
          // Rows: coefficient of t^{e} (e in [-R, -1]) of component row of t^{-k} X'^{-1} m.
          std::vector<std::vector<int>> phi(n_ * static_cast<std::size_t>(level_), std::vector<int>(n_ * static_cast<std::size_t>(level_), 0));
          for (std::size_t col = 0; col < n_; ++col) {
            for (int e = 0; e < level_; ++e) {
              const std::size_t m = col * static_cast<std::size_t>(level_) + static_cast<std::size_t>(e);
              for (std::size_t row = 0; row < n_; ++row) {
                // (X'^{-1})(row, col) * t^{e - k}
                for (int ex = -level_; ex < 0; ++ex) {
                  const std::size_t rr = row * static_cast<std::size_t>(level_) + static_cast<std::size_t>(ex + level_);
                  phi[rr][m] = static_cast<int>(xinv(row, col).coefficient(ex + k - e));
                }
              }
            }
          }
          term.beta_maps.push_back(std::move(phi));
        }
      } else {
        throw SizeLimit("fast ball evaluation handles only the indices 0, 1, n-1, n");
      }
      terms_.push_back(std::move(term));
    }
  }

  /// n times the metric sum at the ball point.
  std::int64_t scaled_value(const ball::Point& pt) const {
    const auto n = static_cast<std::int64_t>(n_);
    std::int64_t dv = en_.center().det_val() - en_.radius() * n;
    for (std::size_t j = 0; j < n_; ++j) dv += pt.d[j];
    std::int64_t total = 0;
    for (const auto& term : terms_) {
      const std::int64_t sum_mu = dv - term.det_val;
      if (term.kind == Kind::kAlpha) {
        std::int64_t alpha = term.hi;
        for (std::size_t t = 0; t < term.alpha_gens.size(); ++t) {
          if (!all_members(pt, term.alpha_gens[t])) {
            alpha = term.lo + static_cast<std::int64_t>(t) - 1;
            break;
          }
        }
        total += -n * alpha - sum_mu;
      } else if (term.kind == Kind::kBeta) {
        std::int64_t beta = term.hi;
        for (std::size_t t = 0; t < term.beta_maps.size(); ++t) {
          if (!columns_in_kernel(pt, term.beta_maps[t])) {
            beta = term.lo + static_cast<std::int64_t>(t) - 1;
            break;
          }
        }
        total += sum_mu - n * beta;
      }
    }
    return total;
  }

  Rational value(const ball::Point& pt) const { return Rational(scaled_value(pt), static_cast<std::int64_t>(n_)); }

 private:
  enum class Kind { kNone, kAlpha, kBeta };
  struct Term {
    Kind kind = Kind::kNone;
    std::int64_t det_val = 0;
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::vector<std::vector<ball::Vec>> alpha_gens;
    std::vector<std::vector<std::vector<int>>> beta_maps;
  };

  bool all_members(const ball::Point& pt, const std::vector<ball::Vec>& gens) const {
    for (auto v : gens) {
      if (!ball::reduce(pt, v, 0, p_, nullptr)) return false;
    }
    return true;
  }

  bool columns_in_kernel(const ball::Point& pt, const std::vector<std::vector<int>>& phi) const {
    const std::size_t big_r = static_cast<std::size_t>(level_);
    for (std::size_t j = 0; j < n_; ++j) {
      const auto v = pt.column(j);
      for (const auto& row : phi) {
        std::int64_t acc = 0;
        for (std::size_t c = 0; c < n_; ++c) {
          for (std::size_t e = 0; e < big_r; ++e) acc += static_cast<std::int64_t>(row[c * big_r + e]) * v[c][e];
        }
        if (acc % p_ != 0) return false;
      }
    }
    return true;
  }

  const BallEnumerator& en_;
  Indices idx_;
  std::size_t n_;
  int level_;
  int p_;
  std::vector<Term> terms_;
};

struct BruteMin {
  Rational value;
  std::optional<Lattice<PrimeField>> argmin;
  std::uint64_t count = 0;
};

/// Minimum of sum_s d_{i_s}(p, x_s) over the ball of radius r around the sum of the points.
inline BruteMin metric_min_brute(const Indices& idx, const Configuration<PrimeField>& conf, int radius) {
  validate(conf);
  BallEnumerator en(lattice_sum(conf.points), radius);
  BallMetric metric(en, idx, conf);
  BruteMin out;
  std::optional<std::int64_t> best;
  std::optional<ball::Point> best_pt;
  en.for_each([&](const ball::Point& pt) {
    ++out.count;
    const auto v = metric.scaled_value(pt);
    if (!best || v < *best) {
      best = v;
      best_pt = pt;
    }
  });
  out.value = Rational(*best, static_cast<std::int64_t>(en.n()));
  out.argmin = en.materialize(*best_pt);
  return out;
}

}  // namespace tropkm
