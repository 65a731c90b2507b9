#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "tropkm/lattice.hpp"

// Random instance generators shared by the oracle commands and the test suites.

namespace tropkm {

/// Random Laurent polynomial with lowest exponent in [lo, hi] and up to `len` terms.
template <ExactField F>
Series<F> random_poly(std::mt19937_64& rng, const Context<F>& ctx, int lo, int hi, int len) {
  std::uniform_int_distribution<int> lead(lo, hi);
  std::vector<typename F::Element> c;
  for (int k = 0; k < len; ++k) c.push_back(ctx.field.random(rng));
  if (ctx.field.is_zero(c[0])) c[0] = ctx.field.one();
  return Series<F>::polynomial(ctx, lead(rng), c);
}

template <ExactField F>
SeriesMatrix<F> random_matrix(std::mt19937_64& rng, const Context<F>& ctx, std::size_t n, int lo, int hi,
                              int len = 3) {
  SeriesMatrix<F> m(ctx, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = random_poly(rng, ctx, lo, hi, len);
  }
  return m;
}

/// Random matrix over O with unit determinant: unit lower times unit upper
/// triangular with constant-term-one diagonals, then a permutation.
template <ExactField F>
SeriesMatrix<F> random_unimodular(std::mt19937_64& rng, const Context<F>& ctx, std::size_t n) {
  SeriesMatrix<F> lo(ctx, n, n), up(ctx, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i > j) lo(i, j) = random_poly(rng, ctx, 0, 2, 2);
      if (i < j) up(i, j) = random_poly(rng, ctx, 0, 2, 2);
    }
    std::vector<typename F::Element> d{ctx.field.one(), ctx.field.random(rng)};
    lo(i, i) = Series<F>::polynomial(ctx, 0, d);
    up(i, i) = Series<F>::one(ctx);
  }
  auto m = lo * up;
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  SeriesMatrix<F> p(ctx, n, n);
  for (std::size_t i = 0; i < n; ++i) p(i, perm[i]) = Series<F>::one(ctx);
  return p * m;
}

/// Random full-rank lattice: random unimodular times diag(t^k) times random unimodular,
/// with exponents in [lo, hi].
template <ExactField F>
Lattice<F> random_lattice(std::mt19937_64& rng, const Context<F>& ctx, std::size_t n, int lo, int hi) {
  std::uniform_int_distribution<int> e(lo, hi);
  std::vector<std::int64_t> ex(n);
  for (auto& x : ex) x = e(rng);
  auto g = random_unimodular(rng, ctx, n) * SeriesMatrix<F>::diagonal(ctx, ex) * random_unimodular(rng, ctx, n);
  return Lattice<F>(g);
}

}  // namespace tropkm
