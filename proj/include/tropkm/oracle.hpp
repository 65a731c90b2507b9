#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "tropkm/errors.hpp"
#include "tropkm/lattice.hpp"

// Brute-force cross-checks that avoid the Smith-form machinery.

namespace tropkm {

inline constexpr std::size_t kMaxLeibniz = 8;
inline constexpr std::size_t kMaxBruteTransversal = 9;

/// Determinant of an exact square matrix by the permutation expansion.
template <ExactField F>
Series<F> leibniz_det(const SeriesMatrix<F>& m) {
  if (!m.square()) throw DimensionMismatch("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n > kMaxLeibniz) throw SizeLimit("permutation expansion above dimension " + std::to_string(kMaxLeibniz));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Series<F> det(m.context());
  do {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    }
    Series<F> term = Series<F>::one(m.context());
    bool zero = false;
    for (std::size_t i = 0; i < n && !zero; ++i) {
      const auto& x = m(i, perm[i]);
      if (x.is_zero() && x.exact()) zero = true;
      else term = term * x;
    }
    if (zero) continue;
    det = inversions % 2 ? det - term : det + term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

/// A random element of L: its basis times uniform polynomials of degree at most 2.
template <ExactField F>
SeriesVector<F> random_member(std::mt19937_64& rng, const Lattice<F>& l) {
  const auto& ctx = l.context();
  SeriesVector<F> coeffs;
  for (std::size_t k = 0; k < l.n(); ++k) {
    std::vector<typename F::Element> c(3);
    for (auto& x : c) x = ctx.field.random(rng);
    coeffs.push_back(Series<F>::polynomial(ctx, 0, c));
  }
  return l.basis() * coeffs;
}

/// Minimum over trials of val det(v_1, ..., v_n) with v_i random in L_i; kInfinity
/// when every sample was degenerate.
template <ExactField F>
std::int64_t sample_A(const std::vector<Lattice<F>>& inputs, int trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("trials must be at least 1");
  if (inputs.empty()) throw DomainError("no input lattices");
  const std::size_t n = inputs.front().n();
  if (inputs.size() != n) throw DimensionMismatch("need as many lattices as the dimension");
  for (const auto& l : inputs) require_same_dimension(inputs.front(), l);
  std::mt19937_64 rng(seed);
  std::int64_t best = kInfinity;
  for (int k = 0; k < trials; ++k) {
    std::vector<SeriesVector<F>> cols;
    for (const auto& l : inputs) cols.push_back(random_member(rng, l));
    const auto m = SeriesMatrix<F>::from_columns(inputs.front().context(), n, cols);
    const std::int64_t v = n <= kMaxLeibniz ? leibniz_det(m).valuation() : det_valuation(m);
    best = std::min(best, v);
  }
  return best;
}

/// Exact minimum over all permutations of the sum of c[i][pi(i)].
inline std::int64_t brute_transversal(const std::vector<std::vector<std::int64_t>>& cost) {
  const std::size_t n = cost.size();
  if (n > kMaxBruteTransversal) throw SizeLimit("transversal enumeration above size " + std::to_string(kMaxBruteTransversal));
  for (const auto& row : cost) {
    if (row.size() != n) throw DimensionMismatch("cost matrix is not square");
  }
  if (n == 0) return 0;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t best = kInfinity;
  do {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += cost[i][perm[i]];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace tropkm
