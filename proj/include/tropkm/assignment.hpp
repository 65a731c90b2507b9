#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "tropkm/errors.hpp"
#include "tropkm/witness.hpp"

// Minimum-cost transversals through diagonal lattices L_i = <t^{c_i1} e_1, ..., t^{c_in} e_n>.

namespace tropkm {

using CostMatrix = std::vector<std::vector<std::int64_t>>;

template <ExactField F>
struct AssignmentResult {
  std::int64_t min_transversal = 0;
  /// permutation[i] is the column assigned to row i.
  std::vector<std::size_t> permutation;
  std::vector<std::int64_t> a;
  std::vector<std::int64_t> b;
  WitnessCertificate<F> certificate;
};

namespace detail {

// Perfect matching on allowed edges by augmenting paths; empty if none.
inline std::vector<std::size_t> perfect_matching(const std::vector<std::vector<bool>>& allowed) {
  const std::size_t n = allowed.size();
  constexpr std::size_t kFree = static_cast<std::size_t>(-1);
  std::vector<std::size_t> col_owner(n, kFree);
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t row, std::vector<bool>& seen) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!allowed[row][j] || seen[j]) continue;
      seen[j] = true;
      if (col_owner[j] == kFree || augment(col_owner[j], seen)) {
        col_owner[j] = row;
        return true;
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> seen(n, false);
    if (!augment(i, seen)) return {};
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < n; ++j) perm[col_owner[j]] = j;
  return perm;
}

}  // namespace detail

template <ExactField F>
AssignmentResult<F> assignment_solve(const CostMatrix& cost, const Context<F>& ctx, std::uint64_t seed = 0) {
  const std::size_t n = cost.size();
  if (n == 0) throw DomainError("empty cost matrix");
  for (const auto& row : cost) {
    if (row.size() != n) throw DimensionMismatch("cost matrix is not square");
  }
  std::vector<Lattice<F>> inputs;
  for (const auto& row : cost) inputs.push_back(Lattice<F>::diagonal(ctx, row));
  AssignmentResult<F> out{0, {}, {}, {}, witness(inputs, std::nullopt, seed)};
  const auto& cert = out.certificate;
  out.min_transversal = cert.A;
  out.a = cert.c_values;
  for (std::size_t j = 0; j < n; ++j) {
    std::int64_t bj = kInfinity;
    for (std::size_t i = 0; i < n; ++i) bj = std::min(bj, cost[i][j] - out.a[i]);
    out.b.push_back(bj);
  }
  std::int64_t total = 0;
  for (auto x : out.a) total += x;
  for (auto x : out.b) total += x;
  if (total != out.min_transversal) throw VerificationFailed("potentials do not sum to the minimum");

  // Columns where the tight generator of row i has its extremal coordinates,
  // which are exactly the equality edges a_i + b_j = c_ij.
  std::vector<std::vector<bool>> allowed(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) allowed[i][j] = out.a[i] + out.b[j] == cost[i][j];
  }
  out.permutation = detail::perfect_matching(allowed);
  if (out.permutation.empty()) throw VerificationFailed("no transversal of tight entries");
  std::int64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) s += cost[i][out.permutation[i]];
  if (s != out.min_transversal) throw VerificationFailed("extracted permutation does not attain A");
  return out;
}

}  // namespace tropkm
