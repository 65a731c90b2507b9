#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tropkm/errors.hpp"
#include "tropkm/residue.hpp"

// Systems of linearly independent representatives: pick w_i in V_i, as many
// as possible, jointly independent. The maximum equals
// min over I of dim(sum_{i in I} V_i) + r - |I|.

namespace tropkm {

inline constexpr std::size_t kMaxSlirFamily = 16;
inline constexpr int kSlirSeeds = 32;

template <ExactField F>
struct SlirResult {
  /// Representative per index; empty for unassigned indices.
  std::vector<std::optional<FieldVector<F>>> assigned;
  /// Assigned indices, ascending.
  std::vector<std::size_t> J;
  /// Index set attaining the minimum of the bound.
  std::vector<std::size_t> deficiency;
  /// dim of the sum of the subspaces indexed by the deficiency set.
  std::size_t deficiency_span_dim = 0;
  /// True when the union of all minimizers was not itself a minimizer and a
  /// fallback choice was made.
  bool fell_back = false;

  std::size_t size() const noexcept { return J.size(); }
};

namespace detail {

template <ExactField F>
std::size_t common_ambient(const std::vector<SubspaceBasis<F>>& vs) {
  if (vs.empty()) return 0;
  const std::size_t n = vs.front().ambient();
  for (const auto& v : vs) {
    if (v.ambient() != n) throw DimensionMismatch("subspaces of different ambient spaces");
  }
  return n;
}

inline std::vector<std::size_t> mask_to_indices(std::uint32_t mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; mask != 0; ++i, mask >>= 1U) {
    if (mask & 1U) out.push_back(i);
  }
  return out;
}

// dim of sum over every subset, by adding the lowest index to the smaller mask.
template <ExactField F>
std::vector<std::size_t> subset_sum_dims(const std::vector<SubspaceBasis<F>>& vs, std::size_t n) {
  const std::size_t r = vs.size();
  const std::uint32_t count = 1U << r;
  std::vector<SubspaceBasis<F>> sums;
  sums.reserve(count);
  std::vector<std::size_t> dims(count, 0);
  if (r == 0) return dims;
  sums.emplace_back(vs.front().field(), n);
  for (std::uint32_t mask = 1; mask < count; ++mask) {
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    sums.push_back(sums[mask & (mask - 1)] + vs[low]);
    dims[mask] = sums.back().dim();
  }
  return dims;
}

template <ExactField F>
bool independent(const F& f, const std::vector<FieldVector<F>>& vectors, std::size_t n) {
  return rank(f, vectors, n) == vectors.size();
}

}  // namespace detail

/// dim(sum_{i in I} V_i) + r - |I|.
template <ExactField F>
std::size_t rado_bound(const std::vector<SubspaceBasis<F>>& vs, const std::vector<std::size_t>& index_set) {
  const std::size_t n = detail::common_ambient(vs);
  std::set<std::size_t> uniq;
  for (auto i : index_set) {
    if (i >= vs.size()) throw DomainError("index " + std::to_string(i) + " out of range");
    uniq.insert(i);
  }
  if (vs.empty()) return 0;
  SubspaceBasis<F> sum(vs.front().field(), n);
  for (auto i : uniq) sum = sum + vs[i];
  return sum.dim() + vs.size() - uniq.size();
}

/// Checks every defining property of a result; throws VerificationFailed.
template <ExactField F>
void verify_slir(const std::vector<SubspaceBasis<F>>& vs, const SlirResult<F>& res) {
  const std::size_t n = detail::common_ambient(vs);
  const std::size_t r = vs.size();
  if (res.assigned.size() != r) throw VerificationFailed("assignment has the wrong length");
  if (vs.empty()) return;
  const F& f = vs.front().field();
  std::vector<FieldVector<F>> chosen;
  std::vector<std::size_t> j_check;
  for (std::size_t i = 0; i < r; ++i) {
    if (!res.assigned[i]) continue;
    if (!vs[i].contains(*res.assigned[i])) throw VerificationFailed("representative outside its subspace");
    chosen.push_back(*res.assigned[i]);
    j_check.push_back(i);
  }
  if (j_check != res.J) throw VerificationFailed("assigned index list is inconsistent");
  if (!detail::independent(f, chosen, n)) throw VerificationFailed("representatives are dependent");
  if (res.J.size() != rado_bound(vs, res.deficiency)) throw VerificationFailed("size differs from the bound at the deficiency set");
  SubspaceBasis<F> w(f, n);
  std::vector<FieldVector<F>> inside;
  for (auto i : res.deficiency) {
    w = w + vs[i];
    if (res.assigned[i]) inside.push_back(*res.assigned[i]);
  }
  if (w.dim() != res.deficiency_span_dim) throw VerificationFailed("deficiency span dimension is stale");
  if (SubspaceBasis<F>::span(f, n, inside) != w) {
    throw VerificationFailed("representatives in the deficiency set do not span its sum");
  }
}

namespace detail {

// Picks representatives for `order` (deficiency indices first) reaching
// `need_inside` from the first `inside` entries and all the rest.
template <ExactField F>
class ExhaustiveSearch {
 public:
  ExhaustiveSearch(const std::vector<SubspaceBasis<F>>& vs, std::vector<std::size_t> order, std::size_t inside,
                   std::size_t need_inside, std::size_t n)
      : vs_(vs), order_(std::move(order)), inside_(inside), need_inside_(need_inside), n_(n), f_(vs.front().field()) {}

  std::optional<std::vector<std::optional<FieldVector<F>>>> run() {
    choice_.assign(vs_.size(), std::nullopt);
    if (dfs(0, 0, SubspaceBasis<F>(f_, n_))) return choice_;
    return std::nullopt;
  }

 private:
  static std::string key(std::size_t pos, std::size_t got, const SubspaceBasis<F>& span) {
    std::string k = std::to_string(pos) + ":" + std::to_string(got) + ":";
    for (const auto& row : span.basis()) {
      for (const auto& x : row) k += span.field().to_string(x) + ",";
      k += ";";
    }
    return k;
  }

  bool dfs(std::size_t pos, std::size_t got_inside, const SubspaceBasis<F>& span) {
    if (pos == order_.size()) return true;
    const std::string k = key(pos, got_inside, span);
    if (failed_.count(k)) return false;
    const std::size_t idx = order_[pos];
    const bool in_def = pos < inside_;
    if (in_def) {
      const std::size_t left = inside_ - pos;
      if (got_inside + left < need_inside_) {
        failed_.insert(k);
        return false;
      }
      // Skipping is allowed while enough deficiency indices remain.
      if (got_inside + left - 1 >= need_inside_ && dfs(pos + 1, got_inside, span)) return true;
    }
    if (!in_def || got_inside < need_inside_) {
      // Enumerate residues of V_idx modulo the current span, up to scalars.
      const auto& basis = vs_[idx].basis();
      const std::size_t d = basis.size();
      std::vector<typename F::Element> coeffs(d, f_.zero());
      std::set<std::string> seen;
      const std::uint64_t q = field_size();
      std::uint64_t total = 1;
      for (std::size_t i = 0; i < d; ++i) total *= q;
      for (std::uint64_t code = 1; code < total; ++code) {
        std::uint64_t c = code;
        bool leading_one = false;
        for (std::size_t i = 0; i < d; ++i) {
          coeffs[i] = f_.from_int(static_cast<std::int64_t>(c % q));
          c /= q;
        }
        // Normalize: first nonzero coefficient is one.
        for (std::size_t i = 0; i < d; ++i) {
          if (!f_.is_zero(coeffs[i])) {
            leading_one = f_.equal(coeffs[i], f_.one());
            break;
          }
        }
        if (!leading_one) continue;
        FieldVector<F> v = vs_[idx].combine(coeffs);
        if (span.contains(v)) continue;
        auto grown = span + SubspaceBasis<F>::span(f_, n_, {v});
        if (!seen.insert(key(0, 0, grown)).second) continue;
        choice_[idx] = v;
        if (dfs(pos + 1, got_inside + (in_def ? 1 : 0), grown)) return true;
        choice_[idx].reset();
      }
    }
    failed_.insert(k);
    return false;
  }

  std::uint64_t field_size() const {
    if constexpr (requires { f_.modulus(); }) {
      return f_.modulus();
    } else {
      throw SizeLimit("exhaustive search needs a finite field");
    }
  }

  const std::vector<SubspaceBasis<F>>& vs_;
  std::vector<std::size_t> order_;
  std::size_t inside_;
  std::size_t need_inside_;
  std::size_t n_;
  F f_;
  std::vector<std::optional<FieldVector<F>>> choice_;
  std::set<std::string> failed_;
};

template <ExactField F>
bool small_field(const F& f, std::size_t r) {
  if constexpr (requires { f.modulus(); }) {
    return f.modulus() <= static_cast<std::uint64_t>(r) * r;
  } else {
    return false;
  }
}

template <ExactField F>
std::uint64_t point_count(const F& f, std::size_t dim) {
  if constexpr (requires { f.modulus(); }) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) {
      if (total > (std::uint64_t{1} << 40) / f.modulus()) return ~std::uint64_t{0};
      total *= f.modulus();
    }
    return total;
  } else {
    return ~std::uint64_t{0};
  }
}

}  // namespace detail

/// Maximum system of linearly independent representatives with its
/// deficiency set; the result is verified before it is returned.
template <ExactField F>
SlirResult<F> max_slir(const std::vector<SubspaceBasis<F>>& vs, std::uint64_t seed) {
  const std::size_t r = vs.size();
  if (r > kMaxSlirFamily) throw SizeLimit("family of " + std::to_string(r) + " subspaces exceeds " + std::to_string(kMaxSlirFamily));
  const std::size_t n = detail::common_ambient(vs);
  SlirResult<F> res;
  res.assigned.assign(r, std::nullopt);
  if (r == 0) return res;
  const F& f = vs.front().field();

  const auto dims = detail::subset_sum_dims(vs, n);
  const std::uint32_t count = 1U << r;
  std::size_t best = r;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    best = std::min(best, dims[mask] + r - static_cast<std::size_t>(std::popcount(mask)));
  }
  auto bound = [&](std::uint32_t mask) { return dims[mask] + r - static_cast<std::size_t>(std::popcount(mask)); };
  std::uint32_t uni = 0;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    if (bound(mask) == best) uni |= mask;
  }
  std::uint32_t chosen = uni;
  if (bound(uni) != best) {
    res.fell_back = true;
    std::optional<std::vector<std::size_t>> smallest;
    for (std::uint32_t mask = 0; mask < count; ++mask) {
      if (bound(mask) != best) continue;
      auto idx = detail::mask_to_indices(mask);
      if (!smallest || idx < *smallest) {
        smallest = std::move(idx);
        chosen = mask;
      }
    }
  }
  res.deficiency = detail::mask_to_indices(chosen);
  res.deficiency_span_dim = dims[chosen];

  std::vector<std::size_t> order = res.deficiency;
  for (std::size_t i = 0; i < r; ++i) {
    if (!(chosen >> i & 1U)) order.push_back(i);
  }
  const std::size_t inside = res.deficiency.size();

  auto finish = [&](std::vector<std::optional<FieldVector<F>>> assigned) {
    res.assigned = std::move(assigned);
    res.J.clear();
    for (std::size_t i = 0; i < r; ++i) {
      if (res.assigned[i]) res.J.push_back(i);
    }
    verify_slir(vs, res);
    return res;
  };

  if (detail::small_field(f, r)) {
    for (const auto& v : vs) {
      if (detail::point_count(f, v.dim()) > (std::uint64_t{1} << 20)) {
        throw SizeLimit("subspace too large for exhaustive representative search over " + f.name());
      }
    }
    detail::ExhaustiveSearch<F> search(vs, order, inside, dims[chosen], n);
    auto found = search.run();
    if (!found) throw VerificationFailed("no representatives reach the certified bound");
    return finish(std::move(*found));
  }

  for (int attempt = 0; attempt < kSlirSeeds; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL);
    std::vector<std::optional<FieldVector<F>>> assigned(r);
    SubspaceBasis<F> span(f, n);
    for (std::size_t pos = 0; pos < r; ++pos) {
      const std::size_t i = order[pos];
      if (vs[i].is_zero()) continue;
      auto w = vs[i].random_element(rng);
      if (span.contains(w)) continue;
      span = span + SubspaceBasis<F>::span(f, n, {w});
      assigned[i] = std::move(w);
    }
    std::size_t got = 0;
    for (const auto& a : assigned) got += a.has_value();
    if (got != best) continue;
    try {
      return finish(std::move(assigned));
    } catch (const VerificationFailed&) {
      continue;
    }
  }
  throw VerificationFailed("randomized representatives missed the bound " + std::to_string(best) + " after " +
                           std::to_string(kSlirSeeds) + " seeds");
}

template <ExactField F>
struct FullSlirCheck {
  bool full = false;
  /// When not full: an index set whose subspaces sum to fewer than |I| dimensions.
  std::vector<std::size_t> violating;
};

template <ExactField F>
FullSlirCheck<F> has_full_slir(const std::vector<SubspaceBasis<F>>& vs, std::uint64_t seed) {
  auto res = max_slir(vs, seed);
  FullSlirCheck<F> out;
  out.full = res.size() == vs.size();
  if (!out.full) out.violating = res.deficiency;
  return out;
}

}  // namespace tropkm
