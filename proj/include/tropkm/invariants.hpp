#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tropkm/errors.hpp"
#include "tropkm/fraction.hpp"
#include "tropkm/witness.hpp"

// Tropical invariants of configurations of points in the affine Grassmannian.
// f^t_{i_1...i_k}(x_1, ..., x_k) = -A(x_1^{i_1}, ..., x_k^{i_k}) + (1/n) sum_s i_s det_val(x_s),
// and it equals min_p sum_s d_{i_s}(p, x_s), attained at the witness lattice.

namespace tropkm {

enum class Group { kSL, kPGL };

template <ExactField F>
struct Configuration {
  Group group = Group::kPGL;
  std::vector<Lattice<F>> points;

  std::size_t n() const { return points.empty() ? 0 : points.front().n(); }
};

template <ExactField F>
void validate(const Configuration<F>& conf) {
  if (conf.points.empty()) throw DomainError("configuration without points");
  for (const auto& p : conf.points) require_same_dimension(conf.points.front(), p);
  if (conf.group == Group::kSL) {
    for (std::size_t s = 0; s < conf.points.size(); ++s) {
      if (conf.points[s].det_val() != 0) {
        throw DomainError("point " + std::to_string(s) + " has det_val " + std::to_string(conf.points[s].det_val()) +
                          " in an SL configuration");
      }
    }
  }
}

using Indices = std::vector<std::int64_t>;

template <ExactField F>
struct InvariantValue {
  Rational value;
  std::int64_t A = 0;
  WitnessCertificate<F> certificate;
};

namespace detail {

template <ExactField F>
void check_indices(const Indices& idx, const Configuration<F>& conf, std::int64_t total) {
  if (idx.size() != conf.points.size()) {
    throw IndexSumMismatch(std::to_string(idx.size()) + " indices for " + std::to_string(conf.points.size()) + " points");
  }
  std::int64_t s = 0;
  for (auto i : idx) {
    if (i < 0 || i > static_cast<std::int64_t>(conf.n())) {
      throw DomainError("index " + std::to_string(i) + " outside [0, " + std::to_string(conf.n()) + "]");
    }
    s += i;
  }
  if (s != total) {
    throw IndexSumMismatch("indices sum to " + std::to_string(s) + ", expected " + std::to_string(total));
  }
}

}  // namespace detail

/// The invariant f^t with its witness certificate.
template <ExactField F>
InvariantValue<F> f_t(const Indices& idx, const Configuration<F>& conf, std::uint64_t seed = 0) {
  validate(conf);
  const auto n = static_cast<std::int64_t>(conf.n());
  detail::check_indices(idx, conf, n);
  std::vector<Lattice<F>> inputs;
  Rational correction(0);
  for (std::size_t s = 0; s < idx.size(); ++s) {
    for (std::int64_t r = 0; r < idx[s]; ++r) inputs.push_back(conf.points[s]);
    correction += Rational(idx[s] * conf.points[s].det_val(), n);
  }
  auto cert = witness(inputs, std::nullopt, seed);
  const std::int64_t a = cert.A;
  return InvariantValue<F>{Rational(-a) + correction, a, std::move(cert)};
}

/// sum_s d_{i_s}(p, x_s).
template <ExactField F>
Rational metric_sum(const Indices& idx, const Lattice<F>& p, const Configuration<F>& conf) {
  Rational total(0);
  for (std::size_t s = 0; s < idx.size(); ++s) {
    if (idx[s] == 0) continue;
    total += d_i(p, conf.points[s], static_cast<std::size_t>(idx[s]));
  }
  return total;
}

template <ExactField F>
struct MetricMin {
  Rational value;
  Lattice<F> minimizer;
};

/// The metric side evaluated at the witness lattice; checked against f^t.
template <ExactField F>
MetricMin<F> metric_min(const Indices& idx, const Configuration<F>& conf, std::uint64_t seed = 0) {
  auto inv = f_t(idx, conf, seed);
  const auto& l = inv.certificate.L;
  Rational v = metric_sum(idx, l, conf);
  if (v != inv.value) {
    throw VerificationFailed("metric sum " + to_string(v) + " at the witness differs from f^t = " + to_string(inv.value));
  }
  return MetricMin<F>{v, l};
}

/// Dual invariant for indices summing to (k-1)n, through the dual configuration.
template <ExactField F>
InvariantValue<F> dual_f_t(const Indices& idx, const Configuration<F>& conf, std::uint64_t seed = 0) {
  validate(conf);
  const auto n = static_cast<std::int64_t>(conf.n());
  detail::check_indices(idx, conf, (static_cast<std::int64_t>(idx.size()) - 1) * n);
  Indices comp;
  for (auto i : idx) comp.push_back(n - i);
  Configuration<F> d{conf.group, {}};
  for (const auto& p : conf.points) d.points.push_back(dual(p));
  return f_t(comp, d, seed);
}

struct ExchangeCheck {
  std::array<Rational, 3> sums;
  bool holds = false;
};

/// Tropical three-term relation for indices (i, j, k, l) on four points:
/// the two largest of the three sums agree.
template <ExactField F>
ExchangeCheck exchange_identity_check(std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t l,
                                      const Configuration<F>& conf, std::uint64_t seed = 0) {
  validate(conf);
  if (conf.points.size() != 4) throw DomainError("exchange relation needs four points");
  const auto n = static_cast<std::int64_t>(conf.n());
  if (i + j + k + l != n) throw IndexSumMismatch("indices must sum to n");
  const std::array<Indices, 6> terms{Indices{i, j, k, l},         Indices{i + 1, j - 1, k + 1, l - 1},
                                     Indices{i, j, k + 1, l - 1}, Indices{i + 1, j - 1, k, l},
                                     Indices{i + 1, j, k, l - 1}, Indices{i, j - 1, k + 1, l}};
  for (const auto& t : terms) {
    for (auto x : t) {
      if (x < 0 || x > n) throw DomainError("exchange relation leaves the index range [0, n]");
    }
  }
  ExchangeCheck out;
  for (std::size_t r = 0; r < 3; ++r) {
    out.sums[r] = f_t(terms[2 * r], conf, seed).value + f_t(terms[2 * r + 1], conf, seed).value;
  }
  auto sorted = out.sums;
  std::sort(sorted.begin(), sorted.end());
  out.holds = sorted[1] == sorted[2];
  return out;
}

/// Common fractional part of sum_s d_{i_s}(p, x_s), checked at the witness and at O^n.
template <ExactField F>
Rational mod1_class(const Indices& idx, const Configuration<F>& conf, std::uint64_t seed = 0) {
  auto m = metric_min(idx, conf, seed);
  const auto at_witness = fractional_part(m.value);
  const auto at_standard = fractional_part(metric_sum(idx, Lattice<F>::standard(conf.points.front().context(), conf.n()), conf));
  if (at_witness != at_standard) {
    throw VerificationFailed("fractional parts " + to_string(at_witness) + " and " + to_string(at_standard) + " disagree");
  }
  return at_witness;
}

struct PositivityReport {
  bool positive = true;
  /// Description of the first failed condition.
  std::string first_violation;
};

/// Checks the ordered bases of a configuration over Q: for each checked triple
/// (p, q, r) and i + j + k = n, the first i vectors of p, j of q and k of r have
/// -val det = -A and a positive leading coefficient. With fewer than three
/// points the pair condition is checked instead.
template <OrderedField F>
PositivityReport positivity_check(const Configuration<F>& conf, const std::vector<std::vector<SeriesVector<F>>>& bases,
                                  const std::optional<std::vector<std::array<std::size_t, 3>>>& triangulation = std::nullopt,
                                  std::uint64_t seed = 0) {
  validate(conf);
  const std::size_t m = conf.points.size();
  const std::size_t n = conf.n();
  if (bases.size() != m) throw DimensionMismatch("one ordered basis per point is required");
  const auto& ctx = conf.points.front().context();
  for (std::size_t s = 0; s < m; ++s) {
    if (bases[s].size() != n) throw DimensionMismatch("basis of point " + std::to_string(s) + " has the wrong size");
    for (const auto& v : bases[s]) {
      if (v.size() != n) throw DimensionMismatch("basis vector of the wrong length");
      if (!member(v, conf.points[s])) throw DomainError("basis vector of point " + std::to_string(s) + " lies outside its lattice");
    }
    if (!(Lattice<F>(SeriesMatrix<F>::from_columns(ctx, n, bases[s])) == conf.points[s])) {
      throw DomainError("basis of point " + std::to_string(s) + " does not span its lattice");
    }
  }

  std::vector<std::vector<std::size_t>> groups;
  if (triangulation) {
    for (const auto& t : *triangulation) {
      for (auto x : t) {
        if (x >= m) throw DomainError("triangle refers to point " + std::to_string(x));
      }
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) throw DomainError("triangle with repeated vertices");
      groups.push_back({t[0], t[1], t[2]});
    }
  } else if (m < 3) {
    std::vector<std::size_t> all(m);
    for (std::size_t s = 0; s < m; ++s) all[s] = s;
    groups.push_back(all);
  } else {
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        for (std::size_t r = q + 1; r < m; ++r) groups.push_back({p, q, r});
      }
    }
  }

  PositivityReport report;
  for (const auto& g : groups) {
    // Every composition of n into |g| nonnegative parts.
    std::vector<std::int64_t> parts(g.size(), 0);
    std::vector<std::vector<std::int64_t>> comps;
    auto rec = [&](auto&& self, std::size_t pos, std::int64_t left) -> void {
      if (pos + 1 == g.size()) {
        parts[pos] = left;
        comps.push_back(parts);
        return;
      }
      for (std::int64_t x = left; x >= 0; --x) {
        parts[pos] = x;
        self(self, pos + 1, left - x);
      }
    };
    rec(rec, 0, static_cast<std::int64_t>(n));
    for (const auto& c : comps) {
      std::vector<SeriesVector<F>> cols;
      std::vector<Lattice<F>> inputs;
      for (std::size_t t = 0; t < g.size(); ++t) {
        for (std::int64_t r = 0; r < c[t]; ++r) {
          cols.push_back(bases[g[t]][static_cast<std::size_t>(r)]);
          inputs.push_back(conf.points[g[t]]);
        }
      }
      const auto mat = SeriesMatrix<F>::from_columns(ctx, n, cols);
      const auto det = leibniz_det(mat);
      const std::int64_t a = witness(inputs, std::nullopt, seed).A;
      std::string label = "points (";
      for (std::size_t t = 0; t < g.size(); ++t) label += (t ? "," : "") + std::to_string(g[t]);
      label += ") indices (";
      for (std::size_t t = 0; t < c.size(); ++t) label += (t ? "," : "") + std::to_string(c[t]);
      label += ")";
      if (det.is_zero()) {
        report = {false, label + ": determinant vanishes"};
        return report;
      }
      if (det.valuation() != a) {
        report = {false, label + ": -val det = " + std::to_string(-det.valuation()) + " but the invariant is " +
                             std::to_string(-a)};
        return report;
      }
      if (ctx.field.sign(det.leading_coefficient()) <= 0) {
        report = {false, label + ": leading coefficient " + ctx.field.to_string(det.leading_coefficient()) + " is not positive"};
        return report;
      }
    }
  }
  return report;
}

}  // namespace tropkm
