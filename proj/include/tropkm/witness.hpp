#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "tropkm/errors.hpp"
#include "tropkm/lattice.hpp"
#include "tropkm/oracle.hpp"
#include "tropkm/slir.hpp"

// Lattice improvement loop: grow L by t^{-1}W until the tight subspaces of L
// against every input admit a full system of independent representatives.
// The final L satisfies A = det_val(L) + sum_i c(L, L_i).

namespace tropkm {

struct TraceRecord {
  std::int64_t potential = 0;
  std::size_t slir_size = 0;
  std::vector<std::size_t> deficiency;
  std::size_t w_dim = 0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

template <ExactField F>
struct WitnessCertificate {
  Lattice<F> L;
  std::vector<std::int64_t> c_values;
  std::vector<SeriesVector<F>> tight_gens;
  std::int64_t A = 0;
  std::vector<TraceRecord> trace;
};

namespace detail {

template <ExactField F>
void check_inputs(const std::vector<Lattice<F>>& inputs) {
  if (inputs.empty()) throw DomainError("no input lattices");
  const std::size_t n = inputs.front().n();
  if (inputs.size() != n) {
    throw DimensionMismatch(std::to_string(inputs.size()) + " lattices in dimension " + std::to_string(n));
  }
  for (const auto& l : inputs) require_same_dimension(inputs.front(), l);
}

}  // namespace detail

/// det_val(L) + sum_i c(L, L_i); a lower bound for A.
template <ExactField F>
std::int64_t potential(const Lattice<F>& l, const std::vector<Lattice<F>>& inputs) {
  std::int64_t p = l.det_val();
  for (const auto& m : inputs) p = detail::checked_add(p, c_lattice(l, m));
  return p;
}

template <ExactField F>
struct StepResult {
  bool done = false;
  std::vector<std::int64_t> c_values;
  std::vector<SubspaceBasis<F>> tight;
  SlirResult<F> slir;
  // Set when not done.
  std::optional<Lattice<F>> next;
  std::vector<std::size_t> deficiency;
  std::size_t w_dim = 0;
  std::int64_t potential_before = 0;
  std::int64_t potential_after = 0;
};

/// One improvement step. Every claim about L' is recomputed and checked.
template <ExactField F>
StepResult<F> km_step(const Lattice<F>& l, const std::vector<Lattice<F>>& inputs, std::uint64_t seed) {
  detail::check_inputs(inputs);
  require_same_dimension(l, inputs.front());
  const std::size_t n = l.n();
  const auto& f = l.field();
  StepResult<F> out;
  for (const auto& m : inputs) {
    auto ta = tight_analysis(l, m);
    out.c_values.push_back(ta.c);
    out.tight.push_back(std::move(ta.subspace));
  }
  out.potential_before = l.det_val();
  for (auto c : out.c_values) out.potential_before = detail::checked_add(out.potential_before, c);
  out.slir = max_slir(out.tight, seed);
  if (out.slir.size() == n) {
    out.done = true;
    out.potential_after = out.potential_before;
    return out;
  }
  out.deficiency = out.slir.deficiency;
  SubspaceBasis<F> w(f, n);
  for (auto i : out.deficiency) w = w + out.tight[i];
  out.w_dim = w.dim();
  const std::int64_t gain = static_cast<std::int64_t>(out.deficiency.size()) - static_cast<std::int64_t>(out.w_dim);
  if (gain < 1) throw VerificationFailed("deficiency set does not violate the Hall condition");

  // Constant lifts of the echelon basis, in the coordinates of the canonical basis.
  // W + tL depends only on the residues, so any lift gives the same L'.
  const auto& ctx = l.context();
  SeriesMatrix<F> lifts(ctx, n, w.dim());
  for (std::size_t k = 0; k < w.dim(); ++k) {
    for (std::size_t r = 0; r < n; ++r) lifts(r, k) = Series<F>::constant(ctx, w.basis()[k][r]);
  }
  auto gens = (l.basis() * lifts).shifted(-1).hstack(l.basis());
  Lattice<F> next(gens);

  std::vector<std::int64_t> next_c;
  for (const auto& m : inputs) next_c.push_back(c_lattice(next, m));
  for (auto i : out.deficiency) {
    if (next_c[i] != out.c_values[i] + 1) {
      throw VerificationFailed("scaling exponent against input " + std::to_string(i) + " moved from " +
                               std::to_string(out.c_values[i]) + " to " + std::to_string(next_c[i]) +
                               ", expected one more");
    }
  }
  out.potential_after = next.det_val();
  for (auto c : next_c) out.potential_after = detail::checked_add(out.potential_after, c);
  if (next.det_val() != l.det_val() - static_cast<std::int64_t>(out.w_dim)) {
    throw VerificationFailed("enlarged lattice has the wrong determinant valuation");
  }
  if (out.potential_after - out.potential_before != gain) {
    throw VerificationFailed("potential rose by " + std::to_string(out.potential_after - out.potential_before) +
                             " instead of " + std::to_string(gain));
  }
  out.next = std::move(next);
  return out;
}

/// Checks every certificate invariant against the inputs; throws VerificationFailed.
template <ExactField F>
void verify_certificate(const WitnessCertificate<F>& cert, const std::vector<Lattice<F>>& inputs) {
  detail::check_inputs(inputs);
  const auto& l = cert.L;
  const std::size_t n = l.n();
  const auto& f = l.field();
  if (cert.c_values.size() != n || cert.tight_gens.size() != n) throw VerificationFailed("certificate has the wrong size");
  std::int64_t sum = l.det_val();
  FieldRows<F> residues;
  std::vector<SeriesVector<F>> scaled;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& w = cert.tight_gens[i];
    if (w.size() != n) throw VerificationFailed("tight generator has the wrong length");
    if (c_lattice(l, inputs[i]) != cert.c_values[i]) throw VerificationFailed("stale scaling exponent for input " + std::to_string(i));
    if (!member(w, l)) throw VerificationFailed("tight generator " + std::to_string(i) + " is not in the lattice");
    FieldVector<F> res;
    for (const auto& x : l.coordinates(w)) res.push_back(x.coefficient(0));
    residues.push_back(std::move(res));
    if (c_vector(w, inputs[i]) != cert.c_values[i]) throw VerificationFailed("generator " + std::to_string(i) + " is not tight");
    auto sw = shifted(w, cert.c_values[i]);
    if (!member(sw, inputs[i])) throw VerificationFailed("scaled generator " + std::to_string(i) + " is not in its input");
    scaled.push_back(std::move(sw));
    sum = detail::checked_add(sum, cert.c_values[i]);
  }
  if (rank(f, residues, n) != n) throw VerificationFailed("tight generators do not reduce to a basis");
  if (sum != cert.A) throw VerificationFailed("A differs from det_val + sum of scaling exponents");
  const auto m = SeriesMatrix<F>::from_columns(l.context(), n, scaled);
  if (det_valuation(m) != cert.A) throw VerificationFailed("scaled generators have determinant valuation other than A");
  for (std::size_t k = 1; k < cert.trace.size(); ++k) {
    if (cert.trace[k].potential <= cert.trace[k - 1].potential) throw VerificationFailed("trace potentials do not increase");
  }
  if (!cert.trace.empty() && cert.trace.back().potential != cert.A) throw VerificationFailed("trace ends below A");
}

/// Runs the improvement loop from `initial` (default: the sum of the inputs).
template <ExactField F>
WitnessCertificate<F> witness(const std::vector<Lattice<F>>& inputs, std::optional<std::type_identity_t<Lattice<F>>> initial = std::nullopt,
                              std::uint64_t seed = 0) {
  detail::check_inputs(inputs);
  const std::size_t n = inputs.front().n();
  Lattice<F> l = initial ? *initial : lattice_sum(inputs);
  require_same_dimension(l, inputs.front());

  std::int64_t upper = kInfinity;
  for (int attempt = 0; attempt < 64 && upper == kInfinity; ++attempt) {
    upper = sample_A(inputs, 1, seed + 0x51ED2701ULL + static_cast<std::uint64_t>(attempt));
  }
  if (upper == kInfinity) throw VerificationFailed("no sampled transversal has finite valuation");
  const std::int64_t p0 = potential(l, inputs);
  if (p0 > upper) throw VerificationFailed("initial potential exceeds a sampled determinant valuation");
  const std::int64_t budget = upper - p0 + static_cast<std::int64_t>(n);

  WitnessCertificate<F> cert{l, {}, {}, 0, {}};
  for (std::int64_t iter = 0;; ++iter) {
    if (iter >= budget) {
      throw IterationBudgetExceeded("no witness after " + std::to_string(budget) + " iterations");
    }
    auto step = km_step(l, inputs, seed + static_cast<std::uint64_t>(iter));
    cert.trace.push_back(TraceRecord{step.potential_before, step.slir.size(), step.deficiency, step.w_dim});
    if (step.done) {
      cert.c_values = step.c_values;
      for (std::size_t i = 0; i < n; ++i) cert.tight_gens.push_back(tight_lift(*step.slir.assigned[i], l, inputs[i]));
      cert.A = step.potential_before;
      cert.L = l;
      verify_certificate(cert, inputs);
      return cert;
    }
    l = *step.next;
  }
}

}  // namespace tropkm
