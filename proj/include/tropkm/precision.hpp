#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "tropkm/errors.hpp"
#include "tropkm/series.hpp"

namespace tropkm {

/// Runs fn(precision) starting at `start`, doubling the precision each time
/// fn raises IndeterminateValuation, up to kMaxPrecision.
template <class Fn>
auto with_escalation(std::int64_t start, Fn&& fn) -> decltype(fn(start)) {
  std::int64_t p = std::clamp<std::int64_t>(start, 1, kMaxPrecision);
  for (;;) {
    try {
      return fn(p);
    } catch (const IndeterminateValuation& e) {
      if (p >= kMaxPrecision) {
        throw PrecisionExhausted("precision cap " + std::to_string(kMaxPrecision) + " reached: " + e.what());
      }
      p = std::min(p * 2, kMaxPrecision);
    }
  }
}

}  // namespace tropkm
