#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace tropkm {

/// Exact values of invariants; they live in (1/n)Z.
using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline Rational floor_of(const Rational& r) {
  std::int64_t q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return Rational(q);
}

/// Fractional part in [0, 1).
inline Rational fractional_part(const Rational& r) { return r - floor_of(r); }

}  // namespace tropkm
