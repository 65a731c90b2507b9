#pragma once

#include <concepts>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "tropkm/errors.hpp"

namespace tropkm {

namespace detail {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

// Deterministic Miller-Rabin for the full 64-bit range.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline bool all_digits(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace detail

/// Integers modulo a prime p < 2^63. Elements are canonical residues in [0, p).
class PrimeField {
 public:
  using Element = std::uint64_t;

  /// 2^61 - 1, a Mersenne prime.
  static constexpr std::uint64_t kDefaultPrime = 2305843009213693951ULL;
  static constexpr bool kOrdered = false;

  explicit PrimeField(std::uint64_t p = kDefaultPrime) : p_(p) {
    if (p >= (1ULL << 63U) || !detail::is_prime(p)) {
      throw DomainError("field modulus " + std::to_string(p) + " is not a prime below 2^63");
    }
  }

  std::uint64_t modulus() const noexcept { return p_; }
  std::string name() const { return "Fp:" + std::to_string(p_); }

  Element zero() const noexcept { return 0; }
  Element one() const noexcept { return 1; }

  Element from_int(std::int64_t v) const noexcept {
    const auto m = static_cast<std::int64_t>(p_);
    std::int64_t r = v % m;
    if (r < 0) r += m;
    return static_cast<Element>(r);
  }

  /// Reads a nonnegative decimal integer of any length.
  Element from_decimal(std::string_view digits) const {
    if (!detail::all_digits(digits)) throw DomainError("not a decimal integer: " + std::string(digits));
    Element acc = 0;
    for (char c : digits) {
      acc = add(detail::mul_mod(acc, 10 % p_, p_), static_cast<Element>(c - '0') % p_);
    }
    return acc;
  }

  Element from_ratio(const Element& num, const Element& den) const {
    if (den == 0) throw DomainError("denominator vanishes in " + name());
    return mul(num, inv(den));
  }

  Element add(Element a, Element b) const noexcept {
    Element s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Element sub(Element a, Element b) const noexcept { return a >= b ? a - b : a + (p_ - b); }
  Element neg(Element a) const noexcept { return a == 0 ? 0 : p_ - a; }
  Element mul(Element a, Element b) const noexcept { return detail::mul_mod(a, b, p_); }
  Element inv(Element a) const {
    if (a == 0) throw DomainError("division by zero in " + name());
    return detail::pow_mod(a, p_ - 2, p_);
  }

  bool is_zero(Element a) const noexcept { return a == 0; }
  bool equal(Element a, Element b) const noexcept { return a == b; }
  std::string to_string(Element a) const { return std::to_string(a); }

  Element random(std::mt19937_64& rng) const {
    return std::uniform_int_distribution<std::uint64_t>(0, p_ - 1)(rng);
  }

  friend bool operator==(const PrimeField& a, const PrimeField& b) noexcept { return a.p_ == b.p_; }

 private:
  std::uint64_t p_;
};

/// Exact rationals. The only ordered field offered; required for sign queries.
class RationalField {
 public:
  using Element = boost::multiprecision::cpp_rational;

  static constexpr bool kOrdered = true;
  /// Random elements are integers drawn uniformly from [-kRandomRange, kRandomRange].
  static constexpr std::int64_t kRandomRange = std::int64_t{1} << 20;

  std::string name() const { return "Q"; }

  Element zero() const { return Element(0); }
  Element one() const { return Element(1); }
  Element from_int(std::int64_t v) const { return Element(v); }

  Element from_decimal(std::string_view digits) const {
    if (!detail::all_digits(digits)) throw DomainError("not a decimal integer: " + std::string(digits));
    return Element(boost::multiprecision::cpp_int(std::string(digits)));
  }

  Element from_ratio(const Element& num, const Element& den) const {
    if (den == 0) throw DomainError("zero denominator");
    return num / den;
  }

  Element add(const Element& a, const Element& b) const { return a + b; }
  Element sub(const Element& a, const Element& b) const { return a - b; }
  Element neg(const Element& a) const { return -a; }
  Element mul(const Element& a, const Element& b) const { return a * b; }
  Element inv(const Element& a) const {
    if (a == 0) throw DomainError("division by zero in Q");
    return Element(1) / a;
  }

  bool is_zero(const Element& a) const { return a == 0; }
  bool equal(const Element& a, const Element& b) const { return a == b; }
  int sign(const Element& a) const { return a > 0 ? 1 : (a < 0 ? -1 : 0); }
  std::string to_string(const Element& a) const { return a.str(); }

  Element random(std::mt19937_64& rng) const {
    return Element(std::uniform_int_distribution<std::int64_t>(-kRandomRange, kRandomRange)(rng));
  }

  friend bool operator==(const RationalField&, const RationalField&) noexcept { return true; }
};

template <class F>
concept ExactField = std::copy_constructible<F> && std::equality_comparable<F> &&
    requires(const F& f, const typename F::Element& a, std::mt19937_64& rng, std::string_view s) {
      { f.zero() } -> std::convertible_to<typename F::Element>;
      { f.one() } -> std::convertible_to<typename F::Element>;
      { f.from_int(std::int64_t{}) } -> std::convertible_to<typename F::Element>;
      { f.from_decimal(s) } -> std::convertible_to<typename F::Element>;
      { f.from_ratio(a, a) } -> std::convertible_to<typename F::Element>;
      { f.add(a, a) } -> std::convertible_to<typename F::Element>;
      { f.sub(a, a) } -> std::convertible_to<typename F::Element>;
      { f.neg(a) } -> std::convertible_to<typename F::Element>;
      { f.mul(a, a) } -> std::convertible_to<typename F::Element>;
      { f.inv(a) } -> std::convertible_to<typename F::Element>;
      { f.is_zero(a) } -> std::same_as<bool>;
      { f.equal(a, a) } -> std::same_as<bool>;
      { f.to_string(a) } -> std::convertible_to<std::string>;
      { f.random(rng) } -> std::convertible_to<typename F::Element>;
      { f.name() } -> std::convertible_to<std::string>;
      { F::kOrdered } -> std::convertible_to<bool>;
    };

template <class F>
concept OrderedField = ExactField<F> && F::kOrdered && requires(const F& f, const typename F::Element& a) {
  { f.sign(a) } -> std::same_as<int>;
};

/// Runtime description of a coefficient field, as named on the command line and in files.
struct FieldConfig {
  enum class Kind { kPrime, kRationals };
  Kind kind = Kind::kPrime;
  std::uint64_t prime = PrimeField::kDefaultPrime;

  static FieldConfig rationals() { return {Kind::kRationals, 0}; }
  static FieldConfig prime_field(std::uint64_t p) { return {Kind::kPrime, p}; }

  std::string name() const { return kind == Kind::kRationals ? "Q" : "Fp:" + std::to_string(prime); }

  /// Accepts "Q", "q", "Fp:<p>", "fp:<p>".
  static FieldConfig parse(std::string_view text) {
    if (text == "Q" || text == "q") return rationals();
    if (text.size() > 3 && (text.substr(0, 3) == "Fp:" || text.substr(0, 3) == "fp:" || text.substr(0, 3) == "FP:")) {
      std::string_view digits = text.substr(3);
      if (!detail::all_digits(digits) || digits.size() > 19) {
        throw DomainError("bad prime in field name: " + std::string(text));
      }
      std::uint64_t p = std::stoull(std::string(digits));
      if (p >= (1ULL << 63U) || !detail::is_prime(p)) throw DomainError(std::string(digits) + " is not prime");
      return prime_field(p);
    }
    throw DomainError("unknown field name: " + std::string(text));
  }

  friend bool operator==(const FieldConfig&, const FieldConfig&) = default;
};

}  // namespace tropkm
