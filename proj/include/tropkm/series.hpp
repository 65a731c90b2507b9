#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tropkm/errors.hpp"
#include "tropkm/field.hpp"

namespace tropkm {

/// Valuation of the exact zero series.
inline constexpr std::int64_t kInfinity = std::numeric_limits<std::int64_t>::max();
inline constexpr std::int64_t kDefaultPrecision = 64;
inline constexpr std::int64_t kMaxPrecision = 4096;

/// Coefficient field plus the relative precision used whenever an exact
/// non-monomial unit has to be inverted (the only place truncation enters).
template <ExactField F>
struct Context {
  F field{};
  std::int64_t precision = kDefaultPrecision;

  Context with_precision(std::int64_t p) const { return Context{field, p}; }

  friend bool operator==(const Context& a, const Context& b) { return a.field == b.field; }
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r) || r == kInfinity) throw ExponentOverflow("exponent overflow");
  return r;
}

// kInfinity absorbs.
inline std::int64_t saturating_add(std::int64_t a, std::int64_t b) {
  if (a == kInfinity || b == kInfinity) return kInfinity;
  return checked_add(a, b);
}

}  // namespace detail

/// Truncated Laurent series over an exact field.
///
/// A series stores coefficients for exponents lead, lead+1, ..., lead+len-1.
/// Exact series are Laurent polynomials: every coefficient outside the stored
/// window is zero and the recorded horizon is nominal. Inexact series know
/// their coefficients only below `horizon`; coefficients between the stored
/// window and the horizon are zero.
///
/// Arithmetic treats exact operands as known at every exponent, so the
/// horizon of a result is the tightest one derivable from the inexact
/// operands. Zero has a unique encoding (empty window); an inexact zero has
/// no decidable valuation.
template <ExactField F>
class Series {
 public:
  using Field = F;
  using Element = typename F::Element;
  using Ctx = Context<F>;

  /// Exact zero.
  explicit Series(const Ctx& ctx) : ctx_(ctx), horizon_(ctx.precision) {}

  static Series polynomial(const Ctx& ctx, std::int64_t lead, std::vector<Element> coeffs) {
    Series s(ctx);
    s.lead_ = lead;
    s.coeffs_ = std::move(coeffs);
    s.normalize();
    s.horizon_ = s.is_zero() ? ctx.precision : detail::checked_add(s.end(), ctx.precision);
    return s;
  }

  /// Builds a series with an explicit horizon. Exact series must fit below it.
  static Series with_horizon(const Ctx& ctx, std::int64_t lead, std::vector<Element> coeffs,
                             std::int64_t horizon, bool exact) {
    Series s(ctx);
    s.lead_ = lead;
    s.coeffs_ = std::move(coeffs);
    s.horizon_ = horizon;
    s.exact_ = exact;
    s.normalize();
    if (!s.is_zero() && s.end() > horizon) {
      if (exact) throw DomainError("horizon must exceed every exponent of an exact series");
      s.truncate_at(horizon);
    }
    return s;
  }

  static Series zero(const Ctx& ctx) { return Series(ctx); }

  /// Zero known only below `horizon`.
  static Series unknown_zero(const Ctx& ctx, std::int64_t horizon) {
    Series s(ctx);
    s.horizon_ = horizon;
    s.exact_ = false;
    return s;
  }

  static Series monomial(const Ctx& ctx, const Element& c, std::int64_t exponent) {
    return polynomial(ctx, exponent, {c});
  }
  static Series constant(const Ctx& ctx, const Element& c) { return monomial(ctx, c, 0); }
  static Series from_int(const Ctx& ctx, std::int64_t v) { return constant(ctx, ctx.field.from_int(v)); }
  static Series one(const Ctx& ctx) { return constant(ctx, ctx.field.one()); }
  static Series t_power(const Ctx& ctx, std::int64_t exponent) {
    return monomial(ctx, ctx.field.one(), exponent);
  }

  const Ctx& context() const noexcept { return ctx_; }
  const F& field() const noexcept { return ctx_.field; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  bool exact() const noexcept { return exact_; }
  std::int64_t lead() const noexcept { return lead_; }
  std::int64_t horizon() const noexcept { return horizon_; }
  /// One past the last stored exponent.
  std::int64_t end() const noexcept { return lead_ + static_cast<std::int64_t>(coeffs_.size()); }
  const std::vector<Element>& coeffs() const noexcept { return coeffs_; }

  /// Horizon used by arithmetic: exact series are known everywhere.
  std::int64_t effective_horizon() const noexcept { return exact_ ? kInfinity : horizon_; }

  std::int64_t valuation() const {
    if (!is_zero()) return lead_;
    if (exact_) return kInfinity;
    throw IndeterminateValuation("valuation undecided below horizon " + std::to_string(horizon_));
  }

  /// Valuation if decidable (kInfinity for exact zero), otherwise nullopt.
  std::optional<std::int64_t> known_valuation() const noexcept {
    if (!is_zero()) return lead_;
    if (exact_) return kInfinity;
    return std::nullopt;
  }

  /// A number the valuation is guaranteed not to be below.
  std::int64_t valuation_lower_bound() const noexcept {
    if (!is_zero()) return lead_;
    return exact_ ? kInfinity : horizon_;
  }

  const Element& leading_coefficient() const {
    if (is_zero()) throw DomainError("zero series has no leading coefficient");
    return coeffs_.front();
  }

  Element coefficient(std::int64_t exponent) const {
    if (!exact_ && exponent >= horizon_) {
      throw IndeterminateValuation("coefficient of t^" + std::to_string(exponent) + " lies beyond horizon");
    }
    if (is_zero() || exponent < lead_ || exponent >= end()) return field().zero();
    return coeffs_[static_cast<std::size_t>(exponent - lead_)];
  }

  Series operator-() const {
    Series r = *this;
    for (auto& c : r.coeffs_) c = field().neg(c);
    return r;
  }

  friend Series operator+(const Series& a, const Series& b) { return add(a, b, false); }
  friend Series operator-(const Series& a, const Series& b) { return add(a, b, true); }
  friend Series operator*(const Series& a, const Series& b) { return multiply(a, b); }
  Series& operator+=(const Series& b) { return *this = *this + b; }
  Series& operator-=(const Series& b) { return *this = *this - b; }
  Series& operator*=(const Series& b) { return *this = *this * b; }

  /// Multiplies by t^k.
  Series shifted(std::int64_t k) const {
    Series r = *this;
    if (!r.is_zero()) r.lead_ = detail::checked_add(lead_, k);
    r.horizon_ = detail::checked_add(horizon_, k);
    return r;
  }

  Series scaled(const Element& c) const {
    if (field().is_zero(c)) {
      Series z(ctx_);
      z.horizon_ = horizon_;
      return z;
    }
    Series r = *this;
    for (auto& x : r.coeffs_) x = field().mul(x, c);
    return r;
  }

  /// Inverse of a nonzero series. The result's relative precision equals the
  /// operand's; exact non-monomials are expanded to `ctx.precision` terms.
  /// `requested_horizon` caps the result horizon.
  Series inverse(std::int64_t requested_horizon = kInfinity) const {
    if (is_zero()) {
      if (exact_) throw DomainError("inverse of zero");
      throw IndeterminateValuation("inverse of a series whose valuation is undecided");
    }
    const F& f = field();
    const std::int64_t v = lead_;
    const Element c0_inv = f.inv(coeffs_.front());
    if (exact_ && coeffs_.size() == 1) return monomial(ctx_, c0_inv, -v);
    std::int64_t rel = exact_ ? ctx_.precision : horizon_ - v;
    std::int64_t h = detail::checked_add(-v, rel);
    if (requested_horizon < h) {
      h = requested_horizon;
      rel = h + v;
      if (rel <= 0) return unknown_zero(ctx_, h);
    }
    const auto n = static_cast<std::size_t>(rel);
    std::vector<Element> b(n, f.zero());
    b[0] = c0_inv;
    const std::size_t len = coeffs_.size();
    for (std::size_t k = 1; k < n; ++k) {
      Element acc = f.zero();
      const std::size_t top = std::min(k, len - 1);
      for (std::size_t j = 1; j <= top; ++j) acc = f.add(acc, f.mul(coeffs_[j], b[k - j]));
      b[k] = f.neg(f.mul(c0_inv, acc));
    }
    return with_horizon(ctx_, -v, std::move(b), h, false);
  }

  /// Exact polynomial made of the terms with exponent < k.
  Series truncated_below(std::int64_t k) const {
    if (!exact_ && horizon_ < k) {
      throw IndeterminateValuation("cannot truncate at t^" + std::to_string(k) + " beyond horizon " +
                                   std::to_string(horizon_));
    }
    if (is_zero() || k <= lead_) return Series(ctx_);
    const auto keep = static_cast<std::size_t>(std::min<std::int64_t>(k, end()) - lead_);
    return polynomial(ctx_, lead_, std::vector<Element>(coeffs_.begin(), coeffs_.begin() + keep));
  }

  /// The terms with exponent >= k; keeps the horizon.
  Series terms_from(std::int64_t k) const {
    if (is_zero() || k <= lead_) return *this;
    Series r(ctx_);
    r.exact_ = exact_;
    r.horizon_ = horizon_;
    if (k < end()) {
      r.lead_ = k;
      r.coeffs_.assign(coeffs_.begin() + (k - lead_), coeffs_.end());
      r.normalize();
    }
    return r;
  }

  /// Same value in another context over the same field.
  Series rebased(const Ctx& ctx) const {
    if (!(ctx.field == ctx_.field)) throw DomainError("rebase across different fields");
    Series r = *this;
    r.ctx_ = ctx;
    return r;
  }

  /// Marks a series exact; only valid when the caller knows all omitted terms vanish.
  Series as_exact() const {
    Series r = *this;
    r.exact_ = true;
    if (!r.is_zero()) {
      while (!r.coeffs_.empty() && field().is_zero(r.coeffs_.back())) r.coeffs_.pop_back();
    }
    return r;
  }

  /// Same terms (horizons and exactness ignored).
  bool same_terms(const Series& other) const {
    if (is_zero() || other.is_zero()) return is_zero() && other.is_zero();
    if (lead_ != other.lead_ || coeffs_.size() != other.coeffs_.size()) return false;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (!field().equal(coeffs_[i], other.coeffs_[i])) return false;
    }
    return true;
  }

  /// Coefficients agree for every exponent below `h`.
  bool agrees_below(const Series& other, std::int64_t h) const {
    std::int64_t lo = std::min(is_zero() ? h : lead_, other.is_zero() ? h : other.lead_);
    std::int64_t hi = std::min({h, std::max(is_zero() ? lo : end(), other.is_zero() ? lo : other.end())});
    for (std::int64_t e = lo; e < hi; ++e) {
      if (!field().equal(coefficient(e), other.coefficient(e))) return false;
    }
    return true;
  }

  friend bool operator==(const Series& a, const Series& b) {
    return a.exact_ == b.exact_ && a.same_terms(b) && (a.exact_ || a.horizon_ == b.horizon_);
  }

  /// Renders in the Laurent-polynomial grammar, ascending exponents.
  /// `compact` drops all spaces (used in whitespace-separated files).
  /// Inexact series get a trailing "+ O(t^h)" marker that the parser rejects.
  std::string to_string(bool compact = false) const {
    std::string out;
    const std::string plus = compact ? "+" : " + ";
    const std::string minus = compact ? "-" : " - ";
    bool first = true;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      const Element& c = coeffs_[i];
      if (field().is_zero(c)) continue;
      const std::int64_t e = lead_ + static_cast<std::int64_t>(i);
      std::string body = field().to_string(c);
      bool negative = !body.empty() && body[0] == '-';
      if (negative) body.erase(0, 1);
      if (first) {
        if (negative) out += "-";
      } else {
        out += negative ? minus : plus;
      }
      first = false;
      out += term_text(body, e);
    }
    if (first) out = "0";
    if (!exact_) out += (compact ? "+O(t^" : " + O(t^") + std::to_string(horizon_) + ")";
    return out;
  }

 private:
  static std::string term_text(const std::string& coeff, std::int64_t e) {
    if (e == 0) return coeff;
    std::string t = e == 1 ? "t" : "t^" + std::to_string(e);
    return coeff == "1" ? t : coeff + "*" + t;
  }

  void check_compatible(const Series& other) const {
    if (!(ctx_.field == other.ctx_.field)) throw DomainError("series over different fields");
  }

  void normalize() {
    const F& f = field();
    std::size_t skip = 0;
    while (skip < coeffs_.size() && f.is_zero(coeffs_[skip])) ++skip;
    if (skip == coeffs_.size()) {
      coeffs_.clear();
      lead_ = 0;
      return;
    }
    if (skip != 0) {
      coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(skip));
      lead_ = detail::checked_add(lead_, static_cast<std::int64_t>(skip));
    }
    if (exact_) {
      while (f.is_zero(coeffs_.back())) coeffs_.pop_back();
    }
  }

  void truncate_at(std::int64_t h) {
    if (is_zero()) return;
    if (lead_ >= h) {
      coeffs_.clear();
      lead_ = 0;
      return;
    }
    if (end() > h) coeffs_.resize(static_cast<std::size_t>(h - lead_));
    normalize();
  }

  static Series add(const Series& a, const Series& b, bool subtract) {
    a.check_compatible(b);
    const F& f = a.field();
    const bool exact = a.exact_ && b.exact_;
    const std::int64_t h = std::min(a.effective_horizon(), b.effective_horizon());
    Series r(a.ctx_);
    r.exact_ = exact;
    if (exact) {
      r.horizon_ = std::min(a.horizon_, b.horizon_);
    } else {
      r.horizon_ = h;
    }
    if (a.is_zero() && b.is_zero()) return r;
    std::int64_t lo = std::min(a.is_zero() ? kInfinity : a.lead_, b.is_zero() ? kInfinity : b.lead_);
    std::int64_t hi = std::max(a.is_zero() ? lo : a.end(), b.is_zero() ? lo : b.end());
    if (!exact) hi = std::min(hi, h);
    if (lo >= hi) return r;
    std::vector<Element> c(static_cast<std::size_t>(hi - lo), f.zero());
    if (!a.is_zero()) {
      for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        const std::int64_t e = a.lead_ + static_cast<std::int64_t>(i);
        if (e >= hi) break;
        c[static_cast<std::size_t>(e - lo)] = a.coeffs_[i];
      }
    }
    if (!b.is_zero()) {
      for (std::size_t i = 0; i < b.coeffs_.size(); ++i) {
        const std::int64_t e = b.lead_ + static_cast<std::int64_t>(i);
        if (e >= hi) break;
        auto& slot = c[static_cast<std::size_t>(e - lo)];
        slot = subtract ? f.sub(slot, b.coeffs_[i]) : f.add(slot, b.coeffs_[i]);
      }
    }
    r.lead_ = lo;
    r.coeffs_ = std::move(c);
    r.normalize();
    if (exact && !r.is_zero()) r.horizon_ = std::max(r.horizon_, r.end());
    return r;
  }

  static Series multiply(const Series& a, const Series& b) {
    a.check_compatible(b);
    const F& f = a.field();
    if ((a.is_zero() && a.exact_) || (b.is_zero() && b.exact_)) {
      Series z(a.ctx_);
      z.horizon_ = std::min(a.horizon_, b.horizon_);
      return z;
    }
    const bool exact = a.exact_ && b.exact_;
    Series r(a.ctx_);
    r.exact_ = exact;
    std::int64_t h;
    if (exact) {
      h = kInfinity;
      r.horizon_ = std::min(detail::checked_add(a.lead_, b.horizon_), detail::checked_add(b.lead_, a.horizon_));
    } else {
      h = std::min(detail::saturating_add(a.valuation_lower_bound(), b.effective_horizon()),
                   detail::saturating_add(b.valuation_lower_bound(), a.effective_horizon()));
      r.horizon_ = h;
    }
    if (a.is_zero() || b.is_zero()) return r;
    const std::int64_t lo = detail::checked_add(a.lead_, b.lead_);
    const std::int64_t full = static_cast<std::int64_t>(a.coeffs_.size() + b.coeffs_.size()) - 1;
    const std::int64_t len = std::min(full, h == kInfinity ? full : h - lo);
    if (len <= 0) return r;
    std::vector<Element> c(static_cast<std::size_t>(len), f.zero());
    const auto na = static_cast<std::int64_t>(a.coeffs_.size());
    const auto nb = static_cast<std::int64_t>(b.coeffs_.size());
    for (std::int64_t i = 0; i < na && i < len; ++i) {
      const Element& ai = a.coeffs_[static_cast<std::size_t>(i)];
      if (f.is_zero(ai)) continue;
      const std::int64_t top = std::min(nb, len - i);
      for (std::int64_t j = 0; j < top; ++j) {
        auto& slot = c[static_cast<std::size_t>(i + j)];
        slot = f.add(slot, f.mul(ai, b.coeffs_[static_cast<std::size_t>(j)]));
      }
    }
    r.lead_ = lo;
    r.coeffs_ = std::move(c);
    r.normalize();
    if (exact && !r.is_zero()) r.horizon_ = std::max(r.horizon_, r.end());
    return r;
  }

  Ctx ctx_;
  std::int64_t lead_ = 0;
  std::vector<Element> coeffs_;
  std::int64_t horizon_;
  bool exact_ = true;
};

/// a / b for nonzero b.
template <ExactField F>
Series<F> divide(const Series<F>& a, const Series<F>& b) {
  return a * b.inverse();
}

template <ExactField F>
Series<F> invert_unit(const Series<F>& s, std::int64_t requested_horizon = kInfinity) {
  return s.inverse(requested_horizon);
}

namespace detail {

template <ExactField F>
class SeriesParser {
 public:
  using Element = typename F::Element;

  SeriesParser(std::string_view text, const Context<F>& ctx) : text_(text), ctx_(ctx) {}

  // Returns (exponent, coefficient) terms with like exponents combined.
  std::vector<std::pair<std::int64_t, Element>> parse() {
    skip_ws();
    bool negative = false;
    if (peek() == '-') {
      negative = true;
      ++pos_;
      skip_ws();
    } else if (peek() == '+') {
      ++pos_;
      skip_ws();
    }
    add_term(negative);
    skip_ws();
    while (pos_ < text_.size()) {
      char op = text_[pos_];
      if (op != '+' && op != '-') fail("expected '+' or '-'");
      ++pos_;
      skip_ws();
      add_term(op == '-');
      skip_ws();
    }
    std::sort(terms_.begin(), terms_.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::pair<std::int64_t, Element>> merged;
    const F& f = ctx_.field;
    for (auto& [e, c] : terms_) {
      if (!merged.empty() && merged.back().first == e) {
        merged.back().second = f.add(merged.back().second, c);
      } else {
        merged.emplace_back(e, c);
      }
    }
    return merged;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " in series \"" + std::string(text_) + "\"", 0, pos_ + 1);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' ||
                                   text_[pos_] == '\n')) {
      ++pos_;
    }
  }

  std::string_view digits() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    if (start == pos_) fail("expected digits");
    return text_.substr(start, pos_ - start);
  }

  std::int64_t exponent() {
    skip_ws();
    bool neg = false;
    if (peek() == '-' || peek() == '+') {
      neg = peek() == '-';
      ++pos_;
      skip_ws();
    }
    std::string_view d = digits();
    std::int64_t v = 0;
    for (char c : d) {
      if (__builtin_mul_overflow(v, 10, &v) || __builtin_add_overflow(v, c - '0', &v)) fail("exponent overflow");
    }
    return neg ? -v : v;
  }

  // After 't': optional '^' exponent.
  std::int64_t t_part() {
    ++pos_;  // 't'
    skip_ws();
    if (peek() != '^') return 1;
    ++pos_;
    return exponent();
  }

  void add_term(bool negative) {
    const F& f = ctx_.field;
    Element c = f.one();
    std::int64_t e = 0;
    if (peek() == 't') {
      e = t_part();
    } else if (peek() >= '0' && peek() <= '9') {
      std::size_t at = pos_;
      Element num = f.from_decimal(digits());
      skip_ws();
      if (peek() == '/') {
        ++pos_;
        skip_ws();
        Element den = f.from_decimal(digits());
        if (f.is_zero(den)) {
          pos_ = at;
          fail("coefficient not in field " + f.name());
        }
        num = f.from_ratio(num, den);
        skip_ws();
      }
      c = num;
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        if (peek() != 't') fail("expected 't' after '*'");
        e = t_part();
      }
    } else {
      fail("expected a term");
    }
    if (negative) c = f.neg(c);
    terms_.emplace_back(e, c);
  }

  std::string_view text_;
  Context<F> ctx_;
  std::size_t pos_ = 0;
  std::vector<std::pair<std::int64_t, Element>> terms_;
};

}  // namespace detail

/// Parses a Laurent polynomial, giving it the stated horizon, which must
/// exceed every exponent present.
template <ExactField F>
Series<F> parse_series(std::string_view text, const Context<F>& ctx, std::int64_t horizon) {
  auto terms = detail::SeriesParser<F>(text, ctx).parse();
  const F& f = ctx.field;
  std::vector<std::pair<std::int64_t, typename F::Element>> nonzero;
  for (auto& t : terms) {
    if (!f.is_zero(t.second)) nonzero.push_back(t);
  }
  if (nonzero.empty()) {
    Series<F> z(ctx);
    return Series<F>::with_horizon(ctx, 0, {}, horizon, true);
  }
  const std::int64_t lo = nonzero.front().first;
  const std::int64_t hi = nonzero.back().first;
  if (horizon <= hi) throw DomainError("horizon " + std::to_string(horizon) + " does not exceed exponent " +
                                       std::to_string(hi));
  std::vector<typename F::Element> coeffs(static_cast<std::size_t>(hi - lo + 1), f.zero());
  for (auto& [e, c] : nonzero) coeffs[static_cast<std::size_t>(e - lo)] = c;
  return Series<F>::with_horizon(ctx, lo, std::move(coeffs), horizon, true);
}

/// Parses with the default horizon: `ctx.precision` coefficients past the
/// largest exponent present.
template <ExactField F>
Series<F> parse_series(std::string_view text, const Context<F>& ctx) {
  auto terms = detail::SeriesParser<F>(text, ctx).parse();
  std::int64_t top = -1;
  for (auto& t : terms) {
    if (!ctx.field.is_zero(t.second)) top = t.first;
  }
  return parse_series(text, ctx, detail::checked_add(std::max<std::int64_t>(top, -1) + 1, ctx.precision));
}

}  // namespace tropkm
