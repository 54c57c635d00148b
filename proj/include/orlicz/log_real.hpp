#pragma once

/// \file
/// Signed real numbers stored through their base-2 logarithm.
///
/// The magnitude is kept as an exact integer part plus a fractional part in
/// [0, 1), so a value such as (e/242)^242 keeps full double precision in its
/// logarithm no matter how far it sits outside the native double range.

#include <cctype>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "orlicz/error.hpp"

namespace orlicz {

enum class Sign : std::int8_t { negative = -1, zero = 0, positive = 1 };

constexpr Sign operator*(Sign a, Sign b) noexcept {
  return static_cast<Sign>(static_cast<int>(a) * static_cast<int>(b));
}

constexpr Sign operator-(Sign a) noexcept {
  return static_cast<Sign>(-static_cast<int>(a));
}

/// Comparison slack. `rel` is a dimensionless relative tolerance used by
/// iterative routines; `abs_log2` is the slack applied when two magnitudes
/// are compared through their logarithms.
struct Tolerance {
  double rel = 1e-13;
  double abs_log2 = 0.0;

  constexpr Tolerance() = default;
  Tolerance(double rel_, double abs_log2_) : rel(rel_), abs_log2(abs_log2_) {
    if (!(rel > 0.0)) throw DomainError("Tolerance.rel must be positive");
    if (!(abs_log2 >= 0.0)) throw DomainError("Tolerance.abs_log2 must be nonnegative");
  }
};

class LogReal {
 public:
  constexpr LogReal() = default;

  static constexpr LogReal zero() { return {}; }
  static LogReal one() { return pow2(0); }

  static LogReal pow2(std::int64_t exponent) {
    LogReal r;
    r.sign_ = Sign::positive;
    r.whole_ = exponent;
    r.frac_ = 0.0;
    return r;
  }

  /// sign * 2^log2mag. A zero sign yields zero regardless of log2mag.
  static LogReal from_log2(Sign sign, double log2mag) {
    if (sign == Sign::zero) return zero();
    if (!std::isfinite(log2mag)) throw DomainError("LogReal: non-finite log2 magnitude");
    return make(sign, 0, log2mag);
  }

  /// Positive value 2^(whole + frac) with the split supplied by the caller.
  static LogReal from_log2_parts(Sign sign, std::int64_t whole, double frac) {
    if (sign == Sign::zero) return zero();
    return make(sign, whole, frac);
  }

  static LogReal from_double(double x) {
    if (x == 0.0) return zero();
    if (!std::isfinite(x)) throw DomainError("LogReal: cannot represent a non-finite double");
    int exp = 0;
    const double mant = std::frexp(std::fabs(x), &exp);  // [0.5, 1)
    // 2*mant in [1, 2): its log2 is the fractional part.
    return make(x < 0 ? Sign::negative : Sign::positive, exp - 1, std::log2(2.0 * mant));
  }

  Sign sign() const noexcept { return sign_; }
  bool is_zero() const noexcept { return sign_ == Sign::zero; }
  bool is_positive() const noexcept { return sign_ == Sign::positive; }
  bool is_negative() const noexcept { return sign_ == Sign::negative; }

  /// Integer part of log2|x|.
  std::int64_t log2_whole() const noexcept { return whole_; }
  /// Fractional part of log2|x|, in [0, 1).
  double log2_frac() const noexcept { return frac_; }
  /// log2|x| as a single double; -inf for zero.
  double log2mag() const noexcept {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(whole_) + frac_;
  }
  /// True when |x| is an exact integral power of two.
  bool is_power_of_two() const noexcept { return !is_zero() && frac_ == 0.0; }

  /// Native value; saturates to +-inf or 0 outside the double range.
  double to_double() const noexcept {
    if (is_zero()) return 0.0;
    const double e = static_cast<double>(whole_);
    if (e > 2000.0) return static_cast<double>(sign_) * std::numeric_limits<double>::infinity();
    if (e < -2000.0) return 0.0 * static_cast<double>(sign_);
    return static_cast<double>(sign_) * std::ldexp(std::exp2(frac_), static_cast<int>(whole_));
  }

  /// Whether the value converts to a normal double without saturation.
  bool in_native_range() const noexcept {
    return is_zero() || (whole_ > -1020 && whole_ < 1020);
  }

  LogReal abs() const noexcept {
    LogReal r = *this;
    if (r.sign_ == Sign::negative) r.sign_ = Sign::positive;
    return r;
  }

  LogReal operator-() const noexcept {
    LogReal r = *this;
    r.sign_ = -r.sign_;
    return r;
  }

  friend LogReal operator*(const LogReal& a, const LogReal& b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return make(a.sign_ * b.sign_, a.whole_ + b.whole_, a.frac_ + b.frac_);
  }

  friend LogReal operator/(const LogReal& a, const LogReal& b) {
    if (b.is_zero()) throw DomainError("LogReal: division by zero");
    if (a.is_zero()) return zero();
    return make(a.sign_ * b.sign_, a.whole_ - b.whole_, a.frac_ - b.frac_);
  }

  friend LogReal operator+(const LogReal& a, const LogReal& b);
  friend LogReal operator-(const LogReal& a, const LogReal& b) { return a + (-b); }

  LogReal& operator+=(const LogReal& o) { return *this = *this + o; }
  LogReal& operator-=(const LogReal& o) { return *this = *this - o; }
  LogReal& operator*=(const LogReal& o) { return *this = *this * o; }
  LogReal& operator/=(const LogReal& o) { return *this = *this / o; }

  /// |x|^p * sign(x) for x > 0 only.
  LogReal pow(double p) const {
    if (is_zero()) {
      if (p > 0) return zero();
      throw DomainError("LogReal: zero to a non-positive power");
    }
    if (!is_positive()) throw DomainError("LogReal: pow of a negative value");
    // whole * p split exactly into a rounded product and its error term.
    const double w = static_cast<double>(whole_);
    const double hi = w * p;
    const double lo = std::fma(w, p, -hi);
    const double hi_floor = std::floor(hi);
    return make(Sign::positive, static_cast<std::int64_t>(hi_floor), (hi - hi_floor) + lo + frac_ * p);
  }

  /// Multiply by 2^e exactly.
  LogReal ldexp(std::int64_t e) const {
    if (is_zero()) return *this;
    LogReal r = *this;
    r.whole_ += e;
    return r;
  }

  /// Exact total order by value.
  friend std::weak_ordering operator<=>(const LogReal& a, const LogReal& b) noexcept {
    const int sa = static_cast<int>(a.sign_);
    const int sb = static_cast<int>(b.sign_);
    if (sa != sb) return sa <=> sb;
    if (sa == 0) return std::weak_ordering::equivalent;
    std::weak_ordering mag = std::weak_ordering::equivalent;
    if (a.whole_ != b.whole_) {
      mag = a.whole_ < b.whole_ ? std::weak_ordering::less : std::weak_ordering::greater;
    } else if (a.frac_ != b.frac_) {
      mag = a.frac_ < b.frac_ ? std::weak_ordering::less : std::weak_ordering::greater;
    }
    if (sa > 0) return mag;
    if (mag == std::weak_ordering::less) return std::weak_ordering::greater;
    if (mag == std::weak_ordering::greater) return std::weak_ordering::less;
    return mag;
  }
  friend bool operator==(const LogReal& a, const LogReal& b) noexcept {
    return (a <=> b) == std::weak_ordering::equivalent;
  }

  /// log2|a| - log2|b| for nonzero operands, computed from the split parts.
  friend double log2_ratio(const LogReal& a, const LogReal& b) noexcept {
    return static_cast<double>(a.whole_ - b.whole_) + (a.frac_ - b.frac_);
  }

 private:
  static LogReal make(Sign sign, std::int64_t whole, double frac) {
    if (!std::isfinite(frac)) throw DomainError("LogReal: non-finite log2 magnitude");
    const double fl = std::floor(frac);
    if (std::fabs(fl) > 9.0e15) throw DomainError("LogReal: log2 magnitude out of range");
    whole += static_cast<std::int64_t>(fl);
    frac -= fl;
    if (frac >= 1.0) {  // floor rounding at the upper edge
      frac -= 1.0;
      ++whole;
    }
    LogReal r;
    r.sign_ = sign;
    r.whole_ = whole;
    r.frac_ = frac;
    return r;
  }

  Sign sign_ = Sign::zero;
  std::int64_t whole_ = 0;
  double frac_ = 0.0;
};

inline LogReal operator+(const LogReal& a, const LogReal& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const bool a_larger = (a.whole_ > b.whole_) || (a.whole_ == b.whole_ && a.frac_ >= b.frac_);
  const LogReal& hi = a_larger ? a : b;
  const LogReal& lo = a_larger ? b : a;
  const double d = log2_ratio(lo, hi);  // <= 0
  if (hi.sign_ == lo.sign_) {
    if (d < -80.0) return hi;
    const double delta = std::log1p(std::exp2(d)) / std::numbers::ln2;
    return LogReal::make(hi.sign_, hi.whole_, hi.frac_ + delta);
  }
  if (d == 0.0) return LogReal::zero();
  if (d < -80.0) return hi;
  // log2(1 - 2^d) through expm1 keeps precision when d is close to 0.
  const double delta = std::log2(-std::expm1(d * std::numbers::ln2));
  return LogReal::make(hi.sign_, hi.whole_, hi.frac_ + delta);
}

inline LogReal log_add(const LogReal& a, const LogReal& b) { return a + b; }

/// Compare by value; magnitudes of like-signed operands whose logarithms
/// differ by at most tol.abs_log2 compare equal.
inline std::weak_ordering log_cmp(const LogReal& a, const LogReal& b, const Tolerance& tol) {
  if (a.sign() != b.sign() || a.is_zero()) return a <=> b;
  if (std::fabs(log2_ratio(a, b)) <= tol.abs_log2) return std::weak_ordering::equivalent;
  return a <=> b;
}

inline LogReal max(const LogReal& a, const LogReal& b) { return a < b ? b : a; }
inline LogReal min(const LogReal& a, const LogReal& b) { return b < a ? b : a; }

/// |a - b| / max(|a|, |b|) as a double; 0 when both are zero.
inline double relative_difference(const LogReal& a, const LogReal& b) {
  const LogReal scale = max(a.abs(), b.abs());
  if (scale.is_zero()) return 0.0;
  return ((a - b).abs() / scale).to_double();
}

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// "0", "+2^<e>" or "-2^<e>".
inline std::string to_log2_string(const LogReal& x) {
  if (x.is_zero()) return "0";
  return std::string(x.is_negative() ? "-" : "+") + "2^" + detail::format_double(x.log2mag());
}

/// Decimal rendering when the value is in native range, log2 form otherwise.
inline std::string to_string(const LogReal& x) {
  if (x.is_zero()) return "0";
  if (x.in_native_range()) return detail::format_double(x.to_double());
  return to_log2_string(x);
}

/// Accepts "0", decimal literals, and "2^e" with optional leading sign.
inline LogReal parse_log_real(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  const std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty number");
  const auto caret = s.find("2^");
  if (caret != std::string_view::npos) {
    Sign sign = Sign::positive;
    std::string_view head = s.substr(0, caret);
    if (head == "-") {
      sign = Sign::negative;
    } else if (!(head.empty() || head == "+")) {
      throw ParseError("malformed power-of-two literal '" + std::string(s) + "'");
    }
    std::string_view exp_text = s.substr(caret + 2);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    double e = 0.0;
    const auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), e);
    if (ec != std::errc() || ptr != exp_text.data() + exp_text.size() || !std::isfinite(e)) {
      throw ParseError("malformed exponent in '" + std::string(s) + "'");
    }
    return LogReal::from_log2(sign, e);
  }
  std::string_view body = s;
  if (body.front() == '+') body.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc() || ptr != body.data() + body.size() || !std::isfinite(v)) {
    throw ParseError("malformed number '" + std::string(s) + "'");
  }
  return LogReal::from_double(v);
}

}  // namespace orlicz
