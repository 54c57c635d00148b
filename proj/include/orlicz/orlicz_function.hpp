#pragma once

/// \file
/// Piecewise-linear Orlicz functions with dyadic breakpoints.
///
/// A nonincreasing positive slope sequence (b_n) defines M by M(0) = 0 and
/// M'(t) = b_n on (2^{-n-1}, 2^{-n}) for n >= 1, M'(t) = b_0 for t > 1/2.
/// Breakpoint values are tail sums M(2^{-n}) = sum_{j >= n} b_j 2^{-j-1}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/log_real.hpp"

namespace orlicz {

class SlopeSequence {
 public:
  enum class Kind { explicit_list, closed_form, counterexample };
  using Accessor = std::function<LogReal(std::size_t)>;

  SlopeSequence(Kind kind, Accessor accessor, std::optional<std::size_t> length_hint,
                std::string description)
      : kind_(kind),
        accessor_(std::move(accessor)),
        length_hint_(length_hint),
        description_(std::move(description)) {}

  /// Finite list; the last entry repeats forever.
  static SlopeSequence list(std::vector<LogReal> values) {
    if (values.empty()) throw DomainError("slope list must not be empty");
    auto shared = std::make_shared<const std::vector<LogReal>>(std::move(values));
    const std::size_t n = shared->size();
    return SlopeSequence(
        Kind::explicit_list,
        [shared](std::size_t i) { return (*shared)[std::min(i, shared->size() - 1)]; }, n,
        "list[" + std::to_string(n) + "]");
  }

  /// b(n) = 2^{-(a n^2 + b n + c)}.
  static SlopeSequence pow2_poly(double a, double b, double c) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "pow2_poly(a=%g,b=%g,c=%g)", a, b, c);
    return SlopeSequence(
        Kind::closed_form,
        [a, b, c](std::size_t i) {
          const double n = static_cast<double>(i);
          // a n^2 is formed exactly for integral a and moderate n.
          return LogReal::from_log2(Sign::positive, -(a * n * n + b * n + c));
        },
        std::nullopt, buf);
  }

  static SlopeSequence constant(LogReal value) {
    return SlopeSequence(
        Kind::closed_form, [value](std::size_t) { return value; }, std::nullopt,
        "constant(" + to_string(value) + ")");
  }

  LogReal operator()(std::size_t n) const { return accessor_(n); }

  Kind kind() const noexcept { return kind_; }
  std::optional<std::size_t> declared_length_hint() const noexcept { return length_hint_; }
  const std::string& description() const noexcept { return description_; }

  /// Checks b(n) > 0 and b(n+1) <= b(n) for n < upto; throws
  /// InvalidSlopeSequence naming the first violating index.
  void validate(std::size_t upto) const {
    LogReal prev;
    for (std::size_t n = 0; n <= upto; ++n) {
      const LogReal cur = (*this)(n);
      if (!cur.is_positive()) throw InvalidSlopeSequence(n, "slope " + to_string(cur) + " is not positive");
      if (n > 0 && prev < cur) {
        throw InvalidSlopeSequence(n, "slope " + to_string(cur) + " exceeds previous slope " + to_string(prev));
      }
      prev = cur;
    }
  }

 private:
  Kind kind_;
  Accessor accessor_;
  std::optional<std::size_t> length_hint_;
  std::string description_;
};

class DyadicOrliczFunction {
 public:
  /// Breakpoint indices checked at construction when the sequence gives no length hint.
  static constexpr std::size_t default_validation_depth = 128;

  DyadicOrliczFunction(SlopeSequence slopes, Tolerance tail_tol = Tolerance(std::ldexp(1.0, -60), 0.0))
      : slopes_(std::move(slopes)), tail_tol_(tail_tol), cache_(std::make_shared<Cache>()) {
    const std::size_t depth = slopes_.declared_length_hint().value_or(default_validation_depth);
    slopes_.validate(std::max<std::size_t>(depth, 1));
  }

  const SlopeSequence& slopes() const noexcept { return slopes_; }
  const Tolerance& tail_tolerance() const noexcept { return tail_tol_; }
  LogReal slope(std::size_t n) const { return slopes_(n); }

  /// M(2^{-n}).
  LogReal breakpoint(std::size_t n) const {
    {
      std::shared_lock lock(cache_->mutex);
      if (auto it = cache_->values.find(n); it != cache_->values.end()) return it->second;
    }
    const LogReal value = tail_sum(n);
    std::unique_lock lock(cache_->mutex);
    return cache_->values.try_emplace(n, value).first->second;
  }

  /// Index of the linear piece containing u > 0: 0 for u > 1/2, otherwise the
  /// n >= 1 with u in (2^{-n-1}, 2^{-n}].
  static std::int64_t segment_of(const LogReal& u) {
    const std::int64_t w = u.log2_whole();
    const std::int64_t n = u.is_power_of_two() ? -w : -w - 1;
    return std::max<std::int64_t>(n, 0);
  }

  /// Left end of piece n: 1/2 for n = 0, else 2^{-n-1}.
  static LogReal segment_left(std::int64_t n) { return LogReal::pow2(-std::max<std::int64_t>(n, 0) - 1); }

  LogReal eval(const LogReal& t) const {
    if (t.is_zero()) return LogReal::zero();
    if (t.is_negative()) throw DomainError("Orlicz function evaluated at a negative argument");
    if (t.is_power_of_two() && t.log2_whole() <= -1) {
      return breakpoint(static_cast<std::size_t>(-t.log2_whole()));
    }
    const std::int64_t n = segment_of(t);
    const LogReal left = segment_left(n);
    return breakpoint(static_cast<std::size_t>(n + 1)) + slope(static_cast<std::size_t>(n)) * (t - left);
  }

  LogReal operator()(const LogReal& t) const { return eval(t); }

  /// The t >= 0 with M(t) = y, solved exactly on the linear piece bracketing y.
  LogReal inverse(const LogReal& y) const {
    if (y.is_zero()) return LogReal::zero();
    if (y.is_negative()) throw DomainError("Orlicz inverse of a negative value");
    const LogReal half_value = breakpoint(1);
    if (half_value < y) return LogReal::pow2(-1) + (y - half_value) / slope(0);
    // Smallest p >= 2 with M(2^{-p}) < y; then y lies on piece p - 1.
    std::size_t lo = 1;  // M(2^{-lo}) >= y
    std::size_t hi = 2;
    while (!(breakpoint(hi) < y)) {
      lo = hi;
      hi *= 2;
      if (hi > (std::size_t{1} << 40)) throw SearchExhausted("Orlicz inverse: value below representable breakpoints");
    }
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (breakpoint(mid) < y) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const std::size_t n = lo;  // y in (M(2^{-n-1}), M(2^{-n})]
    const LogReal base = breakpoint(n + 1);
    return LogReal::pow2(-static_cast<std::int64_t>(n) - 1) + (y - base) / slope(n);
  }

 private:
  struct Cache {
    std::shared_mutex mutex;
    std::unordered_map<std::size_t, LogReal> values;
  };

  // Terms stop once the remainder bound b(J) 2^{-J} drops below tail_tol.rel
  // times the partial sum.
  LogReal tail_sum(std::size_t n) const {
    LogReal sum;
    for (std::size_t j = n;; ++j) {
      const LogReal b = slope(j);
      sum += b.ldexp(-static_cast<std::int64_t>(j) - 1);
      const LogReal remainder_bound = slope(j + 1).ldexp(-static_cast<std::int64_t>(j) - 1);
      if (!(remainder_bound > sum * LogReal::from_double(tail_tol_.rel))) break;
      if (j - n > 1'000'000) throw SearchExhausted("breakpoint tail sum did not converge");
    }
    return sum;
  }

  SlopeSequence slopes_;
  Tolerance tail_tol_;
  std::shared_ptr<Cache> cache_;
};

inline DyadicOrliczFunction make_dyadic_plf(SlopeSequence slopes,
                                            Tolerance tail_tol = Tolerance(std::ldexp(1.0, -60), 0.0)) {
  return DyadicOrliczFunction(std::move(slopes), tail_tol);
}

enum class Trend { increasing, bounded, inconclusive };

inline const char* to_string(Trend t) {
  switch (t) {
    case Trend::increasing: return "increasing";
    case Trend::bounded: return "bounded";
    case Trend::inconclusive: return "inconclusive";
  }
  return "?";
}

struct RatioPoint {
  std::optional<std::int64_t> breakpoint;  // n when t = 2^{-n}
  std::int64_t second_index = 0;           // grid column for two-index scans
  LogReal t;
  LogReal value;
};

/// Result of a ratio scan: scanned points, their extremes, and the tail trend.
struct RatioReport {
  std::vector<RatioPoint> points;
  LogReal infimum;
  LogReal supremum;
  Trend trend = Trend::inconclusive;
  bool approximate = false;
  std::optional<LogReal> slope_bound;  // 2 sup b(m+n)/b(n) (2^{q-1})^m, compute_Cq only
};

namespace detail {

// Classifies the tail of a sequence of positive values.
inline Trend classify_tail(const std::vector<LogReal>& values, double flat_rel = 1e-9) {
  if (values.size() < 4) return Trend::inconclusive;
  const std::size_t w = std::max<std::size_t>(4, values.size() / 4);
  const auto first = values.end() - static_cast<std::ptrdiff_t>(w);
  LogReal lo = *first;
  LogReal hi = *first;
  bool nondecreasing = true;
  for (auto it = first + 1; it != values.end(); ++it) {
    if (log2_ratio(*it, *(it - 1)) < -1e-12) nondecreasing = false;
    lo = min(lo, *it);
    hi = max(hi, *it);
  }
  const double spread = log2_ratio(hi, lo);
  if (spread <= flat_rel) return Trend::bounded;
  if (nondecreasing && log2_ratio(values.back(), *first) > flat_rel) return Trend::increasing;
  return Trend::inconclusive;
}

inline void finish_extremes(RatioReport& r) {
  if (r.points.empty()) return;
  r.infimum = r.points.front().value;
  r.supremum = r.points.front().value;
  for (const auto& p : r.points) {
    r.infimum = min(r.infimum, p.value);
    r.supremum = max(r.supremum, p.value);
  }
}

}  // namespace detail

/// Infimum of M(2^m t) / M(t) over 0 < t <= t_max.
///
/// Both M(t) and M(2^m t) are affine on every dyadic piece, so the ratio is
/// monotone per piece and its infimum over a range sits at the range's
/// breakpoints or at t_max. The scan visits t_max and `depth` breakpoints
/// below it; the trend flag describes the last quarter of the breakpoint
/// values (toward t -> 0). Nothing is asserted about the limit.
inline RatioReport ratio_inf(const DyadicOrliczFunction& M, std::int64_t m, const LogReal& t_max,
                             std::size_t depth = 64) {
  if (m < 1) throw DomainError("ratio_inf: m must be >= 1");
  if (!t_max.is_positive()) throw DomainError("ratio_inf: t_max must be positive");
  RatioReport r;
  r.points.push_back({std::nullopt, 0, t_max, M(t_max.ldexp(m)) / M(t_max)});
  // First breakpoint 2^{-n} <= t_max.
  const std::int64_t n0 = std::max<std::int64_t>(1, -t_max.log2_whole());
  std::vector<LogReal> tail;
  tail.reserve(depth);
  for (std::size_t i = 0; i < depth; ++i) {
    const std::int64_t n = n0 + static_cast<std::int64_t>(i);
    const LogReal t = LogReal::pow2(-n);
    if (t_max < t) continue;
    const LogReal value = M(t.ldexp(m)) / M.breakpoint(static_cast<std::size_t>(n));
    r.points.push_back({n, 0, t, value});
    tail.push_back(value);
  }
  detail::finish_extremes(r);
  r.trend = detail::classify_tail(tail);
  return r;
}

/// Sampling fallback for arbitrary K > 1: log-uniform samples over
/// (t_max 2^{-depth}, t_max]. Marked approximate.
inline RatioReport ratio_inf_sampled(const DyadicOrliczFunction& M, double K, const LogReal& t_max,
                                     std::size_t depth = 64, std::size_t per_octave = 16) {
  if (!(K > 1.0)) throw DomainError("ratio_inf_sampled: K must exceed 1");
  if (!t_max.is_positive()) throw DomainError("ratio_inf_sampled: t_max must be positive");
  RatioReport r;
  r.approximate = true;
  const LogReal k = LogReal::from_double(K);
  std::vector<LogReal> per_octave_min;
  for (std::size_t o = 0; o < depth; ++o) {
    LogReal octave_min;
    for (std::size_t s = 0; s < per_octave; ++s) {
      const double shift = -(static_cast<double>(o) + static_cast<double>(s) / static_cast<double>(per_octave));
      const LogReal t = t_max * LogReal::from_log2(Sign::positive, shift);
      const LogReal value = M(k * t) / M(t);
      r.points.push_back({std::nullopt, 0, t, value});
      octave_min = s == 0 ? value : min(octave_min, value);
    }
    per_octave_min.push_back(octave_min);
  }
  detail::finish_extremes(r);
  r.trend = detail::classify_tail(per_octave_min);
  return r;
}

/// Grid supremum of M(2^{-m-n}) / M(2^{-n}) * 2^{mq} over 1 <= m <= m_max,
/// 1 <= n <= n_max, alongside the slope bound 2 sup b(m+n)/b(n) (2^{q-1})^m.
/// Trend is `bounded` when the supremum over the leading three quarters of
/// both index ranges already equals the full supremum.
inline RatioReport compute_Cq(const DyadicOrliczFunction& M, double q, std::size_t m_max, std::size_t n_max) {
  if (m_max < 1 || n_max < 1) throw DomainError("compute_Cq: ranges must be >= 1");
  if (!(q >= 1.0)) throw DomainError("compute_Cq: q must be >= 1");
  RatioReport r;
  LogReal slope_sup;
  LogReal inner_sup;
  const std::size_t m_inner = (3 * m_max + 3) / 4;
  const std::size_t n_inner = (3 * n_max + 3) / 4;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const LogReal scale = LogReal::from_log2(Sign::positive, static_cast<double>(m) * q);
    const LogReal slope_scale = LogReal::from_log2(Sign::positive, static_cast<double>(m) * (q - 1.0));
    for (std::size_t n = 1; n <= n_max; ++n) {
      const LogReal value = M.breakpoint(m + n) / M.breakpoint(n) * scale;
      r.points.push_back({static_cast<std::int64_t>(m), static_cast<std::int64_t>(n),
                          LogReal::pow2(-static_cast<std::int64_t>(n)), value});
      if (m <= m_inner && n <= n_inner) inner_sup = max(inner_sup, value);
      slope_sup = max(slope_sup, M.slope(m + n) / M.slope(n) * slope_scale);
    }
  }
  detail::finish_extremes(r);
  r.slope_bound = slope_sup * LogReal::from_double(2.0);
  r.trend = (std::fabs(log2_ratio(r.supremum, inner_sup)) <= 1e-9) ? Trend::bounded : Trend::increasing;
  return r;
}

}  // namespace orlicz
