#pragma once

/// \file
/// Finitely supported sequences, the modular, and the Luxemburg norm
/// inf{rho > 0 : sum M(|a_n| / rho) <= 1}.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/log_real.hpp"
#include "orlicz/orlicz_function.hpp"

namespace orlicz {

/// Coordinates relative to the unit-vector basis (e_n), indices from 1.
/// Only nonzero entries are stored.
class FiniteVector {
 public:
  FiniteVector() = default;

  /// Dense coordinates a_1, a_2, ... (zeros dropped).
  static FiniteVector from_dense(std::span<const LogReal> values) {
    FiniteVector v;
    for (std::size_t i = 0; i < values.size(); ++i) v.set(i + 1, values[i]);
    return v;
  }

  static FiniteVector from_dense(std::span<const double> values) {
    FiniteVector v;
    for (std::size_t i = 0; i < values.size(); ++i) v.set(i + 1, LogReal::from_double(values[i]));
    return v;
  }

  static FiniteVector from_dense(std::initializer_list<double> values) {
    return from_dense(std::span<const double>(values.begin(), values.size()));
  }

  /// Unit vector e_n scaled by `value`.
  static FiniteVector unit(std::size_t index, LogReal value = LogReal::one()) {
    FiniteVector v;
    v.set(index, value);
    return v;
  }

  void set(std::size_t index, const LogReal& value) {
    if (index == 0) throw DomainError("FiniteVector indices start at 1");
    if (value.is_zero()) {
      coords_.erase(index);
    } else {
      coords_[index] = value;
    }
  }

  LogReal operator[](std::size_t index) const {
    const auto it = coords_.find(index);
    return it == coords_.end() ? LogReal::zero() : it->second;
  }

  std::size_t support_size() const noexcept { return coords_.size(); }
  bool is_zero() const noexcept { return coords_.empty(); }
  /// Largest index carrying a nonzero entry; 0 for the zero vector.
  std::size_t max_index() const noexcept { return coords_.empty() ? 0 : coords_.rbegin()->first; }

  /// P_n x: the coordinates with index <= n.
  FiniteVector head(std::size_t n) const {
    FiniteVector h;
    for (const auto& [i, a] : coords_) {
      if (i > n) break;
      h.coords_.emplace_hint(h.coords_.end(), i, a);
    }
    return h;
  }

  /// |a_i| in index order.
  std::vector<LogReal> magnitudes() const {
    std::vector<LogReal> out;
    out.reserve(coords_.size());
    for (const auto& [i, a] : coords_) out.push_back(a.abs());
    return out;
  }

  /// Dense copy of a_1..a_n as doubles.
  std::vector<double> to_dense(std::size_t n) const {
    std::vector<double> out(n, 0.0);
    for (const auto& [i, a] : coords_) {
      if (i > n) break;
      out[i - 1] = a.to_double();
    }
    return out;
  }

  auto begin() const { return coords_.begin(); }
  auto end() const { return coords_.end(); }

  friend FiniteVector operator+(const FiniteVector& a, const FiniteVector& b) {
    FiniteVector r = a;
    for (const auto& [i, v] : b.coords_) r.set(i, r[i] + v);
    return r;
  }

  friend FiniteVector operator*(const LogReal& s, const FiniteVector& x) {
    FiniteVector r;
    if (s.is_zero()) return r;
    for (const auto& [i, v] : x.coords_) r.coords_.emplace_hint(r.coords_.end(), i, s * v);
    return r;
  }

  friend bool operator==(const FiniteVector&, const FiniteVector&) = default;

 private:
  std::map<std::size_t, LogReal> coords_;
};

/// The decreasing rearrangement of (|a_n|), packed into indices 1..N.
inline FiniteVector rearrange(const FiniteVector& x) {
  std::vector<LogReal> mags = x.magnitudes();
  std::stable_sort(mags.begin(), mags.end(), [](const LogReal& a, const LogReal& b) { return b < a; });
  return FiniteVector::from_dense(std::span<const LogReal>(mags));
}

/// Sum of M(|a_i| / rho) over magnitudes.
inline LogReal modular_of_magnitudes(const DyadicOrliczFunction& M, std::span<const LogReal> mags,
                                     const LogReal& rho) {
  if (!rho.is_positive()) throw DomainError("modular: rho must be positive");
  LogReal sum;
  for (const auto& a : mags) sum += M(a.abs() / rho);
  return sum;
}

inline LogReal modular(const DyadicOrliczFunction& M, const FiniteVector& x, const LogReal& rho) {
  const auto mags = x.magnitudes();
  return modular_of_magnitudes(M, mags, rho);
}

namespace detail {

inline LogReal geometric_mid(const LogReal& lo, const LogReal& hi) {
  // sqrt(lo * hi) without leaving the split representation.
  const std::int64_t w = lo.log2_whole() + hi.log2_whole();
  const double f = lo.log2_frac() + hi.log2_frac();
  const std::int64_t half_w = w >= 0 ? w / 2 : -((-w + 1) / 2);  // floor(w / 2)
  const double rest = static_cast<double>(w - 2 * half_w);
  return LogReal::from_log2_parts(Sign::positive, half_w, (rest + f) / 2.0);
}

// Solves sum_i M(a_i s) = 1 for s assuming every a_i s stays on the pieces
// `segs` (affine there). Returns rho = 1/s, or zero when the system is degenerate.
inline LogReal solve_on_pieces(const DyadicOrliczFunction& M, std::span<const LogReal> mags,
                               std::span<const std::int64_t> segs) {
  LogReal offset = LogReal::one();  // 1 + sum b_i L_i - sum M(L_i)
  LogReal neg;
  LogReal gain;  // sum b_i a_i
  for (std::size_t i = 0; i < mags.size(); ++i) {
    const auto n = segs[i];
    const LogReal b = M.slope(static_cast<std::size_t>(n));
    const LogReal left = DyadicOrliczFunction::segment_left(n);
    offset += b * left;
    neg += M.breakpoint(static_cast<std::size_t>(n + 1));
    gain += b * mags[i];
  }
  const LogReal numer = offset - neg;
  if (!numer.is_positive() || !gain.is_positive()) return LogReal::zero();
  return gain / numer;
}

}  // namespace detail

/// Luxemburg norm of the magnitudes |a_i| (order irrelevant).
///
/// Brackets rho between max|a|/M^{-1}(1) and max|a|/M^{-1}(1/N) (widened by
/// factors of 2 if rounding leaves the root outside), then bisects
/// in log2(rho). Once every |a_i|/rho stays on one linear piece of M across the
/// bracket, the modular is affine in 1/rho there and the root is solved
/// directly; otherwise bisection stops when the bracket's relative width drops
/// below tol.rel.
inline LogReal luxemburg_norm_of_magnitudes(const DyadicOrliczFunction& M, std::span<const LogReal> input,
                                            const Tolerance& tol = {}) {
  // Sorted nonzero magnitudes: the result depends only on the multiset.
  std::vector<LogReal> mags;
  mags.reserve(input.size());
  for (const auto& a : input) {
    if (!a.is_zero()) mags.push_back(a.abs());
  }
  if (mags.empty()) return LogReal::zero();
  std::sort(mags.begin(), mags.end(), [](const LogReal& a, const LogReal& b) { return b < a; });
  const LogReal amax = mags.front();
  const LogReal one = LogReal::one();
  LogReal lo = amax / M.inverse(one);
  LogReal hi = amax / M.inverse(one / LogReal::from_double(static_cast<double>(mags.size())));
  // Rounding in M(M^{-1}(y)) can push an endpoint just past the root.
  for (int widen = 0; !(modular_of_magnitudes(M, mags, lo) >= one); ++widen) {
    if (widen == 64) throw Error("luxemburg_norm: bracket does not enclose the root");
    lo = lo.ldexp(-1);
  }
  for (int widen = 0; !(modular_of_magnitudes(M, mags, hi) <= one); ++widen) {
    if (widen == 64) throw Error("luxemburg_norm: bracket does not enclose the root");
    hi = hi.ldexp(1);
  }
  if (lo == hi) return lo;

  std::vector<std::int64_t> seg_lo(mags.size());
  std::vector<std::int64_t> seg_hi(mags.size());
  auto pieces = [&](const LogReal& rho, std::vector<std::int64_t>& out) {
    for (std::size_t i = 0; i < mags.size(); ++i) out[i] = DyadicOrliczFunction::segment_of(mags[i] / rho);
  };

  const double width_target = std::log2(1.0 + tol.rel);
  for (int iter = 0; iter < 400; ++iter) {
    pieces(lo, seg_lo);
    pieces(hi, seg_hi);
    if (seg_lo == seg_hi) {
      const LogReal rho = detail::solve_on_pieces(M, mags, seg_lo);
      if (!rho.is_zero()) return min(max(rho, lo), hi);
    }
    if (log2_ratio(hi, lo) <= width_target) break;
    const LogReal mid = detail::geometric_mid(lo, hi);
    if (modular_of_magnitudes(M, mags, mid) > one) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return detail::geometric_mid(lo, hi);
}

inline LogReal luxemburg_norm(const DyadicOrliczFunction& M, const FiniteVector& x, const Tolerance& tol = {}) {
  const auto mags = x.magnitudes();
  return luxemburg_norm_of_magnitudes(M, mags, tol);
}

}  // namespace orlicz
