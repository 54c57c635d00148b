#pragma once

/// \file
/// Equivalent renorming of h_M by
///
///   |||x||| = sup_k eta_k * || (a*_1, ..., a*_k, 0, ...) ||
///
/// where (a*_n) is the decreasing rearrangement and (eta_k) decreases to 1
/// with eta_k > (1 - 1/b_{k+1})^{-1}, b_k = inf{ M(Kt)/M(t) : 0 < t <= M^{-1}(1/k) }.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/log_real.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/sequence_space.hpp"

namespace orlicz {

/// A sequence eta_1 > eta_2 > ... > 1, stored through eta_k - 1 so that values
/// very close to 1 stay distinct.
class EtaSequence {
 public:
  using Excess = std::function<double(std::size_t)>;

  EtaSequence(Excess excess, bool validated, std::size_t validated_through, std::string rule)
      : excess_(std::move(excess)),
        validated_(validated),
        validated_through_(validated_through),
        rule_(std::move(rule)) {}

  /// eta_k = 1 + 2^{-k}, unvalidated.
  static EtaSequence one_plus_pow2() {
    return EtaSequence([](std::size_t k) { return std::ldexp(1.0, -static_cast<int>(k)); }, false, 0,
                       "1 + 2^-k");
  }

  /// Caller-supplied excess k -> eta_k - 1 accepted without validation.
  static EtaSequence unchecked(Excess excess, std::string rule) {
    return EtaSequence(std::move(excess), false, 0, std::move(rule));
  }

  double excess(std::size_t k) const {
    if (k == 0) throw DomainError("eta is indexed from 1");
    return excess_(k);
  }
  double operator()(std::size_t k) const { return 1.0 + excess(k); }

  /// eta_k as a LogReal factor, formed from log1p of the excess.
  LogReal factor(std::size_t k) const {
    return LogReal::from_log2(Sign::positive, std::log1p(excess(k)) / std::numbers::ln2);
  }

  bool validated() const noexcept { return validated_; }
  /// Largest k for which eta_k was checked against its constraint.
  std::size_t validated_through() const noexcept { return validated_through_; }
  const std::string& rule() const noexcept { return rule_; }

 private:
  Excess excess_;
  bool validated_;
  std::size_t validated_through_;
  std::string rule_;
};

/// b_k with the scan that produced it.
struct BkValue {
  LogReal value;
  RatioReport report;
  bool flagged() const noexcept { return report.trend == Trend::inconclusive; }
};

/// b_k = inf{ M(2^m t)/M(t) : 0 < t <= M^{-1}(1/k) }.
inline BkValue compute_bk(const DyadicOrliczFunction& M, std::int64_t m, std::size_t k, std::size_t depth = 64) {
  if (k < 1) throw DomainError("compute_bk: k must be >= 1");
  const LogReal t_max = M.inverse(LogReal::one() / LogReal::from_double(static_cast<double>(k)));
  RatioReport report = ratio_inf(M, m, t_max, depth);
  const LogReal inf = report.infimum;
  return {inf, std::move(report)};
}

/// Options for build_eta.
struct EtaBuildOptions {
  /// Relative growth b_{k_max+1} / b_{ceil((k_max+1)/2)} - 1 below which the
  /// sequence is judged bounded.
  double min_growth = 1e-9;
  /// Optional limiting behaviour of b_k reported by the ratio scan; a bounded
  /// trend is infeasible regardless of growth over the prefix.
  std::optional<Trend> tail_trend;
};

/// Builds eta_k = (1 + 2^{-k}) * max_{k <= j <= k_max} (1 - 1/b_{j+1})^{-1}
/// for k <= k_max, continued by halving the excess at each further index.
///
/// Throws InfeasibleEta when some b_{k+1} <= 1 or when b_k shows no growth
/// over the second half of the scan: a bounded b_k keeps the lower bound away
/// from 1, so no sequence decreasing to 1 can satisfy it.
inline EtaSequence build_eta(const std::function<LogReal(std::size_t)>& bk, std::size_t k_max,
                             const EtaBuildOptions& options = {}) {
  if (k_max < 1) throw DomainError("build_eta: k_max must be >= 1");
  // bound_excess[k] = (1 - 1/b_{k+1})^{-1} - 1 = 1 / (b_{k+1} - 1)
  std::vector<double> bound_excess(k_max + 2, 0.0);
  const LogReal one = LogReal::one();
  for (std::size_t k = 1; k <= k_max; ++k) {
    const LogReal b = bk(k + 1);
    if (!(b > one)) {
      throw InfeasibleEta(k, std::numeric_limits<double>::infinity(),
                          "b_" + std::to_string(k + 1) + " = " + to_string(b) +
                              " <= 1 leaves no admissible eta_" + std::to_string(k));
    }
    bound_excess[k] = (one / (b - one)).to_double();
  }
  const std::size_t mid = (k_max + 2) / 2;
  const LogReal b_last = bk(k_max + 1);
  const LogReal b_mid = bk(mid);
  const bool grows = log2_ratio(b_last, b_mid) > std::log2(1.0 + options.min_growth);
  const bool trend_bounded = options.tail_trend && *options.tail_trend == Trend::bounded;
  if (!grows || trend_bounded) {
    const double bound = 1.0 + bound_excess[k_max];
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", bound);
    throw InfeasibleEta(k_max, bound,
                        "b_k is bounded along the scan (b_" + std::to_string(mid) + " = " + to_string(b_mid) +
                            ", b_" + std::to_string(k_max + 1) + " = " + to_string(b_last) +
                            "), so eta_k > (1 - 1/b_{k+1})^{-1} = " + buf + " at k = " +
                            std::to_string(k_max) + " cannot decrease to 1");
  }
  // Suffix maxima of the bound excess.
  std::vector<double> suffix(k_max + 2, 0.0);
  for (std::size_t k = k_max; k >= 1; --k) suffix[k] = std::max(bound_excess[k], suffix[k + 1]);
  std::vector<double> excess(k_max + 1, 0.0);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double p = std::ldexp(1.0, -static_cast<int>(k));
    excess[k] = p + suffix[k] + p * suffix[k];  // (1 + p)(1 + suffix) - 1
  }
  auto table = std::make_shared<const std::vector<double>>(std::move(excess));
  return EtaSequence(
      [table, k_max](std::size_t k) {
        if (k <= k_max) return (*table)[k];
        return std::ldexp((*table)[k_max], -static_cast<int>(std::min<std::size_t>(k - k_max, 1000)));
      },
      true, k_max, "(1 + 2^-k) max_{j>=k} (1 - 1/b_{j+1})^-1, excess halved beyond k = " + std::to_string(k_max));
}

/// Computed b_k table and the eta sequence built from it.
struct RenormScheme {
  std::int64_t m = 1;
  std::vector<LogReal> bk;  // bk[k] for 1 <= k <= k_max + 1; bk[0] unused
  std::vector<Trend> bk_trend;
  EtaSequence eta;
};

/// compute_bk for k = 1..k_max+1, then build_eta. The last scan's tail trend
/// feeds the feasibility decision.
inline RenormScheme build_renorm_scheme(const DyadicOrliczFunction& M, std::int64_t m, std::size_t k_max,
                                        std::size_t depth = 64) {
  std::vector<LogReal> bk(k_max + 2);
  std::vector<Trend> trend(k_max + 2, Trend::inconclusive);
  for (std::size_t k = 1; k <= k_max + 1; ++k) {
    BkValue v = compute_bk(M, m, k, depth);
    bk[k] = v.value;
    trend[k] = v.report.trend;
  }
  EtaBuildOptions opts;
  opts.tail_trend = trend[k_max + 1];
  EtaSequence eta = build_eta([&bk](std::size_t k) { return bk.at(k); }, k_max, opts);
  return RenormScheme{m, std::move(bk), std::move(trend), std::move(eta)};
}

/// Plain-text block: "m = ...", "eta_rule = ...", "validated_through = ...",
/// then one "b <k> = <value>" line per computed b_k.
inline std::string serialize_scheme(const RenormScheme& scheme) {
  std::string out = "m = " + std::to_string(scheme.m) + "\n";
  out += "eta_rule = " + scheme.eta.rule() + "\n";
  out += "validated_through = " + std::to_string(scheme.eta.validated_through()) + "\n";
  for (std::size_t k = 1; k < scheme.bk.size(); ++k) {
    out += "b " + std::to_string(k) + " = " + to_string(scheme.bk[k]) + "\n";
  }
  return out;
}

struct TripleNorm {
  LogReal value;
  std::size_t attaining_k = 0;  // smallest maximizing k; 0 for the zero vector
};

/// max_{1<=k<=N} eta_k ||(a*_1..a*_k)||; for k >= N every head equals x*, and
/// eta decreasing makes those indices lose, so the finite maximum is exact.
inline TripleNorm triple_norm(const DyadicOrliczFunction& M, const EtaSequence& eta, const FiniteVector& x,
                              const Tolerance& tol = {}) {
  std::vector<LogReal> mags = x.magnitudes();
  std::stable_sort(mags.begin(), mags.end(), [](const LogReal& a, const LogReal& b) { return b < a; });
  TripleNorm best;
  for (std::size_t k = 1; k <= mags.size(); ++k) {
    const LogReal head = luxemburg_norm_of_magnitudes(M, std::span<const LogReal>(mags.data(), k), tol);
    const LogReal value = eta.factor(k) * head;
    if (best.attaining_k == 0 || best.value < value) best = {value, k};
  }
  return best;
}

/// Smallest m >= 0 with |||P_m x||| = |||x||| (basis order, not rearranged).
///
/// |||P_m x||| is nondecreasing in m, so the smallest index is found by
/// bisection over the support indices. Equality is judged in log2 with slack
/// tol.abs_log2 (default 1e-12).
inline std::size_t head_attainment_index(const DyadicOrliczFunction& M, const EtaSequence& eta,
                                         const FiniteVector& x, const Tolerance& tol = Tolerance(1e-13, 1e-12)) {
  if (x.is_zero()) return 0;
  std::vector<std::size_t> idx;
  for (const auto& [i, a] : x) idx.push_back(i);
  const LogReal full = triple_norm(M, eta, x, tol).value;
  auto reaches = [&](std::size_t pos) {
    const LogReal v = triple_norm(M, eta, x.head(idx[pos]), tol).value;
    return log_cmp(v, full, tol) != std::weak_ordering::less;
  };
  std::size_t lo = 0;
  std::size_t hi = idx.size() - 1;  // reaches(hi) holds
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (reaches(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return idx[lo];
}

/// Smallest k with ||x|| <= eta_k ||(a_1..a_k)|| for x positive and
/// nonincreasing on indices 1..N.
inline std::size_t growth_index(const DyadicOrliczFunction& M, const EtaSequence& eta, const FiniteVector& x,
                                const Tolerance& tol = {}) {
  if (x.is_zero()) throw DomainError("growth_index: vector must be nonzero");
  std::vector<LogReal> coords;
  std::size_t expected = 1;
  for (const auto& [i, a] : x) {
    if (i != expected) throw DomainError("growth_index: coordinates must occupy indices 1..N");
    if (!a.is_positive()) throw DomainError("growth_index: coordinates must be positive");
    if (!coords.empty() && coords.back() < a) throw DomainError("growth_index: coordinates must be nonincreasing");
    coords.push_back(a);
    ++expected;
  }
  const LogReal full = luxemburg_norm_of_magnitudes(M, coords, tol);
  for (std::size_t k = 1; k <= coords.size(); ++k) {
    const LogReal head = luxemburg_norm_of_magnitudes(M, std::span<const LogReal>(coords.data(), k), tol);
    if (!(eta.factor(k) * head < full)) return k;
  }
  return coords.size();
}

}  // namespace orlicz
