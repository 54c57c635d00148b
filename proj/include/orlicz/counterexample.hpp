#pragma once

/// \file
/// The slope sequence of a c_0-saturated Orlicz space whose sup-of-heads
/// renormings never attain on finite heads, together with checks of its
/// defining inequalities and a greedy probe of norm attainment.
///
/// Sequences:
///   alpha_0 = alpha_1 = alpha_2 = 1,  alpha_j = (e/j)^j for j >= 3
///   c_0 = 1,  c_{j+1} = alpha_j alpha_{2j^2} c_j
///   s_n = n(n+1)/2,  t_n = 2^{-s_n}
///   b_0 = c_0, b_1 = c_1, b_{s_n + k} = c_{n+1} / alpha_{n+1-k}  (n >= 1, 1 <= k <= n+1)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orlicz/error.hpp"
#include "orlicz/log_real.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/polyhedral_renorm.hpp"
#include "orlicz/sequence_space.hpp"

namespace orlicz {

struct CounterexampleOptions {
  /// Multiplier applied at every step of the c recursion. 1 reproduces the
  /// construction; values above 1 break it (used for mutation tests).
  double c_factor = 1.0;
  LogReal c0 = LogReal::one();
  /// Check the sequence invariants up to the generation depth.
  bool validate = true;
};

class CounterexampleSequences {
 public:
  explicit CounterexampleSequences(std::size_t depth, CounterexampleOptions options = {})
      : depth_(depth), options_(options), memo_(std::make_shared<Memo>()) {
    if (depth < 1) throw DomainError("gen_sequences: depth must be >= 1");
    if (!(options_.c_factor > 0.0)) throw DomainError("gen_sequences: c_factor must be positive");
    if (options_.validate) validate();
  }

  std::size_t depth() const noexcept { return depth_; }
  const CounterexampleOptions& options() const noexcept { return options_; }

  static LogReal alpha(std::size_t j) {
    if (j <= 2) return LogReal::one();
    const double jd = static_cast<double>(j);
    return LogReal::from_log2(Sign::positive, jd * (std::numbers::log2e - std::log2(jd)));
  }

  LogReal c(std::size_t j) const {
    std::lock_guard lock(memo_->mutex);
    auto& cs = memo_->c;
    if (cs.empty()) cs.push_back(options_.c0);
    const LogReal factor = LogReal::from_double(options_.c_factor);
    while (cs.size() <= j) {
      const std::size_t i = cs.size() - 1;
      cs.push_back(factor * alpha(i) * alpha(2 * i * i) * cs.back());
    }
    return cs[j];
  }

  static std::uint64_t s(std::uint64_t n) { return n * (n + 1) / 2; }
  static LogReal t(std::uint64_t n) { return LogReal::pow2(-static_cast<std::int64_t>(s(n))); }

  /// (n, k) with i = s_n + k, n >= 1, 1 <= k <= n + 1; defined for i >= 2.
  static std::pair<std::uint64_t, std::uint64_t> representation(std::uint64_t i) {
    if (i < 2) throw DomainError("b index " + std::to_string(i) + " has no (n, k) representation");
    auto n = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(i) + 1.0) - 1.0) / 2.0);
    while (n > 1 && s(n) >= i) --n;
    while (s(n + 1) < i) ++n;
    if (n < 1) n = 1;
    return {n, i - s(n)};
  }

  LogReal b(std::size_t i) const {
    if (i == 0) return c(0);
    if (i == 1) return c(1);
    const auto [n, k] = representation(i);
    return c(n + 1) / alpha(n + 1 - k);
  }

  SlopeSequence slopes() const {
    auto self = *this;
    return SlopeSequence(
        SlopeSequence::Kind::counterexample, [self](std::size_t i) { return self.b(i); }, std::nullopt,
        "counterexample");
  }

  /// Invariants up to the generation depth; throws on the first violation.
  void validate() const {
    for (std::size_t j = 3; j < depth_; ++j) {
      if (alpha(j + 1) > alpha(j)) throw Error("alpha not nonincreasing at j = " + std::to_string(j));
    }
    for (std::size_t j = 0; j < depth_; ++j) {
      if (!c(j).is_positive()) throw Error("c not positive at j = " + std::to_string(j));
      if (c(j + 1) > c(j)) throw Error("c not nonincreasing at j = " + std::to_string(j));
    }
  }

 private:
  struct Memo {
    std::mutex mutex;
    std::vector<LogReal> c;
  };

  std::size_t depth_;
  CounterexampleOptions options_;
  std::shared_ptr<Memo> memo_;
};

inline CounterexampleSequences gen_sequences(std::size_t depth, CounterexampleOptions options = {}) {
  return CounterexampleSequences(depth, options);
}

/// M built from the counterexample slopes.
inline DyadicOrliczFunction counterexample_function(const CounterexampleSequences& seqs) {
  return DyadicOrliczFunction(seqs.slopes());
}

/// One checked inequality lhs <= rhs; margin = log2(rhs) - log2(lhs).
struct CheckRow {
  std::string check;
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t K = 0;
  LogReal lhs;
  LogReal rhs;
  double margin_log2 = 0.0;
  bool pass = true;
};

struct CheckReport {
  std::vector<CheckRow> rows;
  std::vector<std::pair<std::string, std::string>> summary;
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.pass; }));
  }
  /// First failing row of a check, if any.
  std::optional<CheckRow> first_failure(const std::string& check) const {
    for (const auto& r : rows) {
      if (!r.pass && r.check == check) return r;
    }
    return std::nullopt;
  }
};

namespace detail {

inline double log2_or_neg_inf(const LogReal& x) { return x.is_zero() ? -INFINITY : x.log2mag(); }

/// Row for lhs <= rhs with log2 slack.
inline CheckRow leq_row(std::string check, std::int64_t i, std::int64_t j, std::int64_t K, const LogReal& lhs,
                        const LogReal& rhs, double slack) {
  CheckRow r{std::move(check), i, j, K, lhs, rhs, 0.0, true};
  if (lhs.is_zero() || rhs.is_zero()) {
    r.margin_log2 = lhs.is_zero() ? INFINITY : -INFINITY;
    r.pass = !(rhs < lhs);
  } else {
    r.margin_log2 = log2_ratio(rhs, lhs);
    r.pass = r.margin_log2 >= -slack;
  }
  return r;
}

/// Row for |log2 lhs - log2 rhs| <= slack.
inline CheckRow eq_row(std::string check, std::int64_t i, std::int64_t j, std::int64_t K, const LogReal& lhs,
                       const LogReal& rhs, double slack) {
  CheckRow r{std::move(check), i, j, K, lhs, rhs, log2_ratio(rhs, lhs), true};
  r.pass = std::fabs(r.margin_log2) <= slack;
  return r;
}

}  // namespace detail

/// Checks of the slope sequence on indices up to j_max:
///  claim1: b_j <= b_i for all i < j <= j_max;
///  claim2: b_{m+n} <= alpha_m b_n for m >= 0, n >= 2, m + n <= j_max;
///  claim3: sup b_{m+n}/b_n K^m over m + n <= j_max against
///    max(sup_m alpha_m K^m, max(b_0, b_1 K, chain bounds) / min(b_0, b_1)); plus
///    claim3-chain: b_{s_i+k} K^{s_i+k} <= alpha_{2i^2} c_i K^{s_i+i+1},
///    claim3-decay: max_k b_{s_i+k} K^{s_i+k} strictly decreasing over the
///      second half of the scanned i,
///    claim3-alphaK: alpha_m K^m peaks before m = j_max and decreases after,
///    claim3-via2: sup_{n>=2} b_{m+n}/b_n K^m <= sup_m alpha_m K^m.
inline CheckReport verify_claims(const CounterexampleSequences& seqs, std::size_t j_max,
                                 const std::vector<std::int64_t>& K_list, double slack = 1e-9) {
  if (j_max < 3) throw DomainError("verify_claims: j_max must be >= 3");
  CheckReport rep;
  const auto J = static_cast<std::int64_t>(j_max);
  std::vector<LogReal> b(j_max + 1);
  for (std::size_t i = 0; i <= j_max; ++i) b[i] = seqs.b(i);

  for (std::int64_t i = 0; i <= J; ++i) {
    for (std::int64_t j = i + 1; j <= J; ++j) rep.rows.push_back(detail::leq_row("claim1", i, j, 0, b[j], b[i], slack));
  }
  for (std::int64_t n = 2; n <= J; ++n) {
    for (std::int64_t m = 0; m + n <= J; ++m) {
      rep.rows.push_back(
          detail::leq_row("claim2", m, n, 0, b[m + n], CounterexampleSequences::alpha(m) * b[n], slack));
    }
  }

  for (const std::int64_t K : K_list) {
    if (K < 2 || (K & (K - 1)) != 0) throw DomainError("verify_claims: K must be a power of two >= 2");
    const auto log2K = static_cast<std::int64_t>(std::llround(std::log2(static_cast<double>(K))));
    auto powK = [log2K](std::int64_t e) { return LogReal::pow2(log2K * e); };

    // Grid supremum, and its part over n >= 2.
    LogReal sup;
    LogReal sup_n2;
    for (std::int64_t n = 0; n <= J; ++n) {
      for (std::int64_t m = 0; m + n <= J; ++m) {
        const LogReal v = b[m + n] / b[n] * powK(m);
        sup = max(sup, v);
        if (n >= 2) sup_n2 = max(sup_n2, v);
      }
    }

    // alpha_m K^m: bounded with a peak inside the range.
    LogReal alpha_sup;
    std::int64_t argmax = 0;
    std::vector<LogReal> ak;
    for (std::int64_t m = 0; m <= J; ++m) {
      ak.push_back(CounterexampleSequences::alpha(static_cast<std::size_t>(m)) * powK(m));
      if (alpha_sup < ak.back()) {
        alpha_sup = ak.back();
        argmax = m;
      }
    }
    {
      CheckRow r{"claim3-alphaK", argmax, J, K, ak.back(), alpha_sup, log2_ratio(alpha_sup, ak.back()), true};
      r.pass = argmax < J;
      for (std::int64_t m = argmax + 1; m <= J; ++m) r.pass = r.pass && ak[m] < ak[m - 1];
      rep.rows.push_back(r);
    }
    rep.rows.push_back(detail::leq_row("claim3-via2", 2, J, K, sup_n2, alpha_sup, slack));

    // b_{s_i+k} K^{s_i+k} against alpha_{2i^2} c_i K^{s_i+i+1}, over every
    // block that meets the range; block maxima of complete blocks feed the
    // decay check.
    std::vector<LogReal> block_max;
    LogReal chain_sup;
    for (std::uint64_t i = 1; CounterexampleSequences::s(i) + 1 <= j_max; ++i) {
      const LogReal bound = CounterexampleSequences::alpha(2 * i * i) * seqs.c(i) *
                            powK(static_cast<std::int64_t>(CounterexampleSequences::s(i) + i + 1));
      chain_sup = max(chain_sup, bound);
      LogReal bm;
      for (std::uint64_t k = 1; k <= i + 1 && CounterexampleSequences::s(i) + k <= j_max; ++k) {
        const std::uint64_t idx = CounterexampleSequences::s(i) + k;
        const LogReal lhs = b[idx] * powK(static_cast<std::int64_t>(idx));
        bm = max(bm, lhs);
        rep.rows.push_back(detail::leq_row("claim3-chain", static_cast<std::int64_t>(i), static_cast<std::int64_t>(k),
                                           K, lhs, bound, slack));
      }
      if (CounterexampleSequences::s(i) + i + 1 <= j_max) block_max.push_back(bm);
    }
    {
      const std::size_t from = block_max.size() / 2;
      bool decreasing = block_max.size() >= 2;
      for (std::size_t i = std::max<std::size_t>(from, 1); i < block_max.size(); ++i) {
        decreasing = decreasing && block_max[i] < block_max[i - 1];
      }
      const LogReal first = block_max.empty() ? LogReal::zero() : block_max[from];
      const LogReal last = block_max.empty() ? LogReal::zero() : block_max.back();
      CheckRow r{"claim3-decay", static_cast<std::int64_t>(from + 1), static_cast<std::int64_t>(block_max.size()), K,
                 last, first, first.is_zero() || last.is_zero() ? 0.0 : log2_ratio(first, last), decreasing};
      rep.rows.push_back(r);
    }

    // n >= 2 terms are covered by alpha_m K^m; for n <= 1 the term is at most
    // b_j K^j / min(b_0, b_1), bounded by b_0, b_1 K and the chain.
    const LogReal small_n = max(max(b[0], b[1] * powK(1)), chain_sup) / min(b[0], b[1]);
    rep.rows.push_back(detail::leq_row("claim3", 0, J, K, sup, max(alpha_sup, small_n), slack));
    rep.summary.emplace_back("claim3_sup_K" + std::to_string(K), to_log2_string(sup));
  }
  rep.summary.emplace_back("rows", std::to_string(rep.rows.size()));
  rep.summary.emplace_back("failures", std::to_string(rep.failures()));
  return rep;
}

/// For m < n <= n_max: M(2^m t_n) / M(t_n) <= 2^{m+1} / alpha_m, the ratio is
/// at least 1, and b_{s_n - m} = c_n / alpha_m.
inline CheckReport ratio_bound_check(const DyadicOrliczFunction& M, const CounterexampleSequences& seqs, std::int64_t m,
                                     std::size_t n_max, double slack = 1e-9) {
  if (m < 0) throw DomainError("ratio_bound_check: m must be >= 0");
  if (static_cast<std::int64_t>(n_max) <= m) throw DomainError("ratio_bound_check: n_max must exceed m");
  CheckReport rep;
  const LogReal alpha_m = CounterexampleSequences::alpha(static_cast<std::size_t>(m));
  const LogReal bound = LogReal::pow2(m + 1) / alpha_m;
  LogReal worst;
  for (auto n = static_cast<std::uint64_t>(m + 1); n <= n_max; ++n) {
    const auto sn = static_cast<std::int64_t>(CounterexampleSequences::s(n));
    const LogReal ratio = M.breakpoint(static_cast<std::size_t>(sn - m)) / M.breakpoint(static_cast<std::size_t>(sn));
    worst = max(worst, ratio);
    rep.rows.push_back(detail::leq_row("ratio-bound", m, static_cast<std::int64_t>(n), 0, ratio, bound, slack));
    rep.rows.push_back(detail::leq_row("ratio-at-least-1", m, static_cast<std::int64_t>(n), 0, LogReal::one(), ratio, slack));
    rep.rows.push_back(detail::eq_row("slope-identity", m, static_cast<std::int64_t>(n), 0,
                                      M.slope(static_cast<std::size_t>(sn - m)), seqs.c(n) / alpha_m, slack));
  }
  rep.summary.emplace_back("m", std::to_string(m));
  rep.summary.emplace_back("max_ratio", to_log2_string(worst));
  rep.summary.emplace_back("bound", to_log2_string(bound));
  rep.summary.emplace_back("failures", std::to_string(rep.failures()));
  return rep;
}

/// The greedy index sequence and its per-step data.
struct GreedyTrace {
  LogReal alpha_threshold;
  std::vector<std::uint64_t> n;      // n_1 <= n_2 <= ...
  std::vector<LogReal> values;       // |||sum_{j<=k} t_{n_j} e_j|||
  std::vector<bool> bound_holds;     // eta_k * values[k] <= alpha
  std::vector<bool> dichotomy_holds; // implication checked between steps k and k+1
  bool stabilized = false;           // n_k constant over the second half
  FiniteVector x() const;
  std::vector<LogReal> t_values;     // t_{n_k}
};

inline FiniteVector GreedyTrace::x() const {
  FiniteVector v;
  for (std::size_t k = 0; k < t_values.size(); ++k) v.set(k + 1, t_values[k]);
  return v;
}

/// n_1 = min{n : eta_1 |||t_n e_1||| <= alpha},
/// n_{k+1} = min{n >= n_k : eta_{k+1} |||S_k + t_n e_{k+1}||| <= alpha}.
///
/// The predicate is monotone in n (t decreasing, the norm monotone in each
/// |coordinate|), so each minimum is found by galloping then bisection. The
/// search gives up after `search_cap` indices past n_k.
inline GreedyTrace greedy_nk(const DyadicOrliczFunction& M, const EtaSequence& eta, const LogReal& alpha,
                             const std::function<LogReal(std::uint64_t)>& t_seq, std::size_t depth,
                             std::uint64_t search_cap = 4096, const Tolerance& tol = {}) {
  if (!alpha.is_positive()) throw DomainError("greedy_nk: alpha must be positive");
  GreedyTrace tr;
  tr.alpha_threshold = alpha;
  FiniteVector S;
  std::uint64_t prev = 1;
  auto with = [&](std::size_t k, std::uint64_t n) {
    FiniteVector v = S;
    v.set(k, t_seq(n));
    return v;
  };
  for (std::size_t k = 1; k <= depth; ++k) {
    const LogReal eta_k = eta.factor(k);
    auto ok = [&](std::uint64_t n) { return !(alpha < eta_k * triple_norm(M, eta, with(k, n), tol).value); };
    std::uint64_t lo = prev;
    std::uint64_t hi = prev;
    if (!ok(lo)) {
      std::uint64_t step = 1;
      while (true) {
        lo = hi;
        hi = prev + step;
        if (hi - prev > search_cap) {
          throw SearchExhausted("greedy_nk: no admissible n within " + std::to_string(search_cap) +
                                " indices of n_" + std::to_string(k - 1) + " (t_seq not null?)");
        }
        if (ok(hi)) break;
        step *= 2;
      }
      while (hi - lo > 1) {  // ok(hi), !ok(lo)
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (ok(mid)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
    }
    const std::uint64_t chosen = hi;
    // Dichotomy: eta_k (|||S_{k-1}||| + |||t_{n_{k-1}} e_k|||) <= alpha forces n_k = n_{k-1}.
    if (k > 1) {
      const LogReal lhs = eta_k * (tr.values.back() + triple_norm(M, eta, FiniteVector::unit(k, t_seq(prev)), tol).value);
      tr.dichotomy_holds.push_back(!(lhs <= alpha) || chosen == prev);
    }
    S.set(k, t_seq(chosen));
    const LogReal v = triple_norm(M, eta, S, tol).value;
    tr.n.push_back(chosen);
    tr.t_values.push_back(t_seq(chosen));
    tr.values.push_back(v);
    tr.bound_holds.push_back(!(alpha < eta_k * v));
    prev = chosen;
  }
  const std::size_t half = tr.n.size() / 2;
  tr.stabilized = tr.n.size() >= 2 && std::all_of(tr.n.begin() + static_cast<std::ptrdiff_t>(half), tr.n.end(),
                                                  [&](std::uint64_t v) { return v == tr.n.back(); });
  return tr;
}

struct ProbeReport {
  LogReal alpha_threshold;
  GreedyTrace trace;
  std::vector<LogReal> v;  // v_k = |||head_k(x)|||, k = 1..depth
  bool strictly_increasing = false;
  std::optional<std::size_t> stabilized_at;  // smallest m with v_m = v_depth
  bool stabilized() const { return stabilized_at && (*stabilized_at < v.size() || v.size() == 1); }
  std::size_t alpha_rescales = 0;
};

/// Runs greedy_nk with alpha = 2 eta_1 |||t_1 e_1||| (doubled while the search
/// cap trips), then reports whether v_k = |||head_k(x)||| keeps increasing up to
/// `depth` or settles earlier.
inline ProbeReport attainment_failure_probe(
    const DyadicOrliczFunction& M, const EtaSequence& eta, std::size_t depth,
    const std::function<LogReal(std::uint64_t)>& t_seq = [](std::uint64_t n) { return CounterexampleSequences::t(n); },
    std::optional<LogReal> alpha_override = std::nullopt, const Tolerance& tol = Tolerance(1e-13, 1e-12)) {
  if (depth < 1) throw DomainError("attainment_failure_probe: depth must be >= 1");
  ProbeReport rep;
  LogReal alpha = alpha_override.value_or(LogReal::from_double(2.0) * eta.factor(1) *
                                          triple_norm(M, eta, FiniteVector::unit(1, t_seq(1)), tol).value);
  for (;;) {
    try {
      rep.trace = greedy_nk(M, eta, alpha, t_seq, depth, 4096, tol);
      break;
    } catch (const SearchExhausted&) {
      if (++rep.alpha_rescales > 8) throw;
      alpha = alpha * LogReal::from_double(2.0);
    }
  }
  rep.alpha_threshold = alpha;
  const FiniteVector x = rep.trace.x();
  for (std::size_t k = 1; k <= depth; ++k) rep.v.push_back(triple_norm(M, eta, x.head(k), tol).value);
  rep.strictly_increasing = rep.v.size() >= 2;
  for (std::size_t k = 1; k < rep.v.size(); ++k) {
    if (log_cmp(rep.v[k], rep.v[k - 1], tol) != std::weak_ordering::greater) rep.strictly_increasing = false;
  }
  for (std::size_t m = 1; m <= depth; ++m) {
    if (log_cmp(rep.v[m - 1], rep.v.back(), tol) == std::weak_ordering::equivalent) {
      rep.stabilized_at = m;
      break;
    }
  }
  return rep;
}

}  // namespace orlicz
