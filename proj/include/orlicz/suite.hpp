#pragma once

/// \file
/// Command dispatch shared by the orlicz_lab tool and the tests.
///
/// Commands and their report columns:
///   norm            quantity, value, value_log2
///   renorm          k, bk, bk_log2, bk_trend, eta_excess, bound_excess, pass
///   claims          check, i, j, K, lhs_log2, rhs_log2, margin_log2, pass
///   ratio-bound     same as claims
///   probe           k, n_k, t_log2, v_log2, bound_holds, dichotomy_holds
///   cq              m, n, value_log2
///   norming-family  same as claims (rho-lower / rho-upper rows per sample)

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "orlicz/abstract_renorm.hpp"
#include "orlicz/counterexample.hpp"
#include "orlicz/error.hpp"
#include "orlicz/io.hpp"
#include "orlicz/polyhedral_renorm.hpp"
#include "orlicz/report.hpp"

namespace orlicz {

struct SuiteConfig {
  std::string command;
  /// Function specification: a path, or the file contents directly.
  std::optional<std::string> function_path;
  std::optional<std::string> function_text;
  std::optional<std::string> vector_path;
  std::optional<std::string> vector_text;
  std::optional<std::int64_t> m;
  std::optional<std::size_t> depth;
  std::vector<std::int64_t> k_list = {2, 4, 8, 16};
  double q = 2.0;
  std::optional<double> tol;
  std::uint64_t seed = 1;
  std::optional<std::string> out;
  ReportFormat format = ReportFormat::csv;

  static const std::vector<std::string>& commands() {
    static const std::vector<std::string> c = {"norm", "renorm", "claims", "ratio-bound", "probe", "cq", "norming-family"};
    return c;
  }

  void validate() const {
    if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
      throw ParseError("unknown command '" + command + "'");
    }
    if (depth && *depth < 1) throw ParseError("--depth must be positive");
    if (m && *m < 0) throw ParseError("--m must be nonnegative");
    if (!(q >= 1.0)) throw ParseError("--q must be >= 1");
    if (tol && !(*tol > 0.0)) throw ParseError("--tol must be positive");
    for (const auto K : k_list) {
      if (K < 2 || (K & (K - 1)) != 0) throw ParseError("--k-list entries must be powers of two >= 2");
    }
  }
};

namespace detail {

inline std::optional<FunctionSpec> load_function(const SuiteConfig& cfg) {
  if (cfg.function_text) return parse_function_spec(*cfg.function_text);
  if (cfg.function_path) return parse_function_spec(read_file(*cfg.function_path));
  return std::nullopt;
}

inline FunctionSpec require_function(const SuiteConfig& cfg) {
  auto spec = load_function(cfg);
  if (!spec) throw ParseError("command '" + cfg.command + "' needs --function");
  return *spec;
}

inline FiniteVector require_vector(const SuiteConfig& cfg) {
  if (cfg.vector_text) return parse_vector(*cfg.vector_text);
  if (cfg.vector_path) return parse_vector(read_file(*cfg.vector_path));
  throw ParseError("command '" + cfg.command + "' needs --vector");
}

inline CounterexampleSequences counterexample_from(const SuiteConfig& cfg, std::size_t depth) {
  CounterexampleOptions opts;
  if (auto spec = load_function(cfg)) {
    if (spec->kind != FunctionSpec::Kind::counterexample) {
      throw ParseError("command '" + cfg.command + "' needs a counterexample function");
    }
    opts.c_factor = spec->c_factor;
  }
  opts.validate = false;
  return CounterexampleSequences(depth, opts);
}

inline Tolerance tolerance_from(const SuiteConfig& cfg, Tolerance fallback) {
  if (cfg.tol) return Tolerance(*cfg.tol, fallback.abs_log2);
  return fallback;
}

inline Report run_norm(const SuiteConfig& cfg) {
  const DyadicOrliczFunction M = require_function(cfg).make();
  const FiniteVector x = require_vector(cfg);
  const Tolerance tol = tolerance_from(cfg, {});
  Report r{"norm", {"quantity", "value", "value_log2"}, {}, {}, 0, ""};
  const LogReal n = luxemburg_norm(M, x, tol);
  const LogReal nr = luxemburg_norm(M, rearrange(x), tol);
  r.rows.push_back({"luxemburg_norm", to_string(n), fmt_log2(n)});
  r.rows.push_back({"rearranged_norm", to_string(nr), fmt_log2(nr)});
  if (!n.is_zero()) {
    const LogReal mod = modular(M, x, n);
    r.rows.push_back({"modular_at_norm", to_string(mod), fmt_log2(mod)});
  }
  r.summary.emplace_back("support_size", std::to_string(x.support_size()));
  r.summary.emplace_back("norm", to_string(n));
  return r;
}

inline Report run_renorm(const SuiteConfig& cfg) {
  const DyadicOrliczFunction M = require_function(cfg).make();
  const std::int64_t m = cfg.m.value_or(1);
  const std::size_t k_max = cfg.depth.value_or(40);
  const RenormScheme scheme = build_renorm_scheme(M, m, k_max);
  Report r{"renorm", {"k", "bk", "bk_log2", "bk_trend", "eta_excess", "bound_excess", "pass"}, {}, {}, 0, ""};
  const LogReal one = LogReal::one();
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double bound = (one / (scheme.bk[k + 1] - one)).to_double();
    const double excess = scheme.eta.excess(k);
    const bool pass = excess > bound && (k == 1 || excess < scheme.eta.excess(k - 1));
    if (!pass) ++r.failures;
    r.rows.push_back({std::to_string(k), to_string(scheme.bk[k]), fmt_log2(scheme.bk[k]), to_string(scheme.bk_trend[k]),
                      fmt(excess), fmt(bound), pass ? "1" : "0"});
  }
  r.summary.emplace_back("m", std::to_string(m));
  r.summary.emplace_back("eta_rule", scheme.eta.rule());
  r.summary.emplace_back("validated_through", std::to_string(scheme.eta.validated_through()));
  return r;
}

inline Report run_claims(const SuiteConfig& cfg) {
  const std::size_t j_max = cfg.depth.value_or(40);
  const auto seqs = counterexample_from(cfg, j_max);
  const CheckReport checks = verify_claims(seqs, j_max, cfg.k_list, cfg.tol.value_or(1e-9));
  Report r{"claims", {}, {}, checks.summary, 0, ""};
  append_checks(r, checks);
  return r;
}

inline Report run_ratio_bound(const SuiteConfig& cfg) {
  const std::size_t n_max = cfg.depth.value_or(12);
  const auto seqs = counterexample_from(cfg, n_max + 1);
  const DyadicOrliczFunction M = counterexample_function(seqs);
  Report r{"ratio-bound", {}, {}, {}, 0, ""};
  const std::int64_t m_lo = cfg.m.value_or(0);
  const std::int64_t m_hi = cfg.m.value_or(6);
  for (std::int64_t m = m_lo; m <= m_hi; ++m) {
    const CheckReport checks = ratio_bound_check(M, seqs, m, n_max, cfg.tol.value_or(1e-9));
    append_checks(r, checks);
    for (const auto& [k, v] : checks.summary) r.summary.emplace_back(k + "_m" + std::to_string(m), v);
  }
  return r;
}

inline Report run_probe(const SuiteConfig& cfg) {
  const std::size_t depth = cfg.depth.value_or(30);
  const DyadicOrliczFunction M = require_function(cfg).make();
  const EtaSequence eta = EtaSequence::one_plus_pow2();
  const ProbeReport p =
      attainment_failure_probe(M, eta, depth, [](std::uint64_t n) { return CounterexampleSequences::t(n); },
                               std::nullopt, tolerance_from(cfg, Tolerance(1e-13, 1e-12)));
  Report r{"probe", {"k", "n_k", "t_log2", "v_log2", "bound_holds", "dichotomy_holds"}, {}, {}, 0, ""};
  for (std::size_t k = 0; k < depth; ++k) {
    const bool bound = p.trace.bound_holds[k];
    const bool dich = k == 0 || p.trace.dichotomy_holds[k - 1];
    if (!bound || !dich) ++r.failures;
    r.rows.push_back({std::to_string(k + 1), std::to_string(p.trace.n[k]), fmt_log2(p.trace.t_values[k]),
                      fmt_log2(p.v[k]), bound ? "1" : "0", dich ? "1" : "0"});
  }
  std::string trend = "neither";
  if (p.strictly_increasing) {
    trend = "strictly-increasing";
  } else if (p.stabilized()) {
    trend = "stabilized-at-" + std::to_string(*p.stabilized_at);
  }
  r.summary.emplace_back("alpha_log2", fmt_log2(p.alpha_threshold));
  r.summary.emplace_back("alpha_rescales", std::to_string(p.alpha_rescales));
  r.summary.emplace_back("trend", trend);
  r.summary.emplace_back("depth", std::to_string(depth));
  return r;
}

inline Report run_cq(const SuiteConfig& cfg) {
  const DyadicOrliczFunction M = require_function(cfg).make();
  const std::size_t n = cfg.depth.value_or(30);
  const RatioReport rep = compute_Cq(M, cfg.q, n, n);
  Report r{"cq", {"m", "n", "value_log2"}, {}, {}, 0, ""};
  for (const auto& pt : rep.points) {
    r.rows.push_back({std::to_string(pt.breakpoint.value_or(0)), std::to_string(pt.second_index), fmt_log2(pt.value)});
  }
  r.summary.emplace_back("q", fmt(cfg.q));
  r.summary.emplace_back("sup_log2", fmt_log2(rep.supremum));
  if (rep.slope_bound) r.summary.emplace_back("slope_bound_log2", fmt_log2(*rep.slope_bound));
  r.summary.emplace_back("trend", to_string(rep.trend));
  return r;
}

/// |||.||| restricted to the span of e_1..e_j, as a function of dense coordinates.
inline SectionNorm triple_norm_section(const DyadicOrliczFunction& M, const EtaSequence& eta, const Tolerance& tol) {
  return [&M, eta, tol](std::span<const double> p) {
    return triple_norm(M, eta, FiniteVector::from_dense(p), tol).value.to_double();
  };
}

inline Report run_norming_family(const SuiteConfig& cfg) {
  const DyadicOrliczFunction M = require_function(cfg).make();
  const std::size_t J = cfg.depth.value_or(3);
  const EtaSequence eta = EtaSequence::one_plus_pow2();
  const Tolerance tol = tolerance_from(cfg, {});
  const NormingFamily family = NormingFamily::build(
      [&](std::size_t) { return triple_norm_section(M, eta, tol); }, J,
      [](std::size_t j) { return std::ldexp(1.0, -static_cast<int>(j) - 1); },
      [](std::size_t j) { return std::ldexp(1.0, -static_cast<int>(j)); }, cfg.seed);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  CheckReport checks;
  for (std::int64_t s = 1; s <= 200; ++s) {
    std::vector<double> p(J);
    for (auto& c : p) c = unif(rng);
    const FiniteVector x = FiniteVector::from_dense(std::span<const double>(p));
    if (x.is_zero()) continue;
    const LogReal nx = triple_norm(M, eta, x, tol).value;
    const LogReal rho = rho_eval(family, x);
    checks.rows.push_back(detail::leq_row("rho-lower", s, static_cast<std::int64_t>(J), 0, nx, rho, 1e-12));
    checks.rows.push_back(
        detail::leq_row("rho-upper", s, static_cast<std::int64_t>(J), 0, rho, LogReal::from_double(2.0) * nx, 1e-12));
  }
  Report r{"norming-family", {}, {}, {}, 0, ""};
  append_checks(r, checks);
  for (std::size_t j = 1; j <= J; ++j) {
    r.summary.emplace_back("level" + std::to_string(j) + "_functionals",
                           std::to_string(family.level(j).functionals.size()));
  }
  r.summary.emplace_back("seed", std::to_string(cfg.seed));
  return r;
}

}  // namespace detail

/// Runs the configured command. Throws ParseError on bad input and
/// InfeasibleEta when renorm cannot build eta.
inline Report run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  if (cfg.command == "norm") return detail::run_norm(cfg);
  if (cfg.command == "renorm") return detail::run_renorm(cfg);
  if (cfg.command == "claims") return detail::run_claims(cfg);
  if (cfg.command == "ratio-bound") return detail::run_ratio_bound(cfg);
  if (cfg.command == "probe") return detail::run_probe(cfg);
  if (cfg.command == "cq") return detail::run_cq(cfg);
  return detail::run_norming_family(cfg);
}

}  // namespace orlicz
