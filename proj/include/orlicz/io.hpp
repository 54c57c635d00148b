#pragma once

/// \file
/// Plain-text inputs: function specifications and vectors.
///
/// Function files are "key = value" lines; '#' starts a comment.
///
///   kind     = list | pow2_poly | counterexample      (required)
///   slopes   = <number> <number> ...                   (list; last value repeats)
///   a, b, c  = <decimal>                               (pow2_poly: b(n) = 2^-(a n^2 + b n + c), default 0)
///   c_factor = <decimal>                               (counterexample, default 1)
///   depth    = <integer>                               (counterexample sequence depth, default 64)
///   tail_tol = <decimal>                               (breakpoint tail truncation, default 2^-60)
///
/// A <number> is a decimal literal or [+|-]2^<decimal>. Vector files hold
/// whitespace-separated numbers a_1 a_2 ... with implicit indices.

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "orlicz/counterexample.hpp"
#include "orlicz/error.hpp"
#include "orlicz/log_real.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/sequence_space.hpp"

namespace orlicz {

struct FunctionSpec {
  enum class Kind { list, pow2_poly, counterexample };
  Kind kind = Kind::pow2_poly;
  std::vector<LogReal> slopes;
  double a = 0.0, b = 0.0, c = 0.0;
  double c_factor = 1.0;
  std::size_t depth = 64;
  double tail_tol = std::ldexp(1.0, -60);

  /// Counterexample sequences when kind == counterexample.
  std::optional<CounterexampleSequences> sequences() const {
    if (kind != Kind::counterexample) return std::nullopt;
    CounterexampleOptions opts;
    opts.c_factor = c_factor;
    opts.validate = c_factor <= 1.0;
    return CounterexampleSequences(depth, opts);
  }

  DyadicOrliczFunction make() const {
    const Tolerance tol(tail_tol, 0.0);
    switch (kind) {
      case Kind::list: return DyadicOrliczFunction(SlopeSequence::list(slopes), tol);
      case Kind::pow2_poly: return DyadicOrliczFunction(SlopeSequence::pow2_poly(a, b, c), tol);
      case Kind::counterexample: return DyadicOrliczFunction(sequences()->slopes(), tol);
    }
    throw Error("unknown function kind");
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline double parse_decimal(std::string_view s, std::size_t line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError("expected a decimal number, got '" + std::string(s) + "'", line);
  }
  return v;
}

inline std::size_t parse_count(std::string_view s, std::size_t line) {
  s = trim(s);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("expected a nonnegative integer, got '" + std::string(s) + "'", line);
  }
  return v;
}

}  // namespace detail

inline FunctionSpec parse_function_spec(std::string_view text) {
  std::map<std::string, std::pair<std::string, std::size_t>> kv;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", lineno);
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", lineno);
    if (!kv.emplace(key, std::make_pair(value, lineno)).second) throw ParseError("duplicate key '" + key + "'", lineno);
  }
  auto take = [&kv](const std::string& key) -> std::optional<std::pair<std::string, std::size_t>> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    auto v = it->second;
    kv.erase(it);
    return v;
  };
  FunctionSpec spec;
  const auto kind = take("kind");
  if (!kind) throw ParseError("missing 'kind'");
  if (kind->first == "list") {
    spec.kind = FunctionSpec::Kind::list;
    const auto slopes = take("slopes");
    if (!slopes) throw ParseError("kind = list requires 'slopes'", kind->second);
    for (const auto& tok : detail::split_ws(slopes->first)) {
      try {
        spec.slopes.push_back(parse_log_real(tok));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), slopes->second);
      }
    }
    if (spec.slopes.empty()) throw ParseError("'slopes' is empty", slopes->second);
  } else if (kind->first == "pow2_poly") {
    spec.kind = FunctionSpec::Kind::pow2_poly;
    if (auto v = take("a")) spec.a = detail::parse_decimal(v->first, v->second);
    if (auto v = take("b")) spec.b = detail::parse_decimal(v->first, v->second);
    if (auto v = take("c")) spec.c = detail::parse_decimal(v->first, v->second);
  } else if (kind->first == "counterexample") {
    spec.kind = FunctionSpec::Kind::counterexample;
    if (auto v = take("c_factor")) spec.c_factor = detail::parse_decimal(v->first, v->second);
    if (auto v = take("depth")) spec.depth = detail::parse_count(v->first, v->second);
  } else {
    throw ParseError("unknown kind '" + kind->first + "'", kind->second);
  }
  if (auto v = take("tail_tol")) spec.tail_tol = detail::parse_decimal(v->first, v->second);
  if (!kv.empty()) {
    const auto& [key, val] = *kv.begin();
    throw ParseError("unexpected key '" + key + "' for kind " + kind->first, val.second);
  }
  return spec;
}

inline FiniteVector parse_vector(std::string_view text) {
  std::vector<LogReal> coords;
  for (const auto& tok : detail::split_ws(text)) coords.push_back(parse_log_real(tok));
  return FiniteVector::from_dense(std::span<const LogReal>(coords));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace orlicz
