#pragma once

/// \file
/// Tabular reports and their csv / json / text renderings.
///
/// CSV: a header line of column names, then one line per row. JSON: an object
/// with keys "command", "columns", "rows" (array of objects keyed by column),
/// "summary" (object) and "failures" (integer). Text: a summary block followed
/// by one line per row, prefixed with the tag of the check it belongs to.

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "orlicz/counterexample.hpp"
#include "orlicz/error.hpp"
#include "orlicz/log_real.hpp"

namespace orlicz {

enum class ReportFormat { csv, json, text };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  if (s == "text") return ReportFormat::text;
  throw ParseError("unknown format '" + s + "' (expected csv, json or text)");
}

struct Report {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> summary;
  std::size_t failures = 0;
  /// Column whose value names the check a row belongs to, if any.
  std::string check_column;
};

/// Human-readable description of each check name used in reports.
inline std::string check_tag(const std::string& check) {
  static const std::vector<std::pair<std::string, std::string>> tags = {
      {"claim1", "slopes nonincreasing: b_j <= b_i for i < j"},
      {"claim2", "shift bound: b_{m+n} <= alpha_m b_n, n >= 2"},
      {"claim3", "sup b_{m+n}/b_n K^m <= max(sup alpha_m K^m, chain bound)"},
      {"claim3-chain", "b_{s_i+k} K^{s_i+k} <= alpha_{2i^2} c_i K^{s_i+i+1}"},
      {"claim3-decay", "b_{s_i+k} K^{s_i+k} -> 0 as i grows"},
      {"claim3-alphaK", "alpha_m K^m bounded"},
      {"claim3-via2", "sup_{n>=2} b_{m+n}/b_n K^m <= sup_m alpha_m K^m"},
      {"ratio-bound", "M(2^m t_n) / M(t_n) <= 2^{m+1} / alpha_m"},
      {"ratio-at-least-1", "M(2^m t_n) >= M(t_n)"},
      {"slope-identity", "b_{s_n - m} = c_n / alpha_m"},
      {"rho-lower", "|||x||| <= rho(x)"},
      {"rho-upper", "rho(x) <= 2 |||x|||"},
      {"greedy-bound", "eta_k |||S_k||| <= alpha"},
      {"greedy-dichotomy", "eta_{k+1}(|||S_k||| + |||t_{n_k} e_{k+1}|||) <= alpha implies n_{k+1} = n_k"},
  };
  for (const auto& [name, tag] : tags) {
    if (name == check) return tag;
  }
  return check;
}

inline std::string fmt(double v) { return detail::format_double(v); }
inline std::string fmt_log2(const LogReal& x) { return x.is_zero() ? "-inf" : fmt(x.log2mag()); }

/// Appends the rows of a CheckReport with the standard check columns.
inline void append_checks(Report& r, const CheckReport& checks) {
  if (r.columns.empty()) {
    r.columns = {"check", "i", "j", "K", "lhs_log2", "rhs_log2", "margin_log2", "pass"};
    r.check_column = "check";
  }
  for (const auto& row : checks.rows) {
    r.rows.push_back({row.check, std::to_string(row.i), std::to_string(row.j), std::to_string(row.K),
                      fmt_log2(row.lhs), fmt_log2(row.rhs), fmt(row.margin_log2), row.pass ? "1" : "0"});
  }
  r.failures += checks.failures();
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void emit_report(const Report& r, ReportFormat format, std::ostream& out) {
  switch (format) {
    case ReportFormat::csv: {
      for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << detail::csv_field(r.columns[i]);
      out << '\n';
      for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_field(row[i]);
        out << '\n';
      }
      break;
    }
    case ReportFormat::json: {
      nlohmann::ordered_json j;
      j["command"] = r.command;
      j["columns"] = r.columns;
      j["rows"] = nlohmann::ordered_json::array();
      for (const auto& row : r.rows) {
        nlohmann::ordered_json o;
        for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i) o[r.columns[i]] = row[i];
        j["rows"].push_back(std::move(o));
      }
      j["summary"] = nlohmann::ordered_json::object();
      for (const auto& [k, v] : r.summary) j["summary"][k] = v;
      j["failures"] = r.failures;
      out << j.dump(2) << '\n';
      break;
    }
    case ReportFormat::text: {
      out << "== " << r.command << " ==\n";
      for (const auto& [k, v] : r.summary) out << k << ": " << v << '\n';
      out << "failures: " << r.failures << '\n';
      std::size_t tag_col = r.columns.size();
      for (std::size_t i = 0; i < r.columns.size(); ++i) {
        if (r.columns[i] == r.check_column) tag_col = i;
      }
      for (const auto& row : r.rows) {
        if (tag_col < row.size()) out << '[' << check_tag(row[tag_col]) << "] ";
        for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i) {
          if (i == tag_col) continue;
          out << r.columns[i] << '=' << row[i] << ' ';
        }
        out << '\n';
      }
      break;
    }
  }
}

inline std::string render_report(const Report& r, ReportFormat format) {
  std::ostringstream ss;
  emit_report(r, format, ss);
  return ss.str();
}

}  // namespace orlicz
