// Acceptance run: one PASS/FAIL line per criterion, CSV reports optionally
// written to the directory given as argv[1].

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "orlicz/orlicz.hpp"

using namespace orlicz;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  Report report;
};

struct Criterion {
  int id;
  double limit_s;
  std::function<Outcome()> run;
};

LogReal D(double v) { return LogReal::from_double(v); }

DyadicOrliczFunction identity_fixture() { return DyadicOrliczFunction(SlopeSequence::constant(LogReal::one())); }
DyadicOrliczFunction geometric_fixture() { return DyadicOrliczFunction(SlopeSequence::pow2_poly(0, 1, 0)); }
DyadicOrliczFunction square_fixture() { return DyadicOrliczFunction(SlopeSequence::pow2_poly(1, 0, 0)); }

const char* kSquareSpec = "kind = pow2_poly\na = 1\n";
const char* kCounterexampleSpec = "kind = counterexample\ndepth = 64\n";

std::string b01(bool b) { return b ? "1" : "0"; }

FiniteVector random_vector(std::mt19937_64& rng, std::size_t max_support) {
  std::uniform_int_distribution<std::size_t> len(1, max_support);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> v(len(rng));
  for (auto& c : v) c = unif(rng);
  return FiniteVector::from_dense(std::span<const double>(v));
}

Outcome criterion1() {
  const auto M = identity_fixture();
  std::mt19937_64 rng(1);
  Outcome o{true, "", {"c1", {"i", "support", "l1", "norm", "rel_err", "pass"}, {}, {}, 0, "pass"}};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto x = random_vector(rng, 50);
    double l1 = 0.0;
    for (const auto& [idx, v] : x) l1 += std::fabs(v.to_double());
    const double n = luxemburg_norm(M, x).to_double();
    const double err = std::fabs(n - l1) / l1;
    worst = std::max(worst, err);
    const bool ok = err <= 1e-12;
    o.pass = o.pass && ok;
    o.report.rows.push_back({std::to_string(i), std::to_string(x.support_size()), fmt(l1), fmt(n), fmt(err), b01(ok)});
  }
  o.detail = "max rel err " + fmt(worst);
  return o;
}

Outcome criterion2() {
  const auto M = geometric_fixture();
  Outcome o{true, "", {"c2", {"quantity", "n", "value", "expected", "rel_err", "pass"}, {}, {}, 0, "pass"}};
  double worst = 0.0;
  for (int n = 0; n <= 40; ++n) {
    const LogReal t = LogReal::pow2(-n);
    const LogReal v = M(t);
    const LogReal e = D(2.0 / 3.0) * LogReal::pow2(-2 * n);
    const double err = relative_difference(v, e);
    worst = std::max(worst, err);
    const bool ok = err <= 1e-12;
    o.pass = o.pass && ok;
    o.report.rows.push_back({"M(2^-n)", std::to_string(n), to_string(v), to_string(e), fmt(err), b01(ok)});
  }
  const LogReal e1 = luxemburg_norm(M, FiniteVector::unit(1));
  const double err = relative_difference(e1, D(0.75));
  const bool ok = err <= 1e-10;
  o.pass = o.pass && ok;
  o.report.rows.push_back({"norm(e_1)", "1", to_string(e1), "0.75", fmt(err), b01(ok)});
  o.detail = "max rel err " + fmt(worst) + ", norm(e_1) rel err " + fmt(err);
  return o;
}

Outcome criterion3() {
  const std::vector<std::pair<std::string, DyadicOrliczFunction>> fixtures = {
      {"identity", identity_fixture()},
      {"geometric", geometric_fixture()},
      {"square", square_fixture()},
      {"counterexample", counterexample_function(gen_sequences(64))}};
  Outcome o{true, "", {"c3", {"fixture", "n", "lower_margin_log2", "upper_margin_log2", "pass"}, {}, {}, 0, "pass"}};
  std::size_t fails = 0;
  for (const auto& [name, M] : fixtures) {
    for (std::size_t n = 0; n <= 64; ++n) {
      const auto k = static_cast<std::int64_t>(n);
      const LogReal b = M.slope(n);
      const LogReal v = M.breakpoint(n);
      const double lo = log2_ratio(v, b.ldexp(-k - 1));
      const double hi = log2_ratio(b.ldexp(-k), v);
      const bool ok = lo >= -1e-9 && hi >= -1e-9;
      if (!ok) ++fails;
      o.report.rows.push_back({name, std::to_string(n), fmt(lo), fmt(hi), b01(ok)});
    }
  }
  o.pass = fails == 0;
  o.detail = std::to_string(fails) + " violations over 4 fixtures x 65 breakpoints";
  return o;
}

Outcome criterion4() {
  const auto M = square_fixture();
  Outcome o{true, "", {"c4", {"clause", "k", "value", "bound", "pass"}, {}, {}, 0, "pass"}};
  auto add = [&](const std::string& clause, std::size_t k, const std::string& value, const std::string& bound, bool ok) {
    o.pass = o.pass && ok;
    o.report.rows.push_back({clause, std::to_string(k), value, bound, b01(ok)});
    return ok;
  };
  bool bk_ok = true;
  LogReal prev;
  for (std::size_t k = 1; k <= 41; ++k) {
    const LogReal b = compute_bk(M, 1, k).value;
    bk_ok = add("bk-nondecreasing", k, to_string(b), to_string(prev), prev <= b) && bk_ok;
    prev = b;
  }
  bool eta_ok = true;
  double eta40 = NAN;
  try {
    const RenormScheme s = build_renorm_scheme(M, 1, 40);
    const LogReal one = LogReal::one();
    for (std::size_t k = 1; k <= 40; ++k) {
      const double bound = (one / (s.bk[k + 1] - one)).to_double();
      eta_ok = add("eta-above-bound", k, fmt(s.eta.excess(k)), fmt(bound), s.eta.excess(k) > bound) && eta_ok;
      if (k > 1) {
        eta_ok = add("eta-decreasing", k, fmt(s.eta.excess(k)), fmt(s.eta.excess(k - 1)),
                     s.eta.excess(k) < s.eta.excess(k - 1)) &&
                 eta_ok;
      }
    }
    eta40 = s.eta.excess(40);
  } catch (const InfeasibleEta& e) {
    eta_ok = add("build-eta-square", 40, e.what(), "feasible", false);
  }
  const bool eta40_ok = add("eta40-excess", 40, fmt(eta40), "1e-06", eta40 < 1e-6);
  bool infeasible = false;
  std::string msg;
  try {
    build_renorm_scheme(identity_fixture(), 1, 40);
  } catch (const InfeasibleEta& e) {
    infeasible = true;
    msg = e.what();
  }
  add("identity-infeasible", 40, infeasible ? "infeasible" : "feasible", "infeasible", infeasible);
  std::ostringstream d;
  d << "bk nondecreasing " << (bk_ok ? "yes" : "NO") << "; eta decreasing and above bound " << (eta_ok ? "yes" : "NO")
    << "; eta_40 - 1 = " << fmt(eta40) << (eta40_ok ? "" : " (not < 1e-6)") << "; identity "
    << (infeasible ? "infeasible" : "FEASIBLE");
  o.detail = d.str();
  return o;
}

Outcome criterion5() {
  const auto M = square_fixture();
  const RenormScheme s = build_renorm_scheme(M, 1, 64);
  const Tolerance tol;
  std::mt19937_64 rng(5);
  Outcome o{true,
            "",
            {"c5",
             {"i", "support", "norm_log2", "triple_log2", "upper_margin_log2", "monotone", "head_index", "rearranged_equal",
              "pass"},
             {},
             {},
             0,
             "pass"}};
  std::size_t fails = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = random_vector(rng, 50);
    const LogReal n = luxemburg_norm(M, x, tol);
    const LogReal t = triple_norm(M, s.eta, x, tol).value;
    const double upper = log2_ratio(s.eta.factor(1) * n, t);
    bool monotone = true;
    LogReal prev;
    for (std::size_t k = 1; k <= x.max_index(); ++k) {
      const LogReal v = triple_norm(M, s.eta, x.head(k), tol).value;
      if (!prev.is_zero() && log2_ratio(v, prev) < -1e-12) monotone = false;
      prev = v;
    }
    const std::size_t head = head_attainment_index(M, s.eta, x);
    const bool rearranged = triple_norm(M, s.eta, rearrange(x), tol).value == t;
    const bool ok = n <= t && upper >= -1e-12 && monotone && head <= x.support_size() && rearranged;
    if (!ok) ++fails;
    o.report.rows.push_back({std::to_string(i), std::to_string(x.support_size()), fmt_log2(n), fmt_log2(t), fmt(upper),
                             b01(monotone), std::to_string(head), b01(rearranged), b01(ok)});
  }
  o.pass = fails == 0;
  o.detail = std::to_string(fails) + " of 1000 vectors violate a property";
  return o;
}

Outcome from_suite(SuiteConfig cfg, const std::string& name) {
  Outcome o;
  o.report = run_suite(cfg);
  o.report.command = name;
  o.pass = o.report.failures == 0;
  return o;
}

Outcome criterion6() {
  SuiteConfig cfg;
  cfg.command = "claims";
  cfg.depth = 40;
  Outcome o = from_suite(cfg, "c6");
  const std::size_t rows = o.report.rows.size();
  const std::size_t fails = o.report.failures;
  cfg.function_text = "kind = counterexample\nc_factor = 2\n";
  const Report mutated = run_suite(cfg);
  std::string witness;
  for (const auto& row : mutated.rows) {
    if (row[0] == "claim1" && row.back() == "0") {
      witness = "i=" + row[1] + " j=" + row[2] + " margin_log2=" + row[6];
      o.report.rows.push_back(row);
      o.report.rows.back()[0] = "mutation-claim1";
      break;
    }
  }
  o.pass = fails == 0 && !witness.empty();
  o.detail = std::to_string(fails) + " failures in " + std::to_string(rows) + " rows; mutation witness " +
             (witness.empty() ? "MISSING" : witness);
  return o;
}

Outcome criterion7() {
  SuiteConfig cfg;
  cfg.command = "ratio-bound";
  cfg.depth = 12;
  Outcome o = from_suite(cfg, "c7");
  o.detail = std::to_string(o.report.failures) + " failures in " + std::to_string(o.report.rows.size()) +
             " rows (m = 0..6, n <= 12)";
  return o;
}

std::string summary_value(const Report& r, const std::string& key) {
  for (const auto& [k, v] : r.summary) {
    if (k == key) return v;
  }
  return "";
}

Outcome criterion8() {
  SuiteConfig cfg;
  cfg.command = "probe";
  cfg.depth = 30;
  cfg.function_text = kCounterexampleSpec;
  const Report ce = run_suite(cfg);
  cfg.function_text = kSquareSpec;
  const Report sq = run_suite(cfg);
  Outcome o{true, "", {"c8", {"fixture"}, {}, {}, 0, ""}};
  for (const auto& c : ce.columns) o.report.columns.push_back(c);
  for (auto row : ce.rows) {
    row.insert(row.begin(), "counterexample");
    o.report.rows.push_back(std::move(row));
  }
  for (auto row : sq.rows) {
    row.insert(row.begin(), "square");
    o.report.rows.push_back(std::move(row));
  }
  const std::string ce_trend = summary_value(ce, "trend");
  const std::string sq_trend = summary_value(sq, "trend");
  const bool ce_ok = ce_trend == "strictly-increasing";
  bool sq_ok = false;
  if (sq_trend.rfind("stabilized-at-", 0) == 0) sq_ok = std::stoul(sq_trend.substr(14)) < 30;
  o.pass = ce_ok && sq_ok && ce.failures == 0 && sq.failures == 0;
  o.detail = "counterexample: " + ce_trend + " (want strictly-increasing); square: " + sq_trend +
             " (want stabilized-at-m, m < 30); greedy invariant failures " + std::to_string(ce.failures + sq.failures);
  return o;
}

double l1(std::span<const double> x) {
  double s = 0.0;
  for (double c : x) s += std::fabs(c);
  return s;
}

Outcome criterion9() {
  Outcome o{true, "", {"c9", {}, {}, {}, 0, ""}};
  std::size_t rows = 0;
  std::size_t fails = 0;
  for (std::size_t J = 1; J <= 3; ++J) {
    SuiteConfig cfg;
    cfg.command = "norming-family";
    cfg.depth = J;
    cfg.function_text = kSquareSpec;
    const Report r = run_suite(cfg);
    if (o.report.columns.empty()) o.report.columns = r.columns;
    o.report.check_column = r.check_column;
    for (const auto& row : r.rows) o.report.rows.push_back(row);
    rows += r.rows.size();
    fails += r.failures;
  }
  const auto W = build_norming_family(l1, 2, 0.05);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::vector<double>> pts(200, std::vector<double>(2));
  for (auto& p : pts) {
    for (auto& c : p) c = unif(rng);
  }
  const auto pn = check_precisely_norming(W, l1, pts, Tolerance(1e-9, 0));
  const bool attained = pn.all_attained();
  o.report.rows.push_back({"l1-precisely-norming", "200", "2", "0", fmt(pn.worst_gap), "0", "0", b01(attained)});
  o.pass = fails == 0 && attained;
  o.detail = std::to_string(fails) + " sandwich failures in " + std::to_string(rows) + " rows (dimensions 1..3); l1 section " +
             (attained ? "attained" : "NOT attained");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::cout << std::unitbuf;
  const std::string out_dir = argc > 1 ? argv[1] : "";
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  const std::vector<Criterion> criteria = {
      {1, 1, criterion1},   {2, 1, criterion2},   {3, 5, criterion3},   {4, 10, criterion4}, {5, 30, criterion5},
      {6, 10, criterion6},  {7, 10, criterion7},  {8, 60, criterion8},  {9, 60, criterion9}};

  std::vector<std::string> first_csv;
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << " (" << std::fixed << std::setprecision(3)
              << secs << " s, limit " << std::setprecision(0) << c.limit_s << " s) " << o.detail
              << (in_time ? "" : " [over time limit]") << '\n';
    first_csv.push_back(render_report(o.report, ReportFormat::csv));
    if (!out_dir.empty()) {
      std::ofstream(out_dir + "/criterion" + std::to_string(c.id) + ".csv", std::ios::binary) << first_csv.back();
    }
  }

  std::size_t mismatched = 0;
  std::string which;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception&) {
    }
    if (render_report(o.report, ReportFormat::csv) != first_csv[i]) {
      ++mismatched;
      which += " " + std::to_string(criteria[i].id);
    }
  }
  const bool det = mismatched == 0;
  if (!det) ++failed;
  std::cout << "criterion 10: " << (det ? "PASS" : "FAIL") << " reran criteria 1-9, "
            << (det ? "all CSV reports byte-identical" : "CSV differs for" + which) << '\n';
  return failed == 0 ? 0 : 1;
}
