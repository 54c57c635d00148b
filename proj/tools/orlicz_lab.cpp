// orlicz_lab: run norm computations and verification suites from the shell.
//
// Exit status: 0 all checks pass, 1 check failures or infeasible eta,
// 2 usage or parse errors.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orlicz/orlicz.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Orlicz sequence space norm laboratory"};
  app.set_config("--config", "", "INI/TOML file with option defaults; flags override");
  app.require_subcommand(1, 1);

  orlicz::SuiteConfig cfg;
  std::string function_path, vector_path, out_path, format = "csv";
  std::int64_t m = -1;
  std::size_t depth = 0;
  std::vector<std::int64_t> k_list;
  double tol = 0.0;

  app.add_option("--function", function_path, "function specification file")->check(CLI::ExistingFile);
  app.add_option("--vector", vector_path, "vector file")->check(CLI::ExistingFile);
  app.add_option("--m", m, "dilation exponent (K = 2^m) or ratio-bound m")->check(CLI::NonNegativeNumber);
  app.add_option("--depth", depth, "index range: k_max, j_max, n_max, probe depth, grid size or dimension")
      ->check(CLI::PositiveNumber);
  app.add_option("--k-list", k_list, "comma-separated K values for claims")->delimiter(',');
  app.add_option("--q", cfg.q, "exponent for cq")->check(CLI::Range(1.0, 1e6));
  app.add_option("--tol", tol, "tolerance override")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "seed for randomized suites");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--format", format, "csv, json or text")->check(CLI::IsMember({"csv", "json", "text"}));

  for (const auto& name : orlicz::SuiteConfig::commands()) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (!function_path.empty()) cfg.function_path = function_path;
  if (!vector_path.empty()) cfg.vector_path = vector_path;
  if (m >= 0) cfg.m = m;
  if (depth > 0) cfg.depth = depth;
  if (!k_list.empty()) cfg.k_list = k_list;
  if (tol > 0.0) cfg.tol = tol;

  try {
    cfg.format = orlicz::parse_report_format(format);
    const orlicz::Report report = orlicz::run_suite(cfg);
    if (out_path.empty()) {
      orlicz::emit_report(report, cfg.format, std::cout);
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "orlicz_lab: cannot write '" << out_path << "'\n";
        return 2;
      }
      orlicz::emit_report(report, cfg.format, out);
    }
    return report.failures == 0 ? 0 : 1;
  } catch (const orlicz::InfeasibleEta& e) {
    std::cerr << "orlicz_lab: " << e.what() << '\n';
    return 1;
  } catch (const orlicz::ParseError& e) {
    std::cerr << "orlicz_lab: " << e.what() << '\n';
    return 2;
  } catch (const orlicz::Error& e) {
    std::cerr << "orlicz_lab: " << e.what() << '\n';
    return 1;
  }
}
