// Command-line front end: load a net configuration, run the verification
// suites, and emit human-readable and machine-readable reports.
//
// Exit codes: 0 all selected checks pass, 1 check failures, 2 config errors.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "aqft/config.hpp"

using namespace aqft;

int main(int argc, char** argv) {
  CLI::App app{"aqftcheck: verification suites for finite AQFT nets"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  double tol_override = -1.0;
  std::vector<std::string> suite_override;

  auto* check = app.add_subcommand("check", "run the selected check suites");
  check->add_option("config", config_path, "configuration file (JSON)")
      ->required();
  check->add_option("--tol", tol_override, "tolerance override");
  check->add_option("--out", out_path, "path of the JSON report");
  check->add_option("--suite", suite_override, "suite selection override");

  auto* info = app.add_subcommand("info", "print net statistics");
  info->add_option("config", config_path, "configuration file (JSON)")
      ->required();

  auto* gamma = app.add_subcommand("gamma", "gamma-closure statistics");
  gamma->add_option("config", config_path, "configuration file (JSON)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  config::RunConfig cfg;
  try {
    cfg = config::parse_config_file(config_path);
    if (tol_override > 0) cfg.tolerance = tol_override;
    if (!suite_override.empty()) cfg.suites = suite_override;
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (check->parsed()) {
      config::RunResult res = config::run_suites(cfg);
      std::cout << report::to_text(res.rep);
      std::string out = !out_path.empty() ? out_path
                        : cfg.output       ? *cfg.output
                                           : "";
      if (!out.empty()) {
        std::ofstream f(out);
        if (!f) {
          std::cerr << "cannot write report to " << out << "\n";
          return 2;
        }
        f << res.json.dump(2) << "\n";
      }
      return res.rep.all_pass() ? 0 : 1;
    }
    if (info->parsed()) {
      std::cout << config::run_info(cfg).text;
      return 0;
    }
    if (gamma->parsed()) {
      std::cout << config::run_gamma(cfg).text;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
