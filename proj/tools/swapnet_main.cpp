#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "swapnet/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"swapnet: battery-swap network planning, operations and comparison studies"};
  app.require_subcommand(0, 1);

  swapnet::RunManifest man;
  std::string time_limit;

  app.add_option("--mode", man.mode,
                 "plan | operate | compare | carbon-sweep | as-study | decompose");
  app.add_option("--scenario", man.scenario_path, "scenario JSON file");
  app.add_option("--preset", man.preset, "stay-time preset: baseline, appC-1, appC-2, appC-3")
      ->default_val("baseline");
  app.add_option("--gap", man.gap, "MIP optimality gap stop rule")->default_val(0.05);
  app.add_option("--time-limit", man.time_limit_s, "solver time limit in seconds");
  app.add_option("--solver-cmd", man.solver_cmd,
                 "external MILP solver command (omit for the internal deterministic solver)");
  app.add_option("--workers", man.workers, "concurrent sweep workers")->default_val(1);
  app.add_option("--out", man.out_dir, "output directory");
  app.add_option("--as-mode", man.as_mode, "ancillary-service objective: capacity | verbatim")
      ->default_val("capacity");

  auto* report = app.add_subcommand("report", "summarize a finished run directory");
  std::string report_dir;
  report->add_option("dir", report_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (report->parsed()) {
    try {
      std::cout << swapnet::report_summary(report_dir);
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 3;
    }
  }

  if (man.mode.empty() || man.scenario_path.empty() || man.out_dir.empty()) {
    std::cerr << "error: --mode, --scenario and --out are required (see --help)\n";
    return 3;
  }

  int rc = swapnet::run(man);
  if (rc != 0) {
    std::cerr << "run failed with exit code " << rc << "; see error_report.json in " << man.out_dir
              << "\n";
  }
  return rc;
}
