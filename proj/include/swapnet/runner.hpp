#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "swapnet/metrics.hpp"
#include "swapnet/milp.hpp"
#include "swapnet/solver.hpp"

namespace swapnet {

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One CLI invocation, echoed verbatim into the output directory.
struct RunManifest {
  std::string scenario_path;
  std::string mode;  // plan | operate | compare | carbon-sweep | as-study | decompose
  std::string preset = "baseline";  // baseline | appC-1 | appC-2 | appC-3
  double gap = 0.05;
  double time_limit_s = std::numeric_limits<double>::infinity();
  std::string solver_cmd;  // empty -> internal deterministic solver (oracle mode)
  int workers = 1;
  std::string out_dir;

  // internal-solver guards for CLI-scale models
  int max_binaries = 400;
  long node_limit = 2000000;

  std::string as_mode = "capacity";  // capacity | verbatim
  std::vector<double> scc_grid = {0, 37, 258, 1000};
  std::vector<double> battery_sweep_kwh = {350, 400, 450, 500, 550, 600, 650, 700, 750, 800};
  double beta1 = 30.0;
  double beta2 = 5.0;
};

StayTimes preset_stay_times(const std::string& preset);

/// Executes the manifest and writes artifacts under out_dir. Returns the
/// process exit code: 0 ok, 2 infeasible, 3 validation failure, 4
/// environment problem. Failures leave a machine-readable
/// error_report.json plus a stale.marker listing any partial artifacts.
int run(const RunManifest& manifest);

/// One-page digest of a finished run directory. Throws listing every
/// missing artifact when the directory is incomplete.
std::string report_summary(const std::string& run_dir);

// Profit decomposition of an operations solution, in dollars.
struct ProfitBreakdown {
  double grid_cost = 0;
  double swap_revenue = 0;
  double energy_revenue = 0;
  double shortage_penalty = 0;
  double as_revenue = 0;
  double net_profit() const { return swap_revenue + energy_revenue + as_revenue - grid_cost - shortage_penalty; }
};

ProfitBreakdown profit_breakdown(const ScenarioConfig& config, const ModelBuild& build,
                                 const Solution& solution, OperationsOptions::AsMode as_mode);

/// Net grid energy drawn per step, from solved values.
std::vector<double> grid_energy_profile(const ModelBuild& build, const Solution& solution);

/// Emissions under a factor series aligned to the grid, in tons.
double emissions_tons(const ScenarioConfig& config, const TimeSeries& factor,
                      const std::vector<double>& grid_energy);

}  // namespace swapnet
