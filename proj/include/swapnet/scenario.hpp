#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swapnet/energy.hpp"
#include "swapnet/types.hpp"

namespace swapnet {

/// Demand-to-trips pipeline knobs. The demand/zones files are optional and
/// only consumed by the routing modes.
struct PipelineConfig {
  std::string demand_file;
  std::string zones_file;
  int max_stops = 4;
  double soc_floor = 0.05;  // reserve fraction required on arrival at a stop
};

/// Everything exogenous for one study run.
struct ScenarioConfig {
  TimeGrid grid;
  BatterySpec battery;
  TruckSpec truck;
  VehicleParams vehicle;
  std::vector<Station> stations;
  std::vector<TripRequest> trips;
  Tariffs tariffs;

  // Optional exogenous signals; empty when the scenario does not use them.
  TimeSeries co2_avg;
  TimeSeries co2_marginal;
  TimeSeries ru_price;
  TimeSeries rd_price;

  PipelineConfig pipeline;

  // Station batteries start the horizon at this fraction of capacity. The
  // planning model treats it as an upper bound on the initial stock (an
  // uninstalled battery must sit at zero); the operations model pins it.
  double initial_soe_frac = 1.0;
  // When set, final state-of-energy may not drop below the initial one, so
  // the optimizer cannot fund arbitrage by draining the station.
  bool pin_terminal_soe = false;
};

struct Violation {
  std::string field;
  std::string message;
};

/// Structural checks over a parsed scenario; empty result means every type
/// invariant holds. Parse errors (unreadable file, bad JSON) throw instead.
std::vector<Violation> validate_scenario(const ScenarioConfig& config);

ScenarioConfig load_scenario(const std::string& json_path);
ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir);

std::string scenario_to_json(const ScenarioConfig& config);
void save_scenario(const ScenarioConfig& config, const std::string& json_path);

std::vector<TripRequest> load_trips_csv(const std::string& path);
void save_trips_csv(const std::vector<TripRequest>& trips, const std::string& path);

}  // namespace swapnet
