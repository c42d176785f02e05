#pragma once

#include <string>
#include <vector>

#include "swapnet/signals.hpp"
#include "swapnet/time_grid.hpp"

namespace swapnet {

/// In-station and on-truck packs share one spec per study run; sweeps vary
/// capacity_kwh only.
struct BatterySpec {
  double capacity_kwh = 500.0;
  double eta = 0.95;                        // one-way charge/discharge efficiency
  double p_max_kw = 250.0;                  // charger power limit
  double specific_mass_kg_per_kwh = 6.8;    // 680 kg per 100 kWh pack

  double mass_kg() const { return specific_mass_kg_per_kwh * capacity_kwh; }
};

struct TruckSpec {
  double gvwr_kg = 37194.6;                 // 82,000 lb class limit
  double curb_mass_no_battery_kg = 2268.0;
  double max_duty_hours = 12.0;
  double min_rest_hours = 10.0;
};

struct Station {
  std::string id;
  std::string zone;
  std::vector<int> slots;  // candidate battery indices, unique within the station
};

struct StationVisit {
  std::string station_id;
  double consumption_kwh = 0;    // energy burned on the leg arriving at this station
  double demand_to_go_kwh = 0;   // energy still required to finish the route from here
  int arrival_step = 0;
};

struct TripRequest {
  int customer_id = 0;
  std::vector<StationVisit> visits;  // ordered along the route, at most max_stops
  double q_ini_kwh = 0;              // vehicle battery energy at departure
  double cargo_kg = 0;
  double distance_mi = 0;
};

struct Tariffs {
  TimeSeries grid_price;                     // F^G_t, $/kWh
  double swap_revenue_usd = 0;               // per swap event
  TimeSeries energy_revenue;                 // R^en_t, $/kWh sold at swap
  double shortage_penalty_usd_per_kwh = 0;   // must exceed every energy revenue
  double grid_limit_kwh = 1e9;               // per-step exchange bound
  double scc_usd_per_ton = 0;
  double alpha1 = 1.0;                       // min fraction of each stop's energy demand served
  double alpha2 = 1.0;                       // min fraction of customers fully served
};

}  // namespace swapnet
