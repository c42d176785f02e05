#pragma once

// Shared builders for small deterministic instances used across the suites.

#include <string>
#include <vector>

#include "swapnet/scenario.hpp"

namespace swapnet::testing {

struct TinyVisit {
  std::string station;
  double consumption;
  double demand_to_go;
  int arrival;
};

struct TinyTrip {
  int id;
  double q_ini;
  std::vector<TinyVisit> visits;
};

/// One-station scenario on a short grid with flat unit prices. Callers
/// override fields afterwards as needed.
inline ScenarioConfig tiny_scenario(int t_end = 5, int slots = 2, double capacity = 100,
                                    double eta = 1.0, double p_max = 100) {
  ScenarioConfig cfg;
  cfg.grid = TimeGrid{0, t_end, 0.5};
  cfg.battery = BatterySpec{capacity, eta, p_max, 6.8};
  cfg.stations.push_back({"S1", "A", {}});
  for (int i = 0; i < slots; ++i) cfg.stations[0].slots.push_back(i);
  cfg.tariffs.grid_price = constant_series(SeriesKind::lmp, cfg.grid, 0.1);
  cfg.tariffs.energy_revenue = constant_series(SeriesKind::lmp, cfg.grid, 0.2);
  cfg.tariffs.swap_revenue_usd = 5.0;
  cfg.tariffs.shortage_penalty_usd_per_kwh = 10.0;
  cfg.tariffs.grid_limit_kwh = 10000.0;
  cfg.initial_soe_frac = 1.0;
  return cfg;
}

inline void add_trip(ScenarioConfig& cfg, const TinyTrip& t) {
  TripRequest req;
  req.customer_id = t.id;
  req.q_ini_kwh = t.q_ini;
  for (const auto& v : t.visits) {
    req.visits.push_back({v.station, v.consumption, v.demand_to_go, v.arrival});
  }
  cfg.trips.push_back(std::move(req));
}

}  // namespace swapnet::testing
