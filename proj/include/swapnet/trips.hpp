#pragma once

#include <map>
#include <string>
#include <vector>

#include "swapnet/energy.hpp"
#include "swapnet/scenario.hpp"

namespace swapnet {

/// One origin-destination demand row. energy_per_trip_kwh is derived from
/// the longitudinal model when the row is loaded.
struct RawDemand {
  std::string origin;
  std::string destination;
  double frequency = 0;  // trips per day
  double distance_mi = 0;
  double elevation_m = 0;
  double energy_per_trip_kwh = 0;
};

std::vector<RawDemand> load_demand_csv(const std::string& path, const VehicleParams& vehicle);

/// Inter-zone road distances (inputs, not computed). Symmetric; a zone is
/// zero miles from itself.
class ZoneGraph {
 public:
  void set_distance(const std::string& a, const std::string& b, double miles);
  double distance(const std::string& a, const std::string& b) const;  // throws if unknown
  bool has(const std::string& a, const std::string& b) const;

  static ZoneGraph load_csv(const std::string& path);

 private:
  std::map<std::pair<std::string, std::string>, double> dist_;
};

/// One truck-day of work after chaining: total distance and the number of
/// en-route charge events (zero for chained round trips).
struct Itinerary {
  std::string origin;
  std::string destination;
  int trips = 0;
  double distance_mi = 0;
  double energy_kwh = 0;
};

struct ChainResult {
  std::vector<Itinerary> chained;    // round-trip bundles within battery range
  std::vector<RawDemand> residual;   // demand rows whose single trip exceeds range
};

/// Groups same-OD requests back-to-back (A-B-A-B-...) until the next trip
/// would exceed the battery, dispatching another truck when it does. Rows
/// whose single-trip energy exceeds capacity go to the residual untouched.
ChainResult chain_round_trips(const std::vector<RawDemand>& demand, const BatterySpec& battery);

struct RoutingParams {
  int max_stops = 4;
  double soc_floor = 0.05;  // reserve fraction required when arriving at a stop
  int start_step = 0;       // departure step for routed trips
};

struct RoutedTrip {
  TripRequest request;  // visits populated; customer_id assigned by the caller
  bool feasible = false;
  double base_distance_mi = 0;
  double base_energy_kwh = 0;
  double detour_distance_mi = 0;
  double detour_energy_kwh = 0;
};

/// Chooses up to max_stops swap stops for one long trip by exhaustive search
/// over ordered station sequences, minimizing added detour distance with
/// earliest-arrival and lowest-station-id tie-breaks. Returns
/// feasible = false when no admissible sequence exists (not an error).
RoutedTrip insert_stops(const RawDemand& trip, const ZoneGraph& zones, const std::vector<Station>& stations,
                        const BatterySpec& battery, const VehicleParams& vehicle,
                        const RoutingParams& params, const TimeGrid& grid);

/// Fraction of range-limited trips that route successfully with the given
/// battery and stop budget. Throws std::invalid_argument on an empty trip
/// set (the rate is undefined).
double penetration_rate(const std::vector<RawDemand>& long_trips, const ZoneGraph& zones,
                        const std::vector<Station>& stations, const BatterySpec& battery,
                        const VehicleParams& vehicle, const RoutingParams& params, const TimeGrid& grid);

/// Expands residual demand rows into unit trips, routes each one, and
/// assigns deterministic customer ids (sorted by origin, destination,
/// replica). cargo defaults to the GVWR payload.
std::vector<RoutedTrip> route_residual_trips(const std::vector<RawDemand>& residual, const ZoneGraph& zones,
                                             const std::vector<Station>& stations, const BatterySpec& battery,
                                             const TruckSpec& truck, const VehicleParams& vehicle,
                                             const RoutingParams& params, const TimeGrid& grid);

}  // namespace swapnet
