#include "swapnet/trips.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "swapnet/csv.hpp"

namespace swapnet {

std::vector<RawDemand> load_demand_csv(const std::string& path, const VehicleParams& vehicle) {
  csv::Table t = csv::read_file(path);
  const std::vector<std::string> expect = {"origin", "destination", "frequency", "distance_mi",
                                           "elevation_m"};
  if (t.header != expect) {
    throw std::runtime_error("demand CSV " + path +
                             " must have header origin,destination,frequency,distance_mi,elevation_m");
  }
  std::vector<RawDemand> out;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string ctx = path + " row " + std::to_string(r + 2);
    if (row.size() != expect.size()) throw std::runtime_error(ctx + ": wrong column count");
    RawDemand d;
    d.origin = row[0];
    d.destination = row[1];
    d.frequency = csv::to_double(row[2], ctx);
    d.distance_mi = csv::to_double(row[3], ctx);
    d.elevation_m = csv::to_double(row[4], ctx);
    if (d.frequency < 0) throw std::runtime_error(ctx + ": frequency must be non-negative");
    if (d.distance_mi <= 0) throw std::runtime_error(ctx + ": distance must be positive");
    d.energy_per_trip_kwh = trip_energy_kwh_miles(d.distance_mi, d.elevation_m, vehicle);
    out.push_back(std::move(d));
  }
  return out;
}

void ZoneGraph::set_distance(const std::string& a, const std::string& b, double miles) {
  dist_[{a, b}] = miles;
  dist_[{b, a}] = miles;
}

bool ZoneGraph::has(const std::string& a, const std::string& b) const {
  return a == b || dist_.count({a, b}) > 0;
}

double ZoneGraph::distance(const std::string& a, const std::string& b) const {
  if (a == b) return 0;
  auto it = dist_.find({a, b});
  if (it == dist_.end()) throw std::runtime_error("no inter-zone distance for " + a + " -> " + b);
  return it->second;
}

ZoneGraph ZoneGraph::load_csv(const std::string& path) {
  csv::Table t = csv::read_file(path);
  const std::vector<std::string> expect = {"from", "to", "distance_mi"};
  if (t.header != expect) {
    throw std::runtime_error("zones CSV " + path + " must have header from,to,distance_mi");
  }
  ZoneGraph g;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string ctx = path + " row " + std::to_string(r + 2);
    if (row.size() != 3) throw std::runtime_error(ctx + ": wrong column count");
    g.set_distance(row[0], row[1], csv::to_double(row[2], ctx));
  }
  return g;
}

ChainResult chain_round_trips(const std::vector<RawDemand>& demand, const BatterySpec& battery) {
  ChainResult out;
  const double cap = battery.capacity_kwh;
  for (const auto& d : demand) {
    long requests = std::lround(std::nearbyint(d.frequency));
    if (requests <= 0) continue;
    if (d.energy_per_trip_kwh > cap) {
      out.residual.push_back(d);
      continue;
    }
    long per_truck = static_cast<long>(cap / d.energy_per_trip_kwh);  // >= 1 here
    long remaining = requests;
    while (remaining > 0) {
      long take = std::min(per_truck, remaining);
      Itinerary it;
      it.origin = d.origin;
      it.destination = d.destination;
      it.trips = static_cast<int>(take);
      it.distance_mi = d.distance_mi * static_cast<double>(take);
      it.energy_kwh = d.energy_per_trip_kwh * static_cast<double>(take);
      out.chained.push_back(std::move(it));
      remaining -= take;
    }
  }
  return out;
}

namespace {

struct CandidateRoute {
  std::vector<int> stations;      // indices into the station list
  std::vector<int> arrival_steps; // one per stop
  std::vector<double> leg_miles;  // stops + 1 legs
  double total_mi = 0;
};

// Ordered tie-break: detour, then arrival-step vector, then station ids.
bool better(const CandidateRoute& a, const CandidateRoute& b, const std::vector<Station>& stations) {
  if (a.total_mi != b.total_mi) return a.total_mi < b.total_mi;
  if (a.arrival_steps != b.arrival_steps) return a.arrival_steps < b.arrival_steps;
  std::vector<std::string> ida, idb;
  for (int s : a.stations) ida.push_back(stations[s].id);
  for (int s : b.stations) idb.push_back(stations[s].id);
  return ida < idb;
}

}  // namespace

RoutedTrip insert_stops(const RawDemand& trip, const ZoneGraph& zones, const std::vector<Station>& stations,
                        const BatterySpec& battery, const VehicleParams& vehicle,
                        const RoutingParams& params, const TimeGrid& grid) {
  RoutedTrip out;
  out.base_distance_mi = trip.distance_mi;
  out.base_energy_kwh = trip.energy_per_trip_kwh;
  out.request.q_ini_kwh = battery.capacity_kwh;
  out.request.distance_mi = trip.distance_mi;

  const double per_mile = trip.energy_per_trip_kwh / trip.distance_mi;
  const double cap = battery.capacity_kwh;
  const double usable = cap * (1.0 - params.soc_floor);
  const double v_mph = vehicle.v_max_mph();

  // Within range: no stops needed.
  if (trip.energy_per_trip_kwh <= cap) {
    out.feasible = true;
    return out;
  }

  std::optional<CandidateRoute> best;

  // Depth-first over ordered station sequences of length <= max_stops.
  std::vector<int> seq;
  std::vector<bool> used(stations.size(), false);

  auto leg_ok = [&](double miles, bool ends_at_station) {
    double energy = miles * per_mile;
    return energy <= (ends_at_station ? usable : cap) + 1e-9;
  };

  auto evaluate = [&]() {
    CandidateRoute cand;
    cand.stations = seq;
    double hour = grid.step_start_hour(params.start_step);
    std::string prev_zone = trip.origin;
    double total = 0;
    for (size_t k = 0; k < seq.size(); ++k) {
      const std::string& zone = stations[seq[k]].zone;
      if (!zones.has(prev_zone, zone)) return;
      double miles = zones.distance(prev_zone, zone);
      if (!leg_ok(miles, true)) return;
      hour += miles / v_mph;
      int step = grid.step_of_hour(hour);
      if (!grid.contains(step)) return;
      cand.arrival_steps.push_back(step);
      cand.leg_miles.push_back(miles);
      total += miles;
      // The swap completes within its step; driving resumes at the next one.
      hour = grid.step_start_hour(step + 1);
      prev_zone = zone;
    }
    if (!zones.has(prev_zone, trip.destination)) return;
    double last = zones.distance(prev_zone, trip.destination);
    if (!leg_ok(last, false)) return;
    cand.leg_miles.push_back(last);
    total += last;
    cand.total_mi = total;
    if (!best || better(cand, *best, stations)) best = std::move(cand);
  };

  auto dfs = [&](auto&& self, int depth) -> void {
    if (depth > 0) evaluate();
    if (depth == params.max_stops) return;
    for (size_t s = 0; s < stations.size(); ++s) {
      if (used[s]) continue;
      used[s] = true;
      seq.push_back(static_cast<int>(s));
      self(self, depth + 1);
      seq.pop_back();
      used[s] = false;
    }
  };
  dfs(dfs, 0);

  if (!best) {
    out.feasible = false;
    return out;
  }

  out.feasible = true;
  out.detour_distance_mi = best->total_mi - trip.distance_mi;
  out.detour_energy_kwh = out.detour_distance_mi * per_mile;
  out.request.distance_mi = best->total_mi;

  double remaining = best->total_mi * per_mile;
  for (size_t k = 0; k < best->stations.size(); ++k) {
    StationVisit v;
    v.station_id = stations[best->stations[k]].id;
    v.consumption_kwh = best->leg_miles[k] * per_mile;
    remaining -= v.consumption_kwh;
    v.demand_to_go_kwh = remaining;
    v.arrival_step = best->arrival_steps[k];
    out.request.visits.push_back(std::move(v));
  }
  return out;
}

double penetration_rate(const std::vector<RawDemand>& long_trips, const ZoneGraph& zones,
                        const std::vector<Station>& stations, const BatterySpec& battery,
                        const VehicleParams& vehicle, const RoutingParams& params, const TimeGrid& grid) {
  if (long_trips.empty()) {
    throw std::invalid_argument("penetration_rate: undefined on an empty trip set");
  }
  double total = 0, feasible = 0;
  for (const auto& d : long_trips) {
    double weight = std::max(1.0, std::nearbyint(d.frequency));
    total += weight;
    RoutedTrip r = insert_stops(d, zones, stations, battery, vehicle, params, grid);
    if (r.feasible) feasible += weight;
  }
  return feasible / total;
}

std::vector<RoutedTrip> route_residual_trips(const std::vector<RawDemand>& residual, const ZoneGraph& zones,
                                             const std::vector<Station>& stations, const BatterySpec& battery,
                                             const TruckSpec& truck, const VehicleParams& vehicle,
                                             const RoutingParams& params, const TimeGrid& grid) {
  std::vector<RawDemand> sorted = residual;
  std::sort(sorted.begin(), sorted.end(), [](const RawDemand& a, const RawDemand& b) {
    return std::tie(a.origin, a.destination, a.distance_mi) < std::tie(b.origin, b.destination, b.distance_mi);
  });
  double cargo = payload_kg(battery, truck);
  std::vector<RoutedTrip> out;
  int next_id = 0;
  for (const auto& d : sorted) {
    long count = std::max<long>(1, std::lround(std::nearbyint(d.frequency)));
    RoutedTrip routed = insert_stops(d, zones, stations, battery, vehicle, params, grid);
    for (long c = 0; c < count; ++c) {
      RoutedTrip copy = routed;
      copy.request.customer_id = next_id++;
      copy.request.cargo_kg = cargo;
      out.push_back(std::move(copy));
    }
  }
  return out;
}

}  // namespace swapnet
