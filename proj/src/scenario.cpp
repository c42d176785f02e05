#include "swapnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "swapnet/csv.hpp"

namespace swapnet {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / path).string();
}

TimeSeries parse_series_field(const json& node, SeriesKind kind, const TimeGrid& grid,
                              const std::string& base_dir, const std::string& field) {
  if (node.is_number()) {
    return constant_series(kind, grid, node.get<double>());
  }
  if (node.is_object() && node.contains("csv")) {
    return load_series(resolve(base_dir, node.at("csv").get<std::string>()), kind);
  }
  if (node.is_object() && node.contains("values")) {
    TimeSeries s;
    s.kind = kind;
    s.start_hour = node.value("start_hour", grid.span_begin_hour());
    s.step_h = node.value("step_h", grid.delta_t_h);
    auto vals = node.at("values").get<std::vector<double>>();
    s.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    return s;
  }
  throw std::runtime_error("scenario field '" + field +
                           "': expected a number, {\"csv\": path} or {\"values\": [...]}");
}

json series_to_json(const TimeSeries& s) {
  json node;
  node["start_hour"] = s.start_hour;
  node["step_h"] = s.step_h;
  node["values"] = std::vector<double>(s.values.data(), s.values.data() + s.values.size());
  return node;
}

TripRequest parse_trip_json(const json& node) {
  TripRequest t;
  t.customer_id = node.at("m").get<int>();
  t.q_ini_kwh = node.at("q_ini_kwh").get<double>();
  t.cargo_kg = node.value("cargo_kg", 0.0);
  t.distance_mi = node.value("distance_mi", 0.0);
  for (const auto& v : node.at("visits")) {
    StationVisit sv;
    sv.station_id = v.at("station_id").get<std::string>();
    sv.consumption_kwh = v.at("consumption_kwh").get<double>();
    sv.demand_to_go_kwh = v.at("demand_to_go_kwh").get<double>();
    sv.arrival_step = v.at("arrival_step").get<int>();
    t.visits.push_back(std::move(sv));
  }
  return t;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("scenario parse error: ") + e.what());
  }

  ScenarioConfig cfg;
  try {
    const auto& time = doc.at("time");
    cfg.grid.t_begin = time.at("t_begin").get<int>();
    cfg.grid.t_end = time.at("t_end").get<int>();
    cfg.grid.delta_t_h = time.value("delta_t_h", 0.5);

    const auto& bat = doc.at("batteries");
    cfg.battery.capacity_kwh = bat.at("capacity_kwh").get<double>();
    cfg.battery.eta = bat.value("eta", 0.95);
    cfg.battery.p_max_kw = bat.at("p_max_kw").get<double>();
    cfg.battery.specific_mass_kg_per_kwh = bat.value("specific_mass_kg_per_kwh", 6.8);

    if (doc.contains("trucks")) {
      const auto& trk = doc.at("trucks");
      cfg.truck.gvwr_kg = trk.value("gvwr_kg", cfg.truck.gvwr_kg);
      cfg.truck.curb_mass_no_battery_kg =
          trk.value("curb_mass_no_battery_kg", cfg.truck.curb_mass_no_battery_kg);
      cfg.truck.max_duty_hours = trk.value("max_duty_hours", cfg.truck.max_duty_hours);
      cfg.truck.min_rest_hours = trk.value("min_rest_hours", cfg.truck.min_rest_hours);
    }

    if (doc.contains("vehicle")) {
      const auto& veh = doc.at("vehicle");
      VehicleParams& p = cfg.vehicle;
      p.mass_kg = veh.value("mass_kg", p.mass_kg);
      p.accel_ms2 = veh.value("accel_ms2", p.accel_ms2);
      p.decel_ms2 = veh.value("decel_ms2", p.decel_ms2);
      p.v_max_kmh = veh.value("v_max_kmh", p.v_max_kmh);
      p.c_rolling = veh.value("c_rolling", p.c_rolling);
      p.c_drag = veh.value("c_drag", p.c_drag);
      p.frontal_area_m2 = veh.value("frontal_area_m2", p.frontal_area_m2);
      p.air_density = veh.value("air_density", p.air_density);
      p.eta_accel = veh.value("eta_accel", p.eta_accel);
      p.eta_cruise = veh.value("eta_cruise", p.eta_cruise);
      p.eta_decel = veh.value("eta_decel", p.eta_decel);
    }

    for (const auto& s : doc.at("stations")) {
      Station st;
      st.id = s.at("id").get<std::string>();
      st.zone = s.value("zone", std::string{});
      const auto& slots = s.at("slots");
      if (slots.is_number_integer()) {
        int n = slots.get<int>();
        for (int i = 0; i < n; ++i) st.slots.push_back(i);
      } else {
        st.slots = slots.get<std::vector<int>>();
      }
      cfg.stations.push_back(std::move(st));
    }

    if (doc.contains("trips")) {
      for (const auto& t : doc.at("trips")) cfg.trips.push_back(parse_trip_json(t));
    } else if (doc.contains("trips_file")) {
      cfg.trips = load_trips_csv(resolve(base_dir, doc.at("trips_file").get<std::string>()));
    }

    const auto& tar = doc.at("tariffs");
    cfg.tariffs.grid_price =
        parse_series_field(tar.at("grid_price"), SeriesKind::lmp, cfg.grid, base_dir, "tariffs.grid_price");
    cfg.tariffs.swap_revenue_usd = tar.value("swap_revenue_usd", 0.0);
    cfg.tariffs.energy_revenue = parse_series_field(tar.at("energy_revenue"), SeriesKind::lmp, cfg.grid,
                                                    base_dir, "tariffs.energy_revenue");
    cfg.tariffs.shortage_penalty_usd_per_kwh = tar.at("shortage_penalty_usd_per_kwh").get<double>();
    cfg.tariffs.grid_limit_kwh = tar.value("grid_limit_kwh", 1e9);
    cfg.tariffs.scc_usd_per_ton = tar.value("scc_usd_per_ton", 0.0);
    cfg.tariffs.alpha1 = tar.value("alpha1", 1.0);
    cfg.tariffs.alpha2 = tar.value("alpha2", 1.0);

    if (doc.contains("signals")) {
      const auto& sig = doc.at("signals");
      if (sig.contains("co2_avg")) {
        cfg.co2_avg =
            parse_series_field(sig.at("co2_avg"), SeriesKind::co2_avg, cfg.grid, base_dir, "signals.co2_avg");
      }
      if (sig.contains("co2_marginal")) {
        cfg.co2_marginal = parse_series_field(sig.at("co2_marginal"), SeriesKind::co2_marginal, cfg.grid,
                                              base_dir, "signals.co2_marginal");
      }
      if (sig.contains("ru_price")) {
        cfg.ru_price = parse_series_field(sig.at("ru_price"), SeriesKind::ru_price, cfg.grid, base_dir,
                                          "signals.ru_price");
      }
      if (sig.contains("rd_price")) {
        cfg.rd_price = parse_series_field(sig.at("rd_price"), SeriesKind::rd_price, cfg.grid, base_dir,
                                          "signals.rd_price");
      }
    }

    if (doc.contains("pipeline")) {
      const auto& pl = doc.at("pipeline");
      cfg.pipeline.demand_file = resolve(base_dir, pl.value("demand_file", std::string{}));
      cfg.pipeline.zones_file = resolve(base_dir, pl.value("zones_file", std::string{}));
      cfg.pipeline.max_stops = pl.value("max_stops", 4);
      cfg.pipeline.soc_floor = pl.value("soc_floor", 0.05);
    }

    cfg.initial_soe_frac = doc.value("initial_soe_frac", 1.0);
    cfg.pin_terminal_soe = doc.value("pin_terminal_soe", false);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario field error: ") + e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + json_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), fs::path(json_path).parent_path().string());
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["time"] = {{"t_begin", cfg.grid.t_begin}, {"t_end", cfg.grid.t_end}, {"delta_t_h", cfg.grid.delta_t_h}};
  doc["batteries"] = {{"capacity_kwh", cfg.battery.capacity_kwh},
                      {"eta", cfg.battery.eta},
                      {"p_max_kw", cfg.battery.p_max_kw},
                      {"specific_mass_kg_per_kwh", cfg.battery.specific_mass_kg_per_kwh}};
  doc["trucks"] = {{"gvwr_kg", cfg.truck.gvwr_kg},
                   {"curb_mass_no_battery_kg", cfg.truck.curb_mass_no_battery_kg},
                   {"max_duty_hours", cfg.truck.max_duty_hours},
                   {"min_rest_hours", cfg.truck.min_rest_hours}};
  doc["vehicle"] = {{"mass_kg", cfg.vehicle.mass_kg},
                    {"accel_ms2", cfg.vehicle.accel_ms2},
                    {"decel_ms2", cfg.vehicle.decel_ms2},
                    {"v_max_kmh", cfg.vehicle.v_max_kmh},
                    {"c_rolling", cfg.vehicle.c_rolling},
                    {"c_drag", cfg.vehicle.c_drag},
                    {"frontal_area_m2", cfg.vehicle.frontal_area_m2},
                    {"air_density", cfg.vehicle.air_density},
                    {"eta_accel", cfg.vehicle.eta_accel},
                    {"eta_cruise", cfg.vehicle.eta_cruise},
                    {"eta_decel", cfg.vehicle.eta_decel}};
  doc["stations"] = json::array();
  for (const auto& s : cfg.stations) {
    doc["stations"].push_back({{"id", s.id}, {"zone", s.zone}, {"slots", s.slots}});
  }
  doc["trips"] = json::array();
  for (const auto& t : cfg.trips) {
    json visits = json::array();
    for (const auto& v : t.visits) {
      visits.push_back({{"station_id", v.station_id},
                        {"consumption_kwh", v.consumption_kwh},
                        {"demand_to_go_kwh", v.demand_to_go_kwh},
                        {"arrival_step", v.arrival_step}});
    }
    doc["trips"].push_back({{"m", t.customer_id},
                            {"q_ini_kwh", t.q_ini_kwh},
                            {"cargo_kg", t.cargo_kg},
                            {"distance_mi", t.distance_mi},
                            {"visits", visits}});
  }
  doc["tariffs"] = {{"grid_price", series_to_json(cfg.tariffs.grid_price)},
                    {"swap_revenue_usd", cfg.tariffs.swap_revenue_usd},
                    {"energy_revenue", series_to_json(cfg.tariffs.energy_revenue)},
                    {"shortage_penalty_usd_per_kwh", cfg.tariffs.shortage_penalty_usd_per_kwh},
                    {"grid_limit_kwh", cfg.tariffs.grid_limit_kwh},
                    {"scc_usd_per_ton", cfg.tariffs.scc_usd_per_ton},
                    {"alpha1", cfg.tariffs.alpha1},
                    {"alpha2", cfg.tariffs.alpha2}};
  json signals;
  if (!cfg.co2_avg.empty()) signals["co2_avg"] = series_to_json(cfg.co2_avg);
  if (!cfg.co2_marginal.empty()) signals["co2_marginal"] = series_to_json(cfg.co2_marginal);
  if (!cfg.ru_price.empty()) signals["ru_price"] = series_to_json(cfg.ru_price);
  if (!cfg.rd_price.empty()) signals["rd_price"] = series_to_json(cfg.rd_price);
  if (!signals.empty()) doc["signals"] = signals;
  if (!cfg.pipeline.demand_file.empty() || !cfg.pipeline.zones_file.empty()) {
    doc["pipeline"] = {{"demand_file", cfg.pipeline.demand_file},
                       {"zones_file", cfg.pipeline.zones_file},
                       {"max_stops", cfg.pipeline.max_stops},
                       {"soc_floor", cfg.pipeline.soc_floor}};
  }
  doc["initial_soe_frac"] = cfg.initial_soe_frac;
  doc["pin_terminal_soe"] = cfg.pin_terminal_soe;
  return doc.dump(2) + "\n";
}

void save_scenario(const ScenarioConfig& cfg, const std::string& json_path) {
  std::ofstream out(json_path);
  if (!out) throw std::runtime_error("cannot write scenario file: " + json_path);
  out << scenario_to_json(cfg);
}

std::vector<TripRequest> load_trips_csv(const std::string& path) {
  csv::Table t = csv::read_file(path);
  const std::vector<std::string> expect = {"m",           "leg_index",      "station_id",
                                           "consumption_kwh", "demand_to_go_kwh", "arrival_step",
                                           "q_ini_kwh",   "cargo_kg",       "distance_mi"};
  if (t.header != expect) {
    throw std::runtime_error("trips CSV " + path + " must have header m,leg_index,station_id," +
                             "consumption_kwh,demand_to_go_kwh,arrival_step,q_ini_kwh,cargo_kg,distance_mi");
  }
  std::map<int, TripRequest> by_id;
  std::map<int, std::map<long, StationVisit>> legs;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string ctx = path + " row " + std::to_string(r + 2);
    if (row.size() != expect.size()) throw std::runtime_error(ctx + ": wrong column count");
    int m = static_cast<int>(csv::to_long(row[0], ctx));
    long leg = csv::to_long(row[1], ctx);
    StationVisit sv;
    sv.station_id = row[2];
    sv.consumption_kwh = csv::to_double(row[3], ctx);
    sv.demand_to_go_kwh = csv::to_double(row[4], ctx);
    sv.arrival_step = static_cast<int>(csv::to_long(row[5], ctx));
    auto& trip = by_id[m];
    trip.customer_id = m;
    trip.q_ini_kwh = csv::to_double(row[6], ctx);
    trip.cargo_kg = csv::to_double(row[7], ctx);
    trip.distance_mi = csv::to_double(row[8], ctx);
    if (!legs[m].emplace(leg, std::move(sv)).second) {
      throw std::runtime_error(ctx + ": duplicate leg_index for customer " + std::to_string(m));
    }
  }
  std::vector<TripRequest> out;
  for (auto& [m, trip] : by_id) {
    for (auto& [leg, sv] : legs[m]) trip.visits.push_back(std::move(sv));
    out.push_back(std::move(trip));
  }
  return out;
}

void save_trips_csv(const std::vector<TripRequest>& trips, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : trips) {
    for (size_t leg = 0; leg < t.visits.size(); ++leg) {
      const auto& v = t.visits[leg];
      rows.push_back({std::to_string(t.customer_id), std::to_string(leg), v.station_id,
                      csv::format_double(v.consumption_kwh), csv::format_double(v.demand_to_go_kwh),
                      std::to_string(v.arrival_step), csv::format_double(t.q_ini_kwh),
                      csv::format_double(t.cargo_kg), csv::format_double(t.distance_mi)});
    }
  }
  csv::write_file(path,
                  {"m", "leg_index", "station_id", "consumption_kwh", "demand_to_go_kwh", "arrival_step",
                   "q_ini_kwh", "cargo_kg", "distance_mi"},
                  rows);
}

std::vector<Violation> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<Violation> out;
  auto add = [&](const std::string& field, const std::string& msg) { out.push_back({field, msg}); };

  if (cfg.grid.t_begin >= cfg.grid.t_end) add("time.t_begin", "t_begin must be strictly before t_end");
  if (cfg.grid.delta_t_h <= 0) add("time.delta_t_h", "time step must be positive");

  if (cfg.battery.capacity_kwh <= 0) add("batteries.capacity_kwh", "capacity must be positive");
  if (!(cfg.battery.eta > 0 && cfg.battery.eta <= 1)) add("batteries.eta", "efficiency must be in (0,1]");
  if (cfg.battery.p_max_kw <= 0) add("batteries.p_max_kw", "charger power limit must be positive");
  if (cfg.battery.specific_mass_kg_per_kwh <= 0) add("batteries.specific_mass_kg_per_kwh", "must be positive");

  try {
    payload_kg(cfg.battery, cfg.truck);
  } catch (const std::domain_error&) {
    add("batteries.capacity_kwh", "battery mass exceeds GVWR payload allowance");
  }
  try {
    cfg.vehicle.validate();
  } catch (const std::exception& e) {
    add("vehicle", e.what());
  }

  std::set<std::string> station_ids;
  for (const auto& s : cfg.stations) {
    if (s.id.empty()) add("stations.id", "station id must be non-empty");
    if (!station_ids.insert(s.id).second) add("stations.id", "duplicate station id '" + s.id + "'");
    std::set<int> slot_ids(s.slots.begin(), s.slots.end());
    if (slot_ids.size() != s.slots.size()) {
      add("stations[" + s.id + "].slots", "slot indices must be unique within a station");
    }
    if (s.slots.empty()) add("stations[" + s.id + "].slots", "station has no battery slots");
  }

  std::set<int> customer_ids;
  for (const auto& t : cfg.trips) {
    const std::string who = "trips[m=" + std::to_string(t.customer_id) + "]";
    if (!customer_ids.insert(t.customer_id).second) add(who + ".m", "duplicate customer id");
    if (t.q_ini_kwh < 0 || t.q_ini_kwh > cfg.battery.capacity_kwh + 1e-9) {
      add(who + ".q_ini_kwh", "initial vehicle energy must lie in [0, battery capacity]");
    }
    if (static_cast<int>(t.visits.size()) > cfg.pipeline.max_stops) {
      add(who + ".visits", "more than max_stops station visits");
    }
    double prev_e = std::numeric_limits<double>::infinity();
    std::set<std::string> seen;
    for (const auto& v : t.visits) {
      if (!station_ids.count(v.station_id)) {
        add(who + ".visits.station_id", "unknown station '" + v.station_id + "'");
      }
      if (!seen.insert(v.station_id).second) {
        add(who + ".visits.station_id", "route visits station '" + v.station_id + "' twice");
      }
      if (!cfg.grid.contains(v.arrival_step)) {
        add(who + ".visits.arrival_step",
            "arrival step " + std::to_string(v.arrival_step) + " outside the time grid");
      }
      if (v.consumption_kwh < 0) add(who + ".visits.consumption_kwh", "leg consumption must be non-negative");
      if (v.demand_to_go_kwh < 0) add(who + ".visits.demand_to_go_kwh", "demand-to-go must be non-negative");
      if (v.demand_to_go_kwh > prev_e + 1e-9) {
        add(who + ".visits.demand_to_go_kwh", "demand-to-go must be non-increasing along the route");
      }
      prev_e = v.demand_to_go_kwh;
    }
  }

  if (cfg.tariffs.grid_price.empty()) add("tariffs.grid_price", "grid price series is required");
  if (cfg.tariffs.energy_revenue.empty()) add("tariffs.energy_revenue", "energy revenue series is required");
  if (!cfg.tariffs.energy_revenue.empty() &&
      cfg.tariffs.shortage_penalty_usd_per_kwh <= cfg.tariffs.energy_revenue.values.maxCoeff()) {
    add("tariffs.shortage_penalty_usd_per_kwh",
        "shortage cheaper than service: penalty must exceed every energy revenue");
  }
  if (cfg.tariffs.grid_limit_kwh <= 0) add("tariffs.grid_limit_kwh", "grid exchange limit must be positive");
  if (cfg.tariffs.alpha1 < 0 || cfg.tariffs.alpha1 > 1) add("tariffs.alpha1", "must lie in [0,1]");
  if (cfg.tariffs.alpha2 < 0 || cfg.tariffs.alpha2 > 1) add("tariffs.alpha2", "must lie in [0,1]");
  if (cfg.tariffs.scc_usd_per_ton < 0) add("tariffs.scc_usd_per_ton", "carbon cost must be non-negative");

  if (cfg.initial_soe_frac < 0 || cfg.initial_soe_frac > 1) add("initial_soe_frac", "must lie in [0,1]");
  if (cfg.pipeline.max_stops < 0) add("pipeline.max_stops", "must be non-negative");
  if (cfg.pipeline.soc_floor < 0 || cfg.pipeline.soc_floor >= 1) add("pipeline.soc_floor", "must lie in [0,1)");

  return out;
}

}  // namespace swapnet
