#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "swapnet/scenario.hpp"
#include "test_support.hpp"

using namespace swapnet;
namespace fs = std::filesystem;

namespace {
ScenarioConfig valid_config() {
  ScenarioConfig cfg = testing::tiny_scenario();
  testing::add_trip(cfg, {0, 60, {{"S1", 40, 50, 2}}});
  return cfg;
}
}  // namespace

TEST_CASE("a consistent scenario validates cleanly") {
  ScenarioConfig cfg = valid_config();
  cfg.battery.eta = 1.0;
  CHECK(validate_scenario(cfg).empty());
}

TEST_CASE("q_ini above capacity is flagged by name") {
  ScenarioConfig cfg = valid_config();
  cfg.trips[0].q_ini_kwh = 900;  // on a 100 kWh pack
  auto v = validate_scenario(cfg);
  REQUIRE(!v.empty());
  bool named = false;
  for (const auto& viol : v) {
    if (viol.field.find("q_ini") != std::string::npos) named = true;
  }
  CHECK(named);
}

TEST_CASE("shortage cheaper than service is rejected at load time") {
  ScenarioConfig cfg = valid_config();
  cfg.tariffs.shortage_penalty_usd_per_kwh = 0.1;
  cfg.tariffs.energy_revenue = constant_series(SeriesKind::lmp, cfg.grid, 0.5);
  auto v = validate_scenario(cfg);
  REQUIRE(!v.empty());
  bool found = false;
  for (const auto& viol : v) {
    if (viol.message.find("shortage cheaper than service") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_CASE("demand-to-go must not increase along the route") {
  ScenarioConfig cfg = valid_config();
  cfg.stations.push_back({"S2", "B", {0}});
  cfg.trips[0].visits.push_back({"S2", 10, 80, 4});  // 80 > 50 upstream
  auto v = validate_scenario(cfg);
  bool found = false;
  for (const auto& viol : v) {
    if (viol.message.find("non-increasing") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_CASE("arrivals outside the grid and unknown stations are violations") {
  ScenarioConfig cfg = valid_config();
  cfg.trips[0].visits[0].arrival_step = 99;
  cfg.trips[0].visits.push_back({"NOPE", 1, 1, 3});
  auto v = validate_scenario(cfg);
  int hits = 0;
  for (const auto& viol : v) {
    if (viol.message.find("outside the time grid") != std::string::npos) ++hits;
    if (viol.message.find("unknown station") != std::string::npos) ++hits;
  }
  CHECK(hits >= 2);
}

TEST_CASE("scenario JSON round-trip is the identity") {
  ScenarioConfig cfg = valid_config();
  cfg.co2_avg = constant_series(SeriesKind::co2_avg, cfg.grid, 4e-4);
  cfg.pipeline.max_stops = 3;
  cfg.pin_terminal_soe = true;

  std::string text = scenario_to_json(cfg);
  ScenarioConfig back = parse_scenario(text, "");

  CHECK(back.grid.t_begin == cfg.grid.t_begin);
  CHECK(back.grid.t_end == cfg.grid.t_end);
  CHECK(back.grid.delta_t_h == cfg.grid.delta_t_h);
  CHECK(back.battery.capacity_kwh == cfg.battery.capacity_kwh);
  CHECK(back.battery.eta == cfg.battery.eta);
  CHECK(back.battery.p_max_kw == cfg.battery.p_max_kw);
  CHECK(back.truck.gvwr_kg == cfg.truck.gvwr_kg);
  REQUIRE(back.stations.size() == cfg.stations.size());
  CHECK(back.stations[0].slots == cfg.stations[0].slots);
  REQUIRE(back.trips.size() == cfg.trips.size());
  CHECK(back.trips[0].q_ini_kwh == cfg.trips[0].q_ini_kwh);
  REQUIRE(back.trips[0].visits.size() == cfg.trips[0].visits.size());
  CHECK(back.trips[0].visits[0].demand_to_go_kwh == cfg.trips[0].visits[0].demand_to_go_kwh);
  CHECK(back.tariffs.grid_price.values == cfg.tariffs.grid_price.values);
  CHECK(back.tariffs.shortage_penalty_usd_per_kwh == cfg.tariffs.shortage_penalty_usd_per_kwh);
  CHECK(back.co2_avg.values == cfg.co2_avg.values);
  CHECK(back.pipeline.max_stops == cfg.pipeline.max_stops);
  CHECK(back.pin_terminal_soe == cfg.pin_terminal_soe);

  // and the serialized form is stable
  CHECK(scenario_to_json(back) == text);
}

TEST_CASE("trips CSV round-trip preserves every leg") {
  ScenarioConfig cfg = valid_config();
  cfg.stations.push_back({"S2", "B", {0, 1}});
  testing::add_trip(cfg, {1, 100, {{"S1", 30, 90, 1}, {"S2", 45, 45, 3}}});

  fs::path dir = fs::temp_directory_path() / "swapnet_trips_test";
  fs::create_directories(dir);
  std::string path = (dir / "trips.csv").string();
  save_trips_csv(cfg.trips, path);
  auto back = load_trips_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[1].visits.size() == 2);
  CHECK(back[1].visits[1].station_id == "S2");
  CHECK(back[1].visits[1].demand_to_go_kwh == 45);
  fs::remove_all(dir);
}

TEST_CASE("malformed scenario files throw parse errors") {
  CHECK_THROWS_WITH_AS(parse_scenario("{not json", ""), doctest::Contains("parse error"),
                       std::runtime_error);
  CHECK_THROWS_AS(parse_scenario("{\"time\": {}}", ""), std::runtime_error);
  CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), std::runtime_error);
}

TEST_CASE("domain symbols map to exactly one owning field") {
  // One row per exogenous symbol in the formulation: name -> owning field.
  const std::vector<std::pair<std::string, std::string>> table = {
      {"t_b/t_e", "TimeGrid.t_begin/t_end"},
      {"delta_t", "TimeGrid.delta_t_h"},
      {"Q", "BatterySpec.capacity_kwh"},
      {"eta", "BatterySpec.eta"},
      {"P_bar", "BatterySpec.p_max_kw"},
      {"E_bar", "Tariffs.grid_limit_kwh"},
      {"F_G", "Tariffs.grid_price"},
      {"R_sw", "Tariffs.swap_revenue_usd"},
      {"R_en", "Tariffs.energy_revenue"},
      {"P_en", "Tariffs.shortage_penalty_usd_per_kwh"},
      {"alpha_1", "Tariffs.alpha1"},
      {"alpha_2", "Tariffs.alpha2"},
      {"SCC", "Tariffs.scc_usd_per_ton"},
      {"xi_co2", "ScenarioConfig.co2_avg/co2_marginal"},
      {"Q_ini", "TripRequest.q_ini_kwh"},
      {"C_ms", "StationVisit.consumption_kwh"},
      {"E_ms", "StationVisit.demand_to_go_kwh"},
      {"T_ms", "StationVisit.arrival_step"},
      {"N", "ScenarioConfig.trips.size()"},
      {"B_cap", "CbaConfig.capital_usd_per_kwh_day()"},
      {"RU/RD", "ScenarioConfig.ru_price/rd_price"},
  };
  std::set<std::string> symbols, fields;
  for (const auto& [sym, field] : table) {
    CHECK(!sym.empty());
    CHECK(!field.empty());
    CHECK(symbols.insert(sym).second);   // symbol listed once
    CHECK(fields.insert(field).second);  // and owned by one field
  }
}
