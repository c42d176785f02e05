#include "swapnet/runner.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "swapnet/csv.hpp"
#include "swapnet/netdecomp.hpp"
#include "swapnet/trips.hpp"

namespace swapnet {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

StayTimes preset_stay_times(const std::string& preset) {
  if (preset == "baseline") return {1.0, 0.5};
  if (preset == "appC-1") return {0.5, 0.25};
  if (preset == "appC-2") return {1.0 / 3.0, 1.0 / 6.0};
  if (preset == "appC-3") return {0.25, 0.25};
  throw ValidationFailure("unknown preset '" + preset + "' (baseline, appC-1, appC-2, appC-3)");
}

namespace {

template <typename F>
void parallel_for(int n, int workers, F&& f) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto body = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int w = 0; w < std::min(workers, n); ++w) threads.emplace_back(body);
  for (auto& t : threads) t.join();
  if (err) std::rethrow_exception(err);
}

SolveLimits limits_of(const RunManifest& man) {
  SolveLimits lim;
  lim.mip_gap = man.gap;
  lim.time_limit_s = man.time_limit_s;
  lim.node_limit = man.node_limit;
  lim.max_binaries = man.max_binaries;
  return lim;
}

Solution solve_model(const MilpModel& model, const RunManifest& man, const std::string& what) {
  Solution sol = man.solver_cmd.empty() ? solve_exact(model, limits_of(man))
                                        : solve_external(model, limits_of(man), man.solver_cmd);
  if (sol.status == SolveStatus::infeasible) throw InfeasibleError(what + ": model is infeasible");
  if (sol.status == SolveStatus::unbounded) throw std::runtime_error(what + ": model is unbounded");
  if (sol.status == SolveStatus::error) throw std::runtime_error(what + ": solver error");
  if (sol.values.empty()) throw std::runtime_error(what + ": solver hit limits without an incumbent");
  return sol;
}

void require_valid(const MilpModel& model, const Solution& sol, const std::string& what) {
  auto violations = validate_solution(model, sol);
  if (!violations.empty()) {
    std::string msg = what + ": solution fails validation:";
    for (size_t i = 0; i < violations.size() && i < 5; ++i) msg += "\n  " + violations[i].detail;
    if (violations.size() > 5) msg += "\n  (+" + std::to_string(violations.size() - 5) + " more)";
    throw ValidationFailure(msg);
  }
}

ScenarioConfig load_validated(const std::string& path) {
  if (!fs::exists(path)) throw EnvironmentError("scenario file not found: " + path);
  ScenarioConfig cfg = load_scenario(path);
  auto violations = validate_scenario(cfg);
  if (!violations.empty()) {
    std::string msg = "scenario invalid:";
    for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.message;
    throw ValidationFailure(msg);
  }
  return cfg;
}

std::string fmt(double v) { return csv::format_double(v); }

void write_manifest_echo(const RunManifest& man) {
  json doc;
  doc["scenario"] = man.scenario_path;
  doc["mode"] = man.mode;
  doc["preset"] = man.preset;
  doc["gap"] = man.gap;
  doc["time_limit_s"] = std::isfinite(man.time_limit_s) ? json(man.time_limit_s) : json(nullptr);
  doc["solver_cmd"] = man.solver_cmd;
  doc["workers"] = man.workers;
  doc["out"] = man.out_dir;
  doc["as_mode"] = man.as_mode;
  doc["scc_grid"] = man.scc_grid;
  doc["battery_sweep_kwh"] = man.battery_sweep_kwh;
  doc["beta1"] = man.beta1;
  doc["beta2"] = man.beta2;
  std::ofstream f(fs::path(man.out_dir) / "run_manifest.json");
  f << doc.dump(2) << "\n";
}

void write_summary_json(const std::string& out_dir, const json& doc) {
  std::ofstream f(fs::path(out_dir) / "run_summary.json");
  f << doc.dump(2) << "\n";
}

// ---- solution readers -----------------------------------------------------

double total_swaps(const ModelBuild& build, const Solution& sol) {
  double n = 0;
  for (const auto& p : build.index.packs) {
    for (int t = build.index.grid.t_begin; t <= build.index.grid.t_end; ++t) {
      n += sol.at(names::z(p.station, p.slot, t));
    }
  }
  return n;
}

double total_shortage(const ModelBuild& build, const Solution& sol) {
  double n = 0;
  for (const auto& v : build.index.visits) {
    n += sol.at(names::q_shrt(build.index.customers[v.customer].customer_id, v.station));
  }
  return n;
}

}  // namespace

std::vector<double> grid_energy_profile(const ModelBuild& build, const Solution& solution) {
  std::vector<double> out;
  for (int t = build.index.grid.t_begin; t <= build.index.grid.t_end; ++t) {
    out.push_back(solution.at(names::e_grid(t)));
  }
  return out;
}

double emissions_tons(const ScenarioConfig& config, const TimeSeries& factor,
                      const std::vector<double>& grid_energy) {
  TimeSeries xi = resample(factor, config.grid);
  double tons = 0;
  for (size_t i = 0; i < grid_energy.size(); ++i) tons += xi.values[static_cast<Eigen::Index>(i)] * grid_energy[i];
  return tons;
}

ProfitBreakdown profit_breakdown(const ScenarioConfig& config, const ModelBuild& build,
                                 const Solution& solution, OperationsOptions::AsMode as_mode) {
  ProfitBreakdown pb;
  const TimeGrid& grid = config.grid;
  TimeSeries price = resample(config.tariffs.grid_price, grid);
  TimeSeries revenue = resample(config.tariffs.energy_revenue, grid);

  for (int t = grid.t_begin; t <= grid.t_end; ++t) {
    pb.grid_cost += price.values[t - grid.t_begin] * solution.at(names::e_grid(t));
  }
  pb.swap_revenue = config.tariffs.swap_revenue_usd * total_swaps(build, solution);
  for (const auto& v : build.index.visits) {
    int m_id = build.index.customers[v.customer].customer_id;
    pb.energy_revenue += revenue.values[v.arrival_step - grid.t_begin] * solution.at(names::q_s2v(m_id, v.station));
    pb.shortage_penalty +=
        config.tariffs.shortage_penalty_usd_per_kwh * solution.at(names::q_shrt(m_id, v.station));
  }
  if (as_mode == OperationsOptions::AsMode::capacity) {
    TimeSeries ru = resample(config.ru_price, grid);
    TimeSeries rd = resample(config.rd_price, grid);
    for (int t = grid.t_begin; t <= grid.t_end; ++t) {
      int i = t - grid.t_begin;
      pb.as_revenue += rd.values[i] * solution.at(names::rd(t));
      pb.as_revenue += (ru.values[i] - price.values[i]) * solution.at(names::ru(t));
    }
  } else if (as_mode == OperationsOptions::AsMode::verbatim) {
    TimeSeries ru = resample(config.ru_price, grid);
    TimeSeries rd = resample(config.rd_price, grid);
    for (int t = grid.t_begin; t <= grid.t_end; ++t) {
      int i = t - grid.t_begin;
      pb.as_revenue -= (ru.values[i] + rd.values[i]) * solution.at(names::e_grid(t));
    }
  }
  return pb;
}

namespace {

// ---- artifact writers ------------------------------------------------------

void write_sizing_csv(const std::string& out_dir, const ModelBuild& build, const Solution& sol,
                      double capacity_kwh) {
  std::vector<std::vector<std::string>> rows;
  double total = 0;
  for (size_t s = 0; s < build.index.stations.size(); ++s) {
    double installed = 0;
    for (const auto& p : build.index.packs) {
      if (p.station == static_cast<int>(s)) installed += sol.at(names::y(p.station, p.slot));
    }
    installed = std::round(installed);
    total += installed;
    rows.push_back({build.index.stations[s].id, fmt(installed), fmt(installed * capacity_kwh)});
  }
  rows.push_back({"TOTAL", fmt(total), fmt(total * capacity_kwh)});
  csv::write_file((fs::path(out_dir) / "sizing.csv").string(), {"station", "batteries", "capacity_kwh"},
                  rows);
}

void write_schedule_csv(const std::string& out_dir, const ModelBuild& build, const Solution& sol) {
  const TimeGrid& grid = build.index.grid;
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : build.index.packs) {
    for (int t = grid.t_begin; t <= grid.t_end; ++t) {
      double z = sol.at(names::z(p.station, p.slot, t));
      std::string customer;
      if (z > 0.5) {
        auto it = build.index.arrivals.find({p.station, t});
        if (it != build.index.arrivals.end()) {
          for (int w : it->second) {
            int m_id = build.index.customers[build.index.visits[w].customer].customer_id;
            if (sol.at(names::x(p.station, p.slot, m_id)) > 0.5) customer = std::to_string(m_id);
          }
        }
      }
      rows.push_back({build.index.stations[p.station].id, std::to_string(p.slot), std::to_string(t),
                      fmt(std::round(z)), customer, fmt(sol.at(names::p_chg(p.station, p.slot, t))),
                      fmt(sol.at(names::p_dsg(p.station, p.slot, t))),
                      fmt(sol.at(names::q(p.station, p.slot, t)))});
    }
  }
  csv::write_file((fs::path(out_dir) / "schedule.csv").string(),
                  {"station", "battery", "t", "z", "customer", "p_chg_kw", "p_dsg_kw", "soe_kwh"}, rows);
}

void write_grid_csv(const std::string& out_dir, const ScenarioConfig& cfg, const ModelBuild& build,
                    const Solution& sol) {
  const TimeGrid& grid = cfg.grid;
  TimeSeries price = resample(cfg.tariffs.grid_price, grid);
  std::vector<std::vector<std::string>> rows;
  for (int t = grid.t_begin; t <= grid.t_end; ++t) {
    double soe = 0;
    for (const auto& p : build.index.packs) soe += sol.at(names::q(p.station, p.slot, t));
    rows.push_back({std::to_string(t), fmt(sol.at(names::e_grid(t))), fmt(price.values[t - grid.t_begin]),
                    fmt(soe)});
  }
  csv::write_file((fs::path(out_dir) / "grid.csv").string(),
                  {"t", "e_grid_kwh", "price_usd_per_kwh", "total_soe_kwh"}, rows);
}

void write_profit_csv(const std::string& out_dir, const ProfitBreakdown& pb) {
  std::vector<std::vector<std::string>> rows = {
      {"grid_cost", fmt(pb.grid_cost)},          {"swap_revenue", fmt(pb.swap_revenue)},
      {"energy_revenue", fmt(pb.energy_revenue)}, {"shortage_penalty", fmt(pb.shortage_penalty)},
      {"as_revenue", fmt(pb.as_revenue)},        {"net_profit", fmt(pb.net_profit())}};
  csv::write_file((fs::path(out_dir) / "profit.csv").string(), {"component", "usd"}, rows);
}

// ---- modes -----------------------------------------------------------------

void run_plan(const RunManifest& man) {
  ScenarioConfig cfg = load_validated(man.scenario_path);
  ModelBuild build = build_planning_model(cfg);
  Solution sol = solve_model(build.model, man, "plan");
  require_valid(build.model, sol, "plan");

  write_sizing_csv(man.out_dir, build, sol, cfg.battery.capacity_kwh);
  build.model.dump_constraints_csv((fs::path(man.out_dir) / "constraints.csv").string());

  json summary;
  summary["mode"] = "plan";
  summary["objective"] = sol.objective;
  summary["gap"] = sol.gap;
  summary["status"] = to_string(sol.status);
  summary["batteries_installed"] = sol.objective;
  summary["swaps"] = total_swaps(build, sol);
  summary["shortage_kwh"] = total_shortage(build, sol);
  summary["warnings"] = build.warnings;
  write_summary_json(man.out_dir, summary);
}

void run_operate(const RunManifest& man) {
  ScenarioConfig cfg = load_validated(man.scenario_path);
  OperationsOptions opts;
  opts.satisfaction = OperationsOptions::Satisfaction::thresholds;
  ModelBuild build = build_operations_model(cfg, opts);
  Solution sol = solve_model(build.model, man, "operate");
  require_valid(build.model, sol, "operate");

  write_schedule_csv(man.out_dir, build, sol);
  write_grid_csv(man.out_dir, cfg, build, sol);
  ProfitBreakdown pb = profit_breakdown(cfg, build, sol, OperationsOptions::AsMode::off);
  write_profit_csv(man.out_dir, pb);
  build.model.dump_constraints_csv((fs::path(man.out_dir) / "constraints.csv").string());

  json summary;
  summary["mode"] = "operate";
  summary["objective"] = sol.objective;
  summary["gap"] = sol.gap;
  summary["status"] = to_string(sol.status);
  summary["swaps"] = total_swaps(build, sol);
  summary["shortage_kwh"] = total_shortage(build, sol);
  summary["net_profit_usd"] = pb.net_profit();
  summary["warnings"] = build.warnings;
  write_summary_json(man.out_dir, summary);
}

struct SweepPoint {
  double size = 0;
  EfficiencyReport bss, fcs;
  double penetration = 1.0;
  double station_kwh = 0;
};

SweepPoint evaluate_battery_size(const ScenarioConfig& cfg, const RunManifest& man,
                                 const std::vector<RawDemand>& demand, const ZoneGraph& zones,
                                 double size) {
  SweepPoint pt;
  pt.size = size;
  ScenarioConfig local = cfg;
  local.battery.capacity_kwh = size;

  ChainResult chain = chain_round_trips(demand, local.battery);
  RoutingParams rp{cfg.pipeline.max_stops, cfg.pipeline.soc_floor, cfg.grid.t_begin};
  std::vector<RoutedTrip> routed = route_residual_trips(chain.residual, zones, cfg.stations, local.battery,
                                                        cfg.truck, cfg.vehicle, rp, cfg.grid);

  std::vector<TruckDay> days;
  for (const auto& it : chain.chained) days.push_back({it.distance_mi, 0});
  int excluded = 0;
  local.trips.clear();
  for (const auto& r : routed) {
    if (!r.feasible) {
      ++excluded;
      continue;
    }
    days.push_back({r.request.distance_mi, static_cast<int>(r.request.visits.size())});
    local.trips.push_back(r.request);
  }
  if (!chain.residual.empty()) {
    pt.penetration =
        penetration_rate(chain.residual, zones, cfg.stations, local.battery, cfg.vehicle, rp, cfg.grid);
  }

  if (!local.trips.empty()) {
    ModelBuild build = build_planning_model(local);
    Solution sol = solve_model(build.model, man, "compare planning @" + fmt(size) + " kWh");
    require_valid(build.model, sol, "compare planning");
    pt.station_kwh = std::round(sol.objective) * size;
  }

  StayTimes stays = preset_stay_times(man.preset);
  pt.bss = simulate_day(Mechanism::bss, days, local.battery, cfg.truck, cfg.vehicle, stays, pt.station_kwh,
                        excluded);
  pt.fcs = simulate_day(Mechanism::fcs, days, local.battery, cfg.truck, cfg.vehicle, stays, 0.0, excluded);
  return pt;
}

void run_compare(const RunManifest& man) {
  ScenarioConfig cfg = load_validated(man.scenario_path);
  if (cfg.pipeline.demand_file.empty() || cfg.pipeline.zones_file.empty()) {
    throw ValidationFailure("compare mode needs pipeline.demand_file and pipeline.zones_file in the scenario");
  }
  std::vector<RawDemand> demand = load_demand_csv(cfg.pipeline.demand_file, cfg.vehicle);
  ZoneGraph zones = ZoneGraph::load_csv(cfg.pipeline.zones_file);

  std::vector<SweepPoint> points(man.battery_sweep_kwh.size());
  parallel_for(static_cast<int>(points.size()), man.workers, [&](int i) {
    points[i] = evaluate_battery_size(cfg, man, demand, zones, man.battery_sweep_kwh[i]);
  });

  std::vector<EfficiencyReport> reports;
  std::vector<std::vector<std::string>> eff_rows, pen_rows;
  for (const auto& pt : points) {
    for (const auto* rep : {&pt.bss, &pt.fcs}) {
      eff_rows.push_back({fmt(pt.size), to_string(rep->mechanism), fmt(rep->tmph()), fmt(rep->tmpkwh())});
      reports.push_back(*rep);
    }
    pen_rows.push_back({fmt(pt.size), std::to_string(cfg.pipeline.max_stops), fmt(pt.penetration)});
  }
  csv::write_file((fs::path(man.out_dir) / "efficiency.csv").string(),
                  {"battery_kwh", "mechanism", "tmph", "tmpkwh"}, eff_rows);
  csv::write_file((fs::path(man.out_dir) / "penetration.csv").string(), {"battery_kwh", "max_stops", "rate"},
                  pen_rows);

  CbaConfig cba;
  FrontierResult frontier = cost_frontier(reports, cba);
  std::vector<std::vector<std::string>> frontier_rows;
  for (const auto& p : frontier.points) {
    frontier_rows.push_back({fmt(p.battery_kwh), to_string(p.mechanism), fmt(p.daily_cost_usd)});
  }
  csv::write_file((fs::path(man.out_dir) / "frontier.csv").string(),
                  {"battery_kwh", "mechanism", "daily_cost"}, frontier_rows);

  json summary;
  summary["mode"] = "compare";
  summary["preset"] = man.preset;
  summary["argmin_bss_kwh"] = frontier.argmin_bss_kwh;
  summary["argmin_fcs_kwh"] = frontier.argmin_fcs_kwh;
  summary["isoline_slope_h_per_kwh"] = frontier.isoline_slope_h_per_kwh;
  write_summary_json(man.out_dir, summary);
}

// Fast-charging has no load-shifting freedom: every stop draws its full
// recharge from the grid in the arrival step.
struct FcsOutcome {
  std::vector<double> grid_energy;
  double profit = 0;
};

FcsOutcome simulate_fcs_station(const ScenarioConfig& cfg) {
  const TimeGrid& grid = cfg.grid;
  TimeSeries price = resample(cfg.tariffs.grid_price, grid);
  TimeSeries revenue = resample(cfg.tariffs.energy_revenue, grid);
  FcsOutcome out;
  out.grid_energy.assign(grid.num_steps(), 0.0);
  for (const auto& trip : cfg.trips) {
    double soe = trip.q_ini_kwh;
    for (const auto& v : trip.visits) {
      soe -= v.consumption_kwh;
      double delivered = cfg.battery.capacity_kwh - soe;  // charge to full
      soe = cfg.battery.capacity_kwh;
      int i = v.arrival_step - grid.t_begin;
      out.grid_energy[i] += delivered / cfg.battery.eta;
      out.profit += revenue.values[i] * delivered - price.values[i] * delivered / cfg.battery.eta;
    }
  }
  return out;
}

void run_carbon_sweep(const RunManifest& man) {
  ScenarioConfig cfg = load_validated(man.scenario_path);
  if (cfg.co2_avg.empty() || cfg.co2_marginal.empty()) {
    throw ValidationFailure("carbon-sweep needs co2_avg and co2_marginal signals in the scenario");
  }

  struct Point {
    std::string factor;
    double scc = 0;
    double emissions = 0;
    double profit = 0;
  };
  struct Case {
    OperationsOptions::EmissionFactor factor;
    double scc;
  };
  std::vector<Case> cases;
  for (auto factor :
       {OperationsOptions::EmissionFactor::average, OperationsOptions::EmissionFactor::marginal}) {
    for (double scc : man.scc_grid) cases.push_back({factor, scc});
  }

  std::vector<Point> points(cases.size());
  parallel_for(static_cast<int>(cases.size()), man.workers, [&](int i) {
    OperationsOptions opts;
    opts.satisfaction = OperationsOptions::Satisfaction::thresholds;
    opts.scc_usd_per_ton = cases[i].scc;
    opts.factor = cases[i].factor;
    ModelBuild build = build_operations_model(cfg, opts);
    Solution sol = solve_model(build.model, man, "carbon-sweep");
    require_valid(build.model, sol, "carbon-sweep");
    auto eg = grid_energy_profile(build, sol);
    const TimeSeries& xi =
        cases[i].factor == OperationsOptions::EmissionFactor::average ? cfg.co2_avg : cfg.co2_marginal;
    Point& pt = points[i];
    pt.factor = cases[i].factor == OperationsOptions::EmissionFactor::average ? "avg" : "marginal";
    pt.scc = cases[i].scc;
    pt.emissions = emissions_tons(cfg, xi, eg);
    pt.profit = profit_breakdown(cfg, build, sol, OperationsOptions::AsMode::off).net_profit();
  });

  // Reference: BSS at zero carbon cost, measured under each factor.
  std::map<std::string, Point> base;
  for (const auto& pt : points) {
    if (pt.scc == 0) base[pt.factor] = pt;
  }

  FcsOutcome fcs = simulate_fcs_station(cfg);

  std::vector<std::vector<std::string>> rows;
  for (const auto& pt : points) {
    const Point& b = base.at(pt.factor);
    rows.push_back({"BSS", pt.factor, fmt(pt.scc), fmt(pt.emissions), fmt(pt.profit),
                    fmt(b.emissions == 0 ? 0 : (pt.emissions - b.emissions) / std::abs(b.emissions) * 100.0),
                    fmt(b.profit == 0 ? 0 : (pt.profit - b.profit) / std::abs(b.profit) * 100.0)});
  }
  for (const auto& factor : {std::string("avg"), std::string("marginal")}) {
    const Point& b = base.at(factor);
    double em = emissions_tons(cfg, factor == "avg" ? cfg.co2_avg : cfg.co2_marginal, fcs.grid_energy);
    rows.push_back({"FCS", factor, "0", fmt(em), fmt(fcs.profit),
                    fmt(b.emissions == 0 ? 0 : (em - b.emissions) / std::abs(b.emissions) * 100.0),
                    fmt(b.profit == 0 ? 0 : (fcs.profit - b.profit) / std::abs(b.profit) * 100.0)});
  }
  csv::write_file((fs::path(man.out_dir) / "carbon.csv").string(),
                  {"mechanism", "factor", "scc_usd_per_ton", "emissions_tons", "profit_usd",
                   "emissions_delta_pct", "profit_delta_pct"},
                  rows);

  json summary;
  summary["mode"] = "carbon-sweep";
  summary["scc_grid"] = man.scc_grid;
  summary["baseline_profit_usd"] = base.at("marginal").profit;
  summary["baseline_emissions_tons_marginal"] = base.at("marginal").emissions;
  write_summary_json(man.out_dir, summary);
}

void run_as_study(const RunManifest& man) {
  ScenarioConfig cfg = load_validated(man.scenario_path);
  if (cfg.ru_price.empty() || cfg.rd_price.empty()) {
    throw ValidationFailure("as-study needs ru_price and rd_price signals in the scenario");
  }
  OperationsOptions::AsMode as_mode;
  if (man.as_mode == "capacity") {
    as_mode = OperationsOptions::AsMode::capacity;
  } else if (man.as_mode == "verbatim") {
    as_mode = OperationsOptions::AsMode::verbatim;
  } else {
    throw ValidationFailure("unknown as_mode '" + man.as_mode + "' (capacity or verbatim)");
  }

  auto solve_case = [&](OperationsOptions::AsMode mode) {
    OperationsOptions opts;
    opts.satisfaction = OperationsOptions::Satisfaction::thresholds;
    opts.as_mode = mode;
    ModelBuild build = build_operations_model(cfg, opts);
    Solution sol = solve_model(build.model, man, "as-study");
    require_valid(build.model, sol, "as-study");
    return std::pair<ModelBuild, Solution>(std::move(build), std::move(sol));
  };

  auto [build_without, sol_without] = solve_case(OperationsOptions::AsMode::off);
  auto [build_with, sol_with] = solve_case(as_mode);

  ProfitBreakdown pb_without =
      profit_breakdown(cfg, build_without, sol_without, OperationsOptions::AsMode::off);
  ProfitBreakdown pb_with = profit_breakdown(cfg, build_with, sol_with, as_mode);

  std::vector<std::vector<std::string>> rows;
  auto push = [&](const std::string& label, const ProfitBreakdown& pb) {
    rows.push_back({label, fmt(pb.grid_cost), fmt(pb.swap_revenue), fmt(pb.energy_revenue),
                    fmt(pb.shortage_penalty), fmt(pb.as_revenue), fmt(pb.net_profit())});
  };
  push("without_as", pb_without);
  push("with_as", pb_with);
  csv::write_file((fs::path(man.out_dir) / "as_profit.csv").string(),
                  {"case", "grid_cost_usd", "swap_revenue_usd", "energy_revenue_usd",
                   "shortage_penalty_usd", "as_revenue_usd", "net_profit_usd"},
                  rows);

  double ru_total = 0, rd_total = 0;
  if (as_mode == OperationsOptions::AsMode::capacity) {
    for (int t = cfg.grid.t_begin; t <= cfg.grid.t_end; ++t) {
      ru_total += sol_with.at(names::ru(t));
      rd_total += sol_with.at(names::rd(t));
    }
  }

  json summary;
  summary["mode"] = "as-study";
  summary["as_mode"] = man.as_mode;
  summary["profit_without_as_usd"] = pb_without.net_profit();
  summary["profit_with_as_usd"] = pb_with.net_profit();
  summary["regulation_up_kwh"] = ru_total;
  summary["regulation_down_kwh"] = rd_total;
  write_summary_json(man.out_dir, summary);
}

void run_decompose(const RunManifest& man) {
  ScenarioConfig cfg = load_validated(man.scenario_path);
  if (cfg.pipeline.demand_file.empty() || cfg.pipeline.zones_file.empty()) {
    throw ValidationFailure("decompose mode needs pipeline.demand_file and pipeline.zones_file");
  }
  std::vector<RawDemand> demand = load_demand_csv(cfg.pipeline.demand_file, cfg.vehicle);
  ZoneGraph zones = ZoneGraph::load_csv(cfg.pipeline.zones_file);

  DemandNetwork net;
  std::map<std::pair<std::string, std::string>, const RawDemand*> by_od;
  for (const auto& d : demand) {
    net.edges.push_back({d.origin, d.destination, d.frequency});
    by_od[{d.origin, d.destination}] = &d;
  }
  Decomposition dec = decompose(net, man.beta1, man.beta2);

  auto solve_tier = [&](const DemandNetwork& tier) {
    TierResult res;
    if (tier.edges.empty()) return res;
    std::vector<RawDemand> tier_demand;
    for (const auto& e : tier.edges) {
      RawDemand d = *by_od.at({e.origin, e.destination});
      d.frequency = e.frequency;
      tier_demand.push_back(d);
      res.trips += e.frequency;
    }
    ChainResult chain = chain_round_trips(tier_demand, cfg.battery);
    RoutingParams rp{cfg.pipeline.max_stops, cfg.pipeline.soc_floor, cfg.grid.t_begin};
    std::vector<RoutedTrip> routed = route_residual_trips(chain.residual, zones, cfg.stations, cfg.battery,
                                                          cfg.truck, cfg.vehicle, rp, cfg.grid);
    ScenarioConfig local = cfg;
    local.trips.clear();
    for (const auto& r : routed) {
      if (r.feasible) local.trips.push_back(r.request);
    }
    if (!local.trips.empty()) {
      ModelBuild build = build_planning_model(local);
      Solution sol = solve_model(build.model, man, "decompose tier planning");
      require_valid(build.model, sol, "decompose tier planning");
      res.batteries = std::round(sol.objective);
    }
    res.cost = res.batteries * cfg.battery.capacity_kwh;
    return res;
  };

  TierResult tiers[3];
  const DemandNetwork* nets[3] = {&dec.high, &dec.mid, &dec.low};
  parallel_for(3, man.workers, [&](int i) { tiers[i] = solve_tier(*nets[i]); });

  RecombinedTotals totals = recombine(tiers[0], tiers[1], tiers[2], man.beta1, man.beta2);

  std::vector<std::vector<std::string>> rows;
  const char* tier_names[3] = {"high", "mid", "low"};
  for (int i = 0; i < 3; ++i) {
    rows.push_back({tier_names[i], std::to_string(nets[i]->edges.size()), fmt(tiers[i].trips),
                    fmt(tiers[i].batteries), fmt(tiers[i].cost)});
  }
  csv::write_file((fs::path(man.out_dir) / "decomposition.csv").string(),
                  {"tier", "edges", "trips_scaled", "batteries", "station_kwh"}, rows);
  csv::write_file((fs::path(man.out_dir) / "recombined.csv").string(),
                  {"batteries", "station_kwh", "trips", "dropped_trips", "rounding_bound"},
                  {{fmt(totals.batteries), fmt(totals.cost), fmt(totals.trips), fmt(dec.dropped_trips),
                    fmt(recombine_rounding_bound(net, man.beta1, man.beta2))}});

  json summary;
  summary["mode"] = "decompose";
  summary["beta1"] = man.beta1;
  summary["beta2"] = man.beta2;
  summary["recombined_batteries"] = totals.batteries;
  summary["recombined_trips"] = totals.trips;
  summary["original_trips"] = net.total_trips();
  summary["dropped_trips"] = dec.dropped_trips;
  write_summary_json(man.out_dir, summary);
}

void write_error_report(const RunManifest& man, const std::string& error, int code) {
  json doc;
  doc["mode"] = man.mode;
  doc["error"] = error;
  doc["exit_code"] = code;
  std::ofstream f(fs::path(man.out_dir) / "error_report.json");
  f << doc.dump(2) << "\n";
  // Anything already written is not trustworthy; flag it.
  std::ofstream stale(fs::path(man.out_dir) / "stale.marker");
  for (const auto& entry : fs::directory_iterator(man.out_dir)) {
    std::string name = entry.path().filename().string();
    if (name != "error_report.json" && name != "stale.marker") stale << name << "\n";
  }
}

}  // namespace

int run(const RunManifest& man) {
  try {
    if (man.out_dir.empty()) throw ValidationFailure("output directory is required");
    fs::create_directories(man.out_dir);
    write_manifest_echo(man);

    if (man.mode == "plan") run_plan(man);
    else if (man.mode == "operate") run_operate(man);
    else if (man.mode == "compare") run_compare(man);
    else if (man.mode == "carbon-sweep") run_carbon_sweep(man);
    else if (man.mode == "as-study") run_as_study(man);
    else if (man.mode == "decompose") run_decompose(man);
    else throw ValidationFailure("unknown mode '" + man.mode + "'");
    return 0;
  } catch (const InfeasibleError& e) {
    write_error_report(man, e.what(), 2);
    return 2;
  } catch (const ValidationFailure& e) {
    write_error_report(man, e.what(), 3);
    return 3;
  } catch (const EnvironmentError& e) {
    write_error_report(man, e.what(), 4);
    return 4;
  } catch (const ProtocolError& e) {
    write_error_report(man, e.what(), 4);
    return 4;
  } catch (const std::exception& e) {
    write_error_report(man, e.what(), 1);
    return 1;
  }
}

std::string report_summary(const std::string& run_dir) {
  fs::path dir(run_dir);
  if (!fs::exists(dir / "run_manifest.json")) {
    std::vector<std::string> missing = {"run_manifest.json"};
    for (const char* f : {"run_summary.json"}) {
      if (!fs::exists(dir / f)) missing.emplace_back(f);
    }
    std::string msg = "run directory incomplete, missing:";
    for (const auto& m : missing) msg += " " + m;
    throw std::runtime_error(msg);
  }
  json manifest, summary;
  {
    std::ifstream f(dir / "run_manifest.json");
    f >> manifest;
  }
  std::string mode = manifest.value("mode", "?");

  std::vector<std::string> required = {"run_summary.json"};
  if (mode == "plan") required.push_back("sizing.csv");
  if (mode == "operate") {
    required.insert(required.end(), {"schedule.csv", "grid.csv", "profit.csv"});
  }
  if (mode == "compare") {
    required.insert(required.end(), {"efficiency.csv", "frontier.csv", "penetration.csv"});
  }
  if (mode == "carbon-sweep") required.push_back("carbon.csv");
  if (mode == "as-study") required.push_back("as_profit.csv");
  if (mode == "decompose") {
    required.insert(required.end(), {"decomposition.csv", "recombined.csv"});
  }
  std::vector<std::string> missing;
  for (const auto& f : required) {
    if (!fs::exists(dir / f)) missing.push_back(f);
  }
  if (!missing.empty()) {
    std::string msg = "run directory incomplete, missing:";
    for (const auto& m : missing) msg += " " + m;
    throw std::runtime_error(msg);
  }
  {
    std::ifstream f(dir / "run_summary.json");
    f >> summary;
  }

  std::ostringstream out;
  out << "run: " << mode << " (" << manifest.value("scenario", "") << ")\n";
  auto line = [&](const std::string& k, const std::string& v) {
    out << "  " << k;
    for (size_t i = k.size(); i < 28; ++i) out << ' ';
    out << v << "\n";
  };
  for (auto& [key, value] : summary.items()) {
    if (key == "mode" || key == "warnings") continue;
    line(key, value.is_string() ? value.get<std::string>() : value.dump());
  }
  if (mode == "compare") {
    csv::Table frontier = csv::read_file((dir / "frontier.csv").string());
    double best_bss = 0, best_fcs = 0, cb = 1e300, cf = 1e300;
    for (const auto& row : frontier.rows) {
      double cost = csv::to_double(row[2], "frontier.csv");
      if (row[1] == "BSS" && cost < cb) {
        cb = cost;
        best_bss = csv::to_double(row[0], "frontier.csv");
      }
      if (row[1] == "FCS" && cost < cf) {
        cf = cost;
        best_fcs = csv::to_double(row[0], "frontier.csv");
      }
    }
    line("argmin daily cost BSS", fmt(best_bss) + " kWh ($" + fmt(cb) + ")");
    line("argmin daily cost FCS", fmt(best_fcs) + " kWh ($" + fmt(cf) + ")");
  }
  if (summary.contains("warnings")) {
    for (const auto& w : summary["warnings"]) out << "  warning: " << w.get<std::string>() << "\n";
  }
  return out.str();
}

}  // namespace swapnet
