#pragma once

#include <string>
#include <vector>

#include "swapnet/energy.hpp"
#include "swapnet/types.hpp"

namespace swapnet {

enum class Mechanism { bss, fcs };

std::string to_string(Mechanism m);

/// Per-stop downtime for each mechanism, in hours.
struct StayTimes {
  double fcs_stay_h = 1.0;  // ~1C full recharge
  double bss_stay_h = 0.5;  // one grid step per swap
};

/// One truck's day of work: how far it drives and how many en-route
/// charge/swap events it makes.
struct TruckDay {
  double distance_mi = 0;
  int stops = 0;
};

struct EfficiencyReport {
  double battery_kwh = 0;
  Mechanism mechanism = Mechanism::bss;
  double ton_miles = 0;           // metric-tonne miles at full payload
  double active_hours = 0;        // drive + stops + mandated rests
  double total_capacity_kwh = 0;  // truck packs plus in-station packs
  int trucks = 0;
  int excluded_trips = 0;

  double tmph() const { return ton_miles / active_hours; }
  double tmpkwh() const { return ton_miles / total_capacity_kwh; }
};

/// Accumulates ton-miles and duty time over a day of truck work, inserting
/// a mandatory rest whenever cumulative duty exceeds the hours-of-service
/// cap. station_capacity_kwh is the planning solve's in-station total for
/// BSS and must be zero for FCS.
EfficiencyReport simulate_day(Mechanism mechanism, const std::vector<TruckDay>& days,
                              const BatterySpec& battery, const TruckSpec& truck,
                              const VehicleParams& vehicle, const StayTimes& stays,
                              double station_capacity_kwh, int excluded_trips = 0);

struct CbaConfig {
  double battery_price_usd_per_kwh = 151.0;
  double wage_usd_per_h = 28.02;
  double battery_lifetime_years = 8.0;
  double workdays_per_year = 260.0;
  double cycle_life = 2000.0;

  // Daily-amortized capital cost of one kWh of battery.
  double capital_usd_per_kwh_day() const {
    return battery_price_usd_per_kwh / (battery_lifetime_years * workdays_per_year);
  }
};

struct CycleStats {
  double cycles_per_day = 0;
  double lifespan_years = 0;
};

/// Equivalent full cycles from daily energy throughput, and the implied
/// calendar lifespan under the configured cycle life and workday count.
CycleStats equivalent_cycles(double daily_energy_kwh, double total_capacity_kwh, const CbaConfig& cba);

struct FrontierPoint {
  double battery_kwh = 0;
  Mechanism mechanism = Mechanism::bss;
  double daily_cost_usd = 0;
};

struct FrontierResult {
  std::vector<FrontierPoint> points;            // one per report, input order
  double argmin_bss_kwh = 0;                    // 0 when the mechanism is absent
  double argmin_fcs_kwh = 0;
  double isoline_slope_h_per_kwh = 0;           // extra hours worth one kWh of capacity
};

/// Daily cost = wage x active hours + amortized capital x total capacity.
/// The isoline slope is the (capacity, hours) exchange rate that leaves the
/// cost unchanged.
FrontierResult cost_frontier(const std::vector<EfficiencyReport>& reports, const CbaConfig& cba);

}  // namespace swapnet
