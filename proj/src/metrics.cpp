#include "swapnet/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace swapnet {

std::string to_string(Mechanism m) { return m == Mechanism::bss ? "BSS" : "FCS"; }

EfficiencyReport simulate_day(Mechanism mechanism, const std::vector<TruckDay>& days,
                              const BatterySpec& battery, const TruckSpec& truck,
                              const VehicleParams& vehicle, const StayTimes& stays,
                              double station_capacity_kwh, int excluded_trips) {
  EfficiencyReport rep;
  rep.battery_kwh = battery.capacity_kwh;
  rep.mechanism = mechanism;
  rep.excluded_trips = excluded_trips;
  rep.trucks = static_cast<int>(days.size());

  const double stay = mechanism == Mechanism::bss ? stays.bss_stay_h : stays.fcs_stay_h;
  const double tonnes = payload_kg(battery, truck) / 1000.0;
  const double v_mph = vehicle.v_max_mph();

  for (const auto& day : days) {
    double duty = day.distance_mi / v_mph + day.stops * stay;
    // One uninterrupted rest each time cumulative duty tops the HOS cap.
    int rests = std::max(0, static_cast<int>(std::ceil(duty / truck.max_duty_hours - 1e-9)) - 1);
    rep.active_hours += duty + rests * truck.min_rest_hours;
    rep.ton_miles += tonnes * day.distance_mi;
  }
  rep.total_capacity_kwh = rep.trucks * battery.capacity_kwh + station_capacity_kwh;
  return rep;
}

CycleStats equivalent_cycles(double daily_energy_kwh, double total_capacity_kwh, const CbaConfig& cba) {
  if (total_capacity_kwh <= 0) throw std::invalid_argument("equivalent_cycles: capacity must be positive");
  CycleStats s;
  s.cycles_per_day = daily_energy_kwh / total_capacity_kwh;
  s.lifespan_years = cba.cycle_life / (s.cycles_per_day * cba.workdays_per_year);
  return s;
}

FrontierResult cost_frontier(const std::vector<EfficiencyReport>& reports, const CbaConfig& cba) {
  FrontierResult out;
  out.isoline_slope_h_per_kwh = cba.capital_usd_per_kwh_day() / cba.wage_usd_per_h;
  double best_bss = std::numeric_limits<double>::infinity();
  double best_fcs = std::numeric_limits<double>::infinity();
  for (const auto& r : reports) {
    FrontierPoint p;
    p.battery_kwh = r.battery_kwh;
    p.mechanism = r.mechanism;
    p.daily_cost_usd =
        cba.wage_usd_per_h * r.active_hours + cba.capital_usd_per_kwh_day() * r.total_capacity_kwh;
    out.points.push_back(p);
    // Ties go to the smaller pack.
    if (r.mechanism == Mechanism::bss) {
      if (p.daily_cost_usd < best_bss - 1e-12 ||
          (std::abs(p.daily_cost_usd - best_bss) <= 1e-12 && p.battery_kwh < out.argmin_bss_kwh)) {
        best_bss = p.daily_cost_usd;
        out.argmin_bss_kwh = p.battery_kwh;
      }
    } else {
      if (p.daily_cost_usd < best_fcs - 1e-12 ||
          (std::abs(p.daily_cost_usd - best_fcs) <= 1e-12 && p.battery_kwh < out.argmin_fcs_kwh)) {
        best_fcs = p.daily_cost_usd;
        out.argmin_fcs_kwh = p.battery_kwh;
      }
    }
  }
  return out;
}

}  // namespace swapnet
