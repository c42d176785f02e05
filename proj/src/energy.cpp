#include "swapnet/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace swapnet {

void VehicleParams::validate() const {
  auto pos = [](double v) { return v > 0; };
  if (!(pos(mass_kg) && pos(gravity) && pos(accel_ms2) && pos(decel_ms2) && pos(v_max_kmh) &&
        pos(c_rolling) && pos(c_drag) && pos(frontal_area_m2) && pos(air_density))) {
    throw std::invalid_argument("VehicleParams: all physical parameters must be positive");
  }
  for (double eta : {eta_accel, eta_cruise, eta_decel}) {
    if (!(eta > 0 && eta <= 1)) throw std::invalid_argument("VehicleParams: efficiencies must be in (0,1]");
  }
}

SpeedProfile make_speed_profile(double distance_m, double net_elevation_m, const VehicleParams& params) {
  if (distance_m <= 0) throw std::domain_error("trip distance must be positive");
  if (std::abs(net_elevation_m) > distance_m) {
    throw std::domain_error("net elevation magnitude cannot exceed trip distance");
  }
  SpeedProfile p;
  p.distance_m = distance_m;
  p.mean_grade_rad = std::asin(net_elevation_m / distance_m);

  double v = params.v_max_ms();
  double da = v * v / (2.0 * params.accel_ms2);
  double dd = v * v / (2.0 * params.decel_ms2);
  if (da + dd > distance_m) {
    // Cap cruise speed so the triangular profile fits the whole trip.
    v = std::sqrt(2.0 * distance_m * params.accel_ms2 * params.decel_ms2 /
                  (params.accel_ms2 + params.decel_ms2));
    da = v * v / (2.0 * params.accel_ms2);
    dd = distance_m - da;
  }
  p.accel_distance_m = da;
  p.decel_distance_m = dd;
  p.cruise_speed_ms = v;
  return p;
}

double trip_energy_kwh(double distance_m, double net_elevation_m, const VehicleParams& params) {
  SpeedProfile p = make_speed_profile(distance_m, net_elevation_m, params);

  double m = params.mass_kg;
  double g = params.gravity;
  double grade_force = m * g * std::sin(p.mean_grade_rad);
  double rolling_force = m * g * params.c_rolling * std::cos(p.mean_grade_rad);
  double v2 = p.cruise_speed_ms * p.cruise_speed_ms;
  double aero = 0.5 * params.c_drag * params.frontal_area_m2 * params.air_density * v2;

  // Acceleration/deceleration phases see the distance-averaged v^2 = v̄²/2.
  double f_accel = m * params.accel_ms2 + grade_force + rolling_force + aero / 2.0;
  double f_cruise = grade_force + rolling_force + aero;
  double f_decel = m * params.decel_ms2 + grade_force + rolling_force + aero / 2.0;

  // Force [N] x distance [km] / 3600 -> kWh.
  double e_accel = p.accel_distance_m / 1000.0 * f_accel / (3600.0 * params.eta_accel);
  double e_cruise = p.cruise_distance_m() / 1000.0 * f_cruise / (3600.0 * params.eta_cruise);
  double e_decel = p.decel_distance_m / 1000.0 * f_decel / (3600.0 * params.eta_decel);
  return e_accel + e_cruise + e_decel;
}

double trip_energy_kwh_miles(double distance_mi, double net_elevation_m, const VehicleParams& params) {
  return trip_energy_kwh(distance_mi * kMetersPerMile, net_elevation_m, params);
}

double payload_kg(const BatterySpec& battery, const TruckSpec& truck) {
  double p = truck.gvwr_kg - truck.curb_mass_no_battery_kg - battery.mass_kg();
  if (p < 0) {
    throw std::domain_error("battery too large: pack of " + std::to_string(battery.capacity_kwh) +
                            " kWh leaves negative payload");
  }
  return p;
}

}  // namespace swapnet
