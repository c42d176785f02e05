#pragma once

#include "swapnet/types.hpp"

namespace swapnet {

/// Longitudinal-dynamics parameters. Defaults are the heavy-duty tractor
/// values used throughout the study.
struct VehicleParams {
  double mass_kg = 37194.6;
  double gravity = 9.81;
  double accel_ms2 = 1.0;
  double decel_ms2 = 1.0;
  double v_max_kmh = 80.0;
  double c_rolling = 0.0061;
  double c_drag = 0.581;
  double frontal_area_m2 = 10.0684;
  double air_density = 1.225;
  double eta_accel = 0.9;
  double eta_cruise = 0.9;
  double eta_decel = 0.9;

  double v_max_ms() const { return v_max_kmh / 3.6; }
  double v_max_mph() const { return v_max_kmh / 1.609344; }
  void validate() const;
};

/// Trapezoidal speed profile: constant acceleration to cruise speed, cruise,
/// constant deceleration to rest. For trips too short to reach v_max the
/// cruise speed is capped so the triangle fits exactly.
struct SpeedProfile {
  double distance_m = 0;
  double accel_distance_m = 0;
  double decel_distance_m = 0;
  double cruise_speed_ms = 0;
  double mean_grade_rad = 0;

  double cruise_distance_m() const { return distance_m - accel_distance_m - decel_distance_m; }
};

SpeedProfile make_speed_profile(double distance_m, double net_elevation_m, const VehicleParams& params);

/// Trip energy in kWh from the three-phase profile. Throws std::domain_error
/// for non-positive distance or |net_elevation| > distance.
double trip_energy_kwh(double distance_m, double net_elevation_m, const VehicleParams& params);

double trip_energy_kwh_miles(double distance_mi, double net_elevation_m, const VehicleParams& params);

/// Cargo mass available under the GVWR cap once the pack is on board.
/// Throws std::domain_error when the battery alone exceeds the allowance.
double payload_kg(const BatterySpec& battery, const TruckSpec& truck);

inline constexpr double kMetersPerMile = 1609.344;

}  // namespace swapnet
