#include <doctest.h>

#include <cmath>
#include <random>

#include "swapnet/energy.hpp"

using namespace swapnet;

namespace {
const VehicleParams kDefault{};
}

TEST_CASE("cruise force arithmetic matches the hand-computed 100 km value") {
  // Frozen from an independent term-by-term calculation:
  //   F = m g C_r + 0.5 C_d A rho v^2 = 3994.93... N over 100 km at eta 0.9.
  const double expected_ec = 123.30641919928365;

  // Build a trip whose cruise segment is exactly 100 km by appending the
  // accel/decel distances, then subtract their known energies.
  VehicleParams p = kDefault;
  double v = p.v_max_ms();
  double d_ad = v * v;  // accel + decel distance at 1 m/s^2
  double total = trip_energy_kwh(100000.0 + d_ad, 0.0, p);
  double ends_only = trip_energy_kwh(d_ad, 0.0, p);
  CHECK(total - ends_only == doctest::Approx(expected_ec).epsilon(1e-9));
}

TEST_CASE("zero-length cruise segment contributes nothing") {
  VehicleParams p = kDefault;
  double v = p.v_max_ms();
  double d_ad = v * v;
  // d == d_a + d_d: the whole trip is the triangle profile.
  double e = trip_energy_kwh(d_ad, 0.0, p);
  // Adding an infinitesimal cruise adds energy continuously from zero.
  double e2 = trip_energy_kwh(d_ad + 1.0, 0.0, p);
  CHECK(e2 > e);
  CHECK(e2 - e < 0.01);
  CHECK(e == doctest::Approx(6.143125288877974).epsilon(1e-9));
}

TEST_CASE("climbing costs strictly more than the flat trip") {
  double flat = trip_energy_kwh(160934.4, 0.0, kDefault);
  double hill = trip_energy_kwh(160934.4, 500.0, kDefault);
  CHECK(flat == doctest::Approx(203.9766506000915).epsilon(1e-9));
  CHECK(hill == doctest::Approx(260.2846086912329).epsilon(1e-9));
  CHECK(hill > flat);
}

TEST_CASE("short trips cap the cruise speed instead of failing") {
  double e = trip_energy_kwh(100.0, 0.0, kDefault);
  CHECK(e > 0);
  SpeedProfile p = make_speed_profile(100.0, 0.0, kDefault);
  CHECK(p.cruise_speed_ms < kDefault.v_max_ms());
  CHECK(p.accel_distance_m + p.decel_distance_m == doctest::Approx(100.0));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(trip_energy_kwh(0.0, 0.0, kDefault), std::domain_error);
  CHECK_THROWS_AS(trip_energy_kwh(-5.0, 0.0, kDefault), std::domain_error);
  CHECK_THROWS_AS(trip_energy_kwh(100.0, 200.0, kDefault), std::domain_error);
}

TEST_CASE("energy is monotone in distance, mass and elevation") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist_m(2000.0, 500000.0);
  std::uniform_real_distribution<double> mass(5000.0, 40000.0);
  std::uniform_real_distribution<double> elev_frac(0.0, 0.02);
  for (int it = 0; it < 200; ++it) {
    VehicleParams p = kDefault;
    p.mass_kg = mass(rng);
    double d = dist_m(rng);
    double h = d * elev_frac(rng);
    double e = trip_energy_kwh(d, h, p);

    double e_far = trip_energy_kwh(d * 1.3, h, p);
    CHECK(e_far >= e - 1e-12);

    VehicleParams heavier = p;
    heavier.mass_kg = p.mass_kg * 1.2;
    CHECK(trip_energy_kwh(d, h, heavier) >= e - 1e-12);

    CHECK(trip_energy_kwh(d, std::min(d, h + 50.0), p) >= e - 1e-12);
  }
}

TEST_CASE("splitting a flat cruise is energy-neutral") {
  VehicleParams p = kDefault;
  double v = p.v_max_ms();
  double d_ad = v * v;
  auto cruise_energy = [&](double cruise_m) {
    return trip_energy_kwh(cruise_m + d_ad, 0.0, p) - trip_energy_kwh(d_ad, 0.0, p);
  };
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> len(1000.0, 400000.0);
  std::uniform_real_distribution<double> cut(0.1, 0.9);
  for (int it = 0; it < 100; ++it) {
    double d = len(rng);
    double c = cut(rng);
    double whole = cruise_energy(d);
    double split = cruise_energy(d * c) + cruise_energy(d * (1 - c));
    CHECK(std::abs(whole - split) <= 1e-9 * std::abs(whole));
  }
}

TEST_CASE("payload arithmetic and the 350 vs 800 kWh ratio") {
  TruckSpec truck;
  BatterySpec b350{.capacity_kwh = 350};
  BatterySpec b800{.capacity_kwh = 800};
  CHECK(payload_kg(b350, truck) == doctest::Approx(32546.6).epsilon(1e-12));
  CHECK(payload_kg(b800, truck) == doctest::Approx(29486.6).epsilon(1e-12));
  CHECK(payload_kg(b350, truck) / payload_kg(b800, truck) == doctest::Approx(1.104).epsilon(0.001));
}

TEST_CASE("payload is strictly decreasing and affine in capacity") {
  TruckSpec truck;
  double q1 = 400, q2 = 500, q3 = 600;
  double p1 = payload_kg({.capacity_kwh = q1}, truck);
  double p2 = payload_kg({.capacity_kwh = q2}, truck);
  double p3 = payload_kg({.capacity_kwh = q3}, truck);
  CHECK(p1 > p2);
  CHECK(p2 > p3);
  CHECK(p1 - p2 == doctest::Approx(p2 - p3).epsilon(1e-12));  // affine
}

TEST_CASE("oversized battery is rejected") {
  TruckSpec truck;
  BatterySpec huge{.capacity_kwh = 6000};
  CHECK_THROWS_AS(payload_kg(huge, truck), std::domain_error);
}
