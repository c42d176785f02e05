#include <doctest.h>

#include "swapnet/csv.hpp"
#include "swapnet/signals.hpp"

using namespace swapnet;

TEST_CASE("csv parse and double formatting round-trip") {
  auto t = csv::parse("a,b\n1,2\n3.5,-0.25\n");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(csv::to_double(t.rows[1][1], "test") == -0.25);
  CHECK(csv::format_double(0.1) == "0.1");
  CHECK(csv::format_double(-0.0) == "0");
  CHECK(csv::format_double(1e-5) == "1e-05");
}

TEST_CASE("24 hourly rows load as a 24-point series") {
  std::string text = "timestamp,usd_per_kwh\n";
  for (int h = 0; h < 24; ++h) text += std::to_string(h) + ",0.1\n";
  TimeSeries s = parse_series(text, SeriesKind::lmp, "mem");
  CHECK(s.values.size() == 24);
  CHECK(s.step_h == 1.0);
  CHECK(s.span_end_hour() == 24.0);
}

TEST_CASE("duplicated timestamp is rejected naming the row") {
  std::string text = "timestamp,usd_per_kwh\n0,0.1\n1,0.2\n1,0.3\n";
  CHECK_THROWS_WITH_AS(parse_series(text, SeriesKind::lmp, "mem"),
                       doctest::Contains("row 4"), std::runtime_error);
}

TEST_CASE("per-MWh values are normalized on load") {
  std::string text = "timestamp,usd_per_mwh\n0,50\n1,100\n";
  TimeSeries s = parse_series(text, SeriesKind::lmp, "mem");
  CHECK(s.values[0] == doctest::Approx(0.05));
  CHECK(s.values[1] == doctest::Approx(0.1));
}

TEST_CASE("unit header must match the series kind") {
  CHECK_THROWS_WITH_AS(parse_series("timestamp,tons_per_kwh\n0,1\n", SeriesKind::lmp, "mem"),
                       doctest::Contains("unit header mismatch"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_series("timestamp,usd_per_kwh\n0,1\n", SeriesKind::co2_avg, "mem"),
                       doctest::Contains("unit header mismatch"), std::runtime_error);
}

TEST_CASE("emission factors must be non-negative, prices may go negative") {
  CHECK_NOTHROW(parse_series("timestamp,usd_per_kwh\n0,-0.02\n1,0.1\n", SeriesKind::lmp, "mem"));
  CHECK_THROWS(parse_series("timestamp,tons_per_kwh\n0,-1\n1,1\n", SeriesKind::co2_avg, "mem"));
}

TEST_CASE("hold resampling onto a finer grid") {
  TimeSeries s;
  s.kind = SeriesKind::lmp;
  s.start_hour = 0;
  s.step_h = 1.0;
  s.values = Eigen::Vector2d(2.0, 4.0);

  TimeGrid grid{0, 3, 0.5};
  TimeSeries r = resample(s, grid);
  REQUIRE(r.values.size() == 4);
  CHECK(r.values[0] == 2.0);
  CHECK(r.values[1] == 2.0);
  CHECK(r.values[2] == 4.0);
  CHECK(r.values[3] == 4.0);
}

TEST_CASE("resample on an identical grid is the identity and idempotent") {
  TimeGrid grid{0, 5, 0.5};
  TimeSeries s = constant_series(SeriesKind::lmp, grid, 1.5);
  s.values[3] = -2.0;
  TimeSeries once = resample(s, grid);
  CHECK(once.values == s.values);
  TimeSeries twice = resample(once, grid);
  CHECK(twice.values == once.values);
}

TEST_CASE("hold resampling preserves min and max") {
  TimeSeries s;
  s.kind = SeriesKind::lmp;
  s.start_hour = 0;
  s.step_h = 1.0;
  s.values.resize(6);
  s.values << 3, -1, 4, 1, 5, 9;
  TimeGrid grid{0, 11, 0.5};
  TimeSeries r = resample(s, grid);
  CHECK(r.values.minCoeff() == s.values.minCoeff());
  CHECK(r.values.maxCoeff() == s.values.maxCoeff());
}

TEST_CASE("a one-step shift off the series span is a coverage error") {
  TimeSeries s;
  s.kind = SeriesKind::lmp;
  s.start_hour = 0;
  s.step_h = 0.5;
  s.values = Eigen::VectorXd::Constant(6, 1.0);  // covers [0, 3)
  TimeGrid shifted{1, 6, 0.5};                   // needs [0.5, 3.5)
  CHECK_THROWS_WITH_AS(resample(s, shifted), doctest::Contains("does not cover"), std::runtime_error);
}
