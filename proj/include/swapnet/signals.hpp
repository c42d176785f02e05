#pragma once

#include <Eigen/Core>
#include <string>

#include "swapnet/time_grid.hpp"

namespace swapnet {

enum class SeriesKind { lmp, co2_avg, co2_marginal, ru_price, rd_price };

std::string to_string(SeriesKind kind);
SeriesKind series_kind_from_string(const std::string& s);

/// Uniformly sampled exogenous signal. Sample k holds on
/// [start_hour + k*step_h, start_hour + (k+1)*step_h). Units are $/kWh for
/// price kinds and tons/kWh for emission kinds. All timestamps are
/// local-naive hours; the loader rejects anything that is not a uniform,
/// strictly increasing hour sequence.
struct TimeSeries {
  SeriesKind kind = SeriesKind::lmp;
  double start_hour = 0.0;
  double step_h = 1.0;
  Eigen::VectorXd values;

  bool empty() const { return values.size() == 0; }
  double span_begin_hour() const { return start_hour; }
  double span_end_hour() const { return start_hour + step_h * static_cast<double>(values.size()); }
  double value_at_hour(double hour) const;

  bool aligned_to(const TimeGrid& grid) const;
};

/// Reads a `timestamp,<unit>` CSV. The value-column header carries the unit
/// and must belong to the kind: usd_per_kwh/usd_per_mwh for price kinds,
/// tons_per_kwh/tons_per_mwh for emission kinds. *_mwh values are divided
/// by 1000 on load. Emission factors must be non-negative; prices may be
/// negative.
TimeSeries load_series(const std::string& csv_path, SeriesKind kind);
TimeSeries parse_series(const std::string& csv_text, SeriesKind kind, const std::string& origin);

/// Piecewise-constant (hold) resampling onto the grid. Fails if any grid
/// step starts outside the series span, listing the missing span.
TimeSeries resample(const TimeSeries& series, const TimeGrid& grid);

TimeSeries constant_series(SeriesKind kind, const TimeGrid& grid, double value);

}  // namespace swapnet
