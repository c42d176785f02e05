#include "swapnet/signals.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "swapnet/csv.hpp"

namespace swapnet {

std::string to_string(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::lmp: return "lmp";
    case SeriesKind::co2_avg: return "co2_avg";
    case SeriesKind::co2_marginal: return "co2_marginal";
    case SeriesKind::ru_price: return "ru_price";
    case SeriesKind::rd_price: return "rd_price";
  }
  return "?";
}

SeriesKind series_kind_from_string(const std::string& s) {
  if (s == "lmp") return SeriesKind::lmp;
  if (s == "co2_avg") return SeriesKind::co2_avg;
  if (s == "co2_marginal") return SeriesKind::co2_marginal;
  if (s == "ru_price") return SeriesKind::ru_price;
  if (s == "rd_price") return SeriesKind::rd_price;
  throw std::runtime_error("unknown series kind: " + s);
}

namespace {

bool is_price_kind(SeriesKind k) {
  return k == SeriesKind::lmp || k == SeriesKind::ru_price || k == SeriesKind::rd_price;
}

// Returns the unit divisor implied by the value-column header, or throws on
// a kind/unit mismatch.
double unit_divisor(SeriesKind kind, const std::string& unit_header, const std::string& origin) {
  if (is_price_kind(kind)) {
    if (unit_header == "usd_per_kwh") return 1.0;
    if (unit_header == "usd_per_mwh") return 1000.0;
  } else {
    if (unit_header == "tons_per_kwh") return 1.0;
    if (unit_header == "tons_per_mwh") return 1000.0;
  }
  throw std::runtime_error("unit header mismatch in " + origin + ": column '" + unit_header +
                           "' is not valid for series kind " + to_string(kind));
}

}  // namespace

double TimeSeries::value_at_hour(double hour) const {
  if (empty()) throw std::runtime_error("value_at_hour on empty series");
  double idx = (hour - start_hour) / step_h;
  auto k = static_cast<Eigen::Index>(std::floor(idx + 1e-9));
  if (k < 0 || k >= values.size()) {
    throw std::runtime_error("hour " + csv::format_double(hour) + " outside series span [" +
                             csv::format_double(span_begin_hour()) + ", " +
                             csv::format_double(span_end_hour()) + ")");
  }
  return values[k];
}

bool TimeSeries::aligned_to(const TimeGrid& grid) const {
  return !empty() && std::abs(step_h - grid.delta_t_h) < 1e-12 &&
         std::abs(start_hour - grid.span_begin_hour()) < 1e-9 &&
         values.size() == grid.num_steps();
}

TimeSeries parse_series(const std::string& csv_text, SeriesKind kind, const std::string& origin) {
  csv::Table table = csv::parse(csv_text);
  if (table.header.size() != 2 || table.header[0] != "timestamp") {
    throw std::runtime_error("series CSV " + origin + " must have header 'timestamp,<unit>'");
  }
  double divisor = unit_divisor(kind, table.header[1], origin);
  if (table.rows.empty()) throw std::runtime_error("series CSV " + origin + " has no rows");

  TimeSeries out;
  out.kind = kind;
  out.values.resize(static_cast<Eigen::Index>(table.rows.size()));
  double prev_ts = 0.0;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != 2) throw std::runtime_error(origin + ": row " + std::to_string(r + 2) + " malformed");
    const std::string ctx = origin + " row " + std::to_string(r + 2);
    double ts = csv::to_double(row[0], ctx);
    double v = csv::to_double(row[1], ctx) / divisor;
    if (!is_price_kind(kind) && v < 0) {
      throw std::runtime_error(ctx + ": emission factor must be non-negative");
    }
    if (r == 0) {
      out.start_hour = ts;
    } else {
      if (ts == prev_ts) throw std::runtime_error(ctx + ": duplicated timestamp " + row[0]);
      if (ts < prev_ts) throw std::runtime_error(ctx + ": timestamps not increasing");
      if (r == 1) {
        out.step_h = ts - out.start_hour;
      } else {
        double expect = out.start_hour + out.step_h * static_cast<double>(r);
        if (std::abs(ts - expect) > 1e-6) {
          throw std::runtime_error(ctx + ": non-uniform timestamp spacing");
        }
      }
    }
    prev_ts = ts;
    out.values[static_cast<Eigen::Index>(r)] = v;
  }
  if (table.rows.size() == 1) out.step_h = 1.0;
  return out;
}

TimeSeries load_series(const std::string& csv_path, SeriesKind kind) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open series CSV: " + csv_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_series(buf.str(), kind, csv_path);
}

TimeSeries resample(const TimeSeries& series, const TimeGrid& grid) {
  if (series.empty()) throw std::runtime_error("resample: empty series");
  // Identity fast path keeps values bit-exact.
  if (series.aligned_to(grid)) return series;

  TimeSeries out;
  out.kind = series.kind;
  out.start_hour = grid.span_begin_hour();
  out.step_h = grid.delta_t_h;
  out.values.resize(grid.num_steps());

  double missing_lo = 0, missing_hi = 0;
  bool missing = false;
  for (int t = grid.t_begin; t <= grid.t_end; ++t) {
    double h = grid.step_start_hour(t);
    if (h < series.span_begin_hour() - 1e-9 || h >= series.span_end_hour() - 1e-9) {
      if (!missing) {
        missing = true;
        missing_lo = h;
      }
      missing_hi = h + grid.delta_t_h;
      continue;
    }
    out.values[t - grid.t_begin] = series.value_at_hour(h);
  }
  if (missing) {
    throw std::runtime_error("resample: series " + to_string(series.kind) + " does not cover grid span [" +
                             csv::format_double(missing_lo) + ", " + csv::format_double(missing_hi) +
                             ") hours");
  }
  return out;
}

TimeSeries constant_series(SeriesKind kind, const TimeGrid& grid, double value) {
  TimeSeries out;
  out.kind = kind;
  out.start_hour = grid.span_begin_hour();
  out.step_h = grid.delta_t_h;
  out.values = Eigen::VectorXd::Constant(grid.num_steps(), value);
  return out;
}

}  // namespace swapnet
