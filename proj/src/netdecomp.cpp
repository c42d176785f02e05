#include "swapnet/netdecomp.hpp"

#include <cfenv>
#include <cmath>
#include <stdexcept>

#include "swapnet/csv.hpp"

namespace swapnet {

double DemandNetwork::total_trips() const {
  double sum = 0;
  for (const auto& e : edges) sum += e.frequency;
  return sum;
}

DemandNetwork DemandNetwork::load_csv(const std::string& path) {
  csv::Table t = csv::read_file(path);
  const std::vector<std::string> expect = {"origin", "destination", "frequency"};
  if (t.header != expect) {
    throw std::runtime_error("network CSV " + path + " must have header origin,destination,frequency");
  }
  DemandNetwork net;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::string ctx = path + " row " + std::to_string(r + 2);
    if (row.size() != 3) throw std::runtime_error(ctx + ": wrong column count");
    double f = csv::to_double(row[2], ctx);
    if (f < 0) throw std::runtime_error(ctx + ": frequency must be non-negative");
    net.edges.push_back({row[0], row[1], f});
  }
  return net;
}

void DemandNetwork::save_csv(const std::string& path) const {
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : edges) {
    rows.push_back({e.origin, e.destination, csv::format_double(e.frequency)});
  }
  csv::write_file(path, {"origin", "destination", "frequency"}, rows);
}

namespace {
// round half to even, independent of the ambient FP rounding mode
double round_even(double v) {
  double fl = std::floor(v);
  double frac = v - fl;
  if (frac > 0.5) return fl + 1;
  if (frac < 0.5) return fl;
  return std::fmod(fl, 2.0) == 0.0 ? fl : fl + 1;
}
}  // namespace

Decomposition decompose(const DemandNetwork& net, double beta1, double beta2) {
  if (!(beta1 > beta2 && beta2 > 0)) {
    throw std::invalid_argument("decompose: requires beta1 > beta2 > 0");
  }
  Decomposition out;
  for (const auto& e : net.edges) {
    DemandNetwork* tier;
    double scale;
    if (e.frequency > beta1) {
      tier = &out.high;
      scale = beta1;
    } else if (e.frequency >= beta2) {
      tier = &out.mid;
      scale = beta2;
    } else {
      tier = &out.low;
      scale = 1.0;
    }
    double scaled = round_even(e.frequency / scale);
    if (scaled <= 0) {
      out.dropped_trips += e.frequency;
      continue;
    }
    tier->edges.push_back({e.origin, e.destination, scaled});
  }
  return out;
}

RecombinedTotals recombine(const TierResult& high, const TierResult& mid, const TierResult& low,
                           double beta1, double beta2) {
  RecombinedTotals out;
  out.batteries = high.batteries * beta1 + mid.batteries * beta2 + low.batteries;
  out.cost = high.cost * beta1 + mid.cost * beta2 + low.cost;
  out.trips = high.trips * beta1 + mid.trips * beta2 + low.trips;
  return out;
}

double recombine_rounding_bound(const DemandNetwork& net, double beta1, double beta2) {
  double bound = 0;
  for (const auto& e : net.edges) {
    if (e.frequency > beta1) {
      bound += 0.5 * beta1;
    } else if (e.frequency >= beta2) {
      bound += 0.5 * beta2;
    } else {
      bound += 0.5;
    }
  }
  return bound;
}

}  // namespace swapnet
