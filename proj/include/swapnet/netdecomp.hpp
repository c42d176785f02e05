#pragma once

#include <string>
#include <vector>

namespace swapnet {

struct DemandEdge {
  std::string origin;
  std::string destination;
  double frequency = 0;
};

struct DemandNetwork {
  std::vector<DemandEdge> edges;

  double total_trips() const;
  static DemandNetwork load_csv(const std::string& path);
  void save_csv(const std::string& path) const;
};

/// Frequency-tier split of a demand network. High-tier frequencies are
/// divided by beta1 and mid-tier by beta2 before rounding to integers
/// (half-to-even); low-tier frequencies round unscaled. Edges that round to
/// zero are dropped and accounted in dropped_trips.
struct Decomposition {
  DemandNetwork high;
  DemandNetwork mid;
  DemandNetwork low;
  double dropped_trips = 0;
};

/// Partition rule: freq > beta1 -> high; beta2 <= freq <= beta1 -> mid;
/// freq < beta2 -> low. Requires beta1 > beta2 > 0.
Decomposition decompose(const DemandNetwork& net, double beta1 = 30.0, double beta2 = 5.0);

struct TierResult {
  double batteries = 0;
  double cost = 0;
  double trips = 0;
};

struct RecombinedTotals {
  double batteries = 0;
  double cost = 0;
  double trips = 0;
};

/// Inverse of the scaling: high-tier results count beta1 times, mid-tier
/// beta2 times, low-tier once.
RecombinedTotals recombine(const TierResult& high, const TierResult& mid, const TierResult& low,
                           double beta1 = 30.0, double beta2 = 5.0);

/// Worst-case trip-count discrepancy of decompose-then-recombine: one half
/// unit of rounding per edge, scaled by its tier multiplier.
double recombine_rounding_bound(const DemandNetwork& net, double beta1 = 30.0, double beta2 = 5.0);

}  // namespace swapnet
