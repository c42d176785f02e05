#pragma once

#include <stdexcept>

namespace swapnet {

/// Uniform discrete time grid. Step t covers the half-open interval
/// [t * delta_t_h, (t+1) * delta_t_h) in local clock hours. Swaps complete
/// within the step in which they are scheduled.
struct TimeGrid {
  int t_begin = 0;
  int t_end = 47;
  double delta_t_h = 0.5;

  int num_steps() const { return t_end - t_begin + 1; }
  // Battery state-of-energy is sampled at step starts plus one trailing
  // sample after the final step.
  int num_soe_points() const { return num_steps() + 1; }
  bool contains(int t) const { return t >= t_begin && t <= t_end; }
  double step_start_hour(int t) const { return t * delta_t_h; }
  double span_begin_hour() const { return step_start_hour(t_begin); }
  double span_end_hour() const { return step_start_hour(t_end + 1); }

  int step_of_hour(double hour) const {
    // Arrivals are pinned to the step already in progress: a truck must be
    // present at the start of the step in which its swap is scheduled.
    return static_cast<int>(hour / delta_t_h + 1e-9);
  }

  void validate() const {
    if (t_begin >= t_end) throw std::invalid_argument("TimeGrid: t_begin must be < t_end");
    if (delta_t_h <= 0) throw std::invalid_argument("TimeGrid: delta_t must be positive");
  }
};

}  // namespace swapnet
