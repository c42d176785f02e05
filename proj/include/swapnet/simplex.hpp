#pragma once

#include <Eigen/Core>
#include <limits>
#include <vector>

#include "swapnet/milp.hpp"

namespace swapnet {

/// Continuous linear program: minimize c'x + c0 over row constraints and
/// variable bounds (±infinity allowed).
struct LpProblem {
  Eigen::VectorXd c;
  double c0 = 0;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
  struct Row {
    std::vector<std::pair<int, double>> terms;
    Sense sense = Sense::le;
    double rhs = 0;
  };
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(c.size()); }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;
  double objective = 0;
};

/// Dense two-phase primal simplex. Pivot selection uses Bland's rule
/// (smallest eligible index) so cycling cannot occur; pivot tolerance 1e-9.
LpResult lp_solve(const LpProblem& problem);

inline constexpr double kLpInf = std::numeric_limits<double>::infinity();

}  // namespace swapnet
