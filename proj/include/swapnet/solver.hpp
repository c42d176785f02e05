#pragma once

#include <limits>
#include <string>

#include "swapnet/milp.hpp"
#include "swapnet/simplex.hpp"

namespace swapnet {

struct SolveLimits {
  double mip_gap = 0.05;  // hard stop once (incumbent - bound)/|incumbent| falls below
  double time_limit_s = std::numeric_limits<double>::infinity();
  long node_limit = std::numeric_limits<long>::max();
  int max_binaries = 25;  // guard rail for the enumerative solver
};

/// Exact branch-and-bound over the model's binaries with an LP relaxation
/// bound per node. Branch order: y, z, x, a, b (structure first), then
/// lexicographic; ties in the incumbent objective are broken toward the
/// lexicographically smaller binary assignment so results are reproducible.
/// Refuses models whose binary count exceeds limits.max_binaries.
Solution solve_exact(const MilpModel& model, const SolveLimits& limits = {.mip_gap = 0.0});

/// LP relaxation of the full model (binaries relaxed to [0,1]).
LpResult solve_relaxation(const MilpModel& model);

/// Renders the model in LP file format (Minimize / Subject To / Bounds /
/// Binaries / End) with variables in lexicographic order. Byte-stable across
/// runs.
std::string render_lp(const MilpModel& model);
void export_lp(const MilpModel& model, const std::string& path);

/// Parses an LP-format file produced by export_lp (or a compatible solver
/// front end) back into a model. Constraint tags are not part of the format
/// and come back as "plumbing".
MilpModel parse_lp_text(const std::string& text);
MilpModel import_lp(const std::string& path);

/// Plain-text solution interchange file:
///   status <optimal|feasible_limit|infeasible|unbounded|error>
///   objective <value>
///   gap <value>
///   v <name> <value>   (one line per variable)
///   end
std::string render_solution_file(const Solution& solution);
void write_solution_file(const Solution& solution, const std::string& path);
Solution parse_solution_file(const std::string& path);

/// Runs `solver_command <model.lp> <out.sol> --gap G [--time-limit T]` as a
/// subprocess and parses the documented solution file. Throws
/// EnvironmentError when the command cannot run and ProtocolError when its
/// output cannot be parsed.
Solution solve_external(const MilpModel& model, const SolveLimits& limits,
                        const std::string& solver_command);

struct EnvironmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace swapnet
