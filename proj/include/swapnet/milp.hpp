#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "swapnet/scenario.hpp"

namespace swapnet {

enum class VarKind { continuous, binary };
enum class Sense { le, ge, eq };

std::string to_string(Sense s);

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lb = 0;
  double ub = 0;
};

struct LinConstraint {
  std::string name;
  std::string tag;  // constraint family: Eq3..Eq19, Eq10-ext, Eq21 or plumbing
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient), index-sorted
  Sense sense = Sense::le;
  double rhs = 0;
};

/// Solver-agnostic model in canonical linear form: minimize c'x + c0 subject
/// to row constraints and variable bounds, with binary variables marked.
class MilpModel {
 public:
  int add_variable(const std::string& name, VarKind kind, double lb, double ub);
  void add_constraint(const std::string& name, const std::string& tag,
                      std::vector<std::pair<int, double>> terms, Sense sense, double rhs);
  void set_objective(int var, double coeff);
  void add_objective(int var, double coeff);
  void set_objective_constant(double c) { objective_constant_ = c; }
  void add_objective_constant(double c) { objective_constant_ += c; }

  int variable_index(const std::string& name) const;         // throws if absent
  std::optional<int> find_variable(const std::string& name) const;
  Variable& mutable_variable(int idx) { return vars_.at(idx); }

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<LinConstraint>& constraints() const { return constraints_; }
  const std::map<int, double>& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }

  int num_binaries() const;

  /// Audit dump: one row per constraint, `tag,sense,rhs,nnz`.
  void dump_constraints_csv(const std::string& path) const;

 private:
  std::vector<Variable> vars_;
  std::vector<LinConstraint> constraints_;
  std::map<int, double> objective_;
  double objective_constant_ = 0;
  std::unordered_map<std::string, int> name_to_index_;
};

enum class SolveStatus { optimal, feasible_limit, infeasible, unbounded, error };

std::string to_string(SolveStatus s);

/// Values of every decision variable plus the solve outcome. Variable names
/// follow the model's naming scheme (x_*, y_*, z_*, a_*, b_*, pc_*, pd_*,
/// eg_*, q_*, qs2v_*, qveh_*, qsh_*, ru_*, rd_*).
struct Solution {
  SolveStatus status = SolveStatus::error;
  double objective = 0;
  double gap = 0;
  std::map<std::string, double> values;

  double at(const std::string& name) const;
};

// Deterministic naming for model entities (zero-padded so lexicographic
// order matches index order).
namespace names {
std::string y(int s, int i);
std::string z(int s, int i, int t);
std::string x(int s, int i, int m);
std::string a(int s, int i, int t);
std::string b(int m);
std::string p_chg(int s, int i, int t);
std::string p_dsg(int s, int i, int t);
std::string e_grid(int t);
std::string q(int s, int i, int t);
std::string q_s2v(int m, int s);
std::string q_veh(int m, int s);
std::string q_shrt(int m, int s);
std::string ru(int t);
std::string rd(int t);
}  // namespace names

/// Station/customer geometry shared by the model builders and everything
/// that needs to read a Solution back (validators, schedule writers, tests).
struct InstanceIndex {
  struct Pack {
    int station = 0;  // index into stations
    int slot = 0;     // battery index within the station
  };
  struct Visit {
    int customer = 0;      // index into customers
    int station = 0;       // index into stations
    int arrival_step = 0;  // absolute step
    double consumed_to_here_kwh = 0;  // cumulative consumption origin -> this stop
    double demand_to_go_kwh = 0;
    int visit_order = 0;  // 0-based position along the customer's route
  };

  std::vector<Station> stations;       // sorted by id
  std::vector<TripRequest> customers;  // sorted by customer id
  std::vector<Pack> packs;             // all (station, slot) pairs, station-major
  std::vector<Visit> visits;           // all (customer, station) pairs, customer-major
  std::map<std::pair<int, int>, std::vector<int>> arrivals;  // (station, step) -> visit ids
  TimeGrid grid;

  int station_index(const std::string& id) const;
  const Visit* find_visit(int customer, int station) const;
};

InstanceIndex build_instance_index(const ScenarioConfig& config);

/// Operations-model options: the objective extensions and the satisfaction
/// constraint variant.
struct OperationsOptions {
  double scc_usd_per_ton = 0;
  enum class EmissionFactor { none, average, marginal } factor = EmissionFactor::none;
  enum class AsMode { off, verbatim, capacity } as_mode = AsMode::off;
  enum class Satisfaction { none, serve_all, thresholds } satisfaction = Satisfaction::none;
};

struct ModelBuild {
  MilpModel model;
  InstanceIndex index;
  std::vector<std::string> warnings;
};

/// Sizing program: minimize installed batteries subject to the full
/// constraint set with hard 100%-service.
ModelBuild build_planning_model(const ScenarioConfig& config);

/// Daily operations program: minimize grid cost minus swap and energy
/// revenue plus shortage penalties, with optional carbon and ancillary
/// service terms.
ModelBuild build_operations_model(const ScenarioConfig& config, const OperationsOptions& options);

struct ConstraintViolation {
  std::string constraint;
  std::string tag;
  double lhs = 0;
  double rhs = 0;
  double magnitude = 0;
  std::string detail;
};

/// Checks a candidate solution row by row (plus bounds and integrality).
/// Throws std::runtime_error when the solution is missing a declared
/// variable.
std::vector<ConstraintViolation> validate_solution(const MilpModel& model, const Solution& solution,
                                                   double tol = 1e-6);

}  // namespace swapnet
