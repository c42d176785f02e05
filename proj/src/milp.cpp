#include "swapnet/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "swapnet/csv.hpp"

namespace swapnet {

std::string to_string(Sense s) {
  switch (s) {
    case Sense::le: return "<=";
    case Sense::ge: return ">=";
    case Sense::eq: return "=";
  }
  return "?";
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible_limit: return "feasible_limit";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::error: return "error";
  }
  return "?";
}

int MilpModel::add_variable(const std::string& name, VarKind kind, double lb, double ub) {
  if (name_to_index_.count(name)) throw std::logic_error("duplicate variable name: " + name);
  if (lb > ub) throw std::logic_error("variable " + name + " has empty bound interval");
  int idx = static_cast<int>(vars_.size());
  vars_.push_back({name, kind, lb, ub});
  name_to_index_[name] = idx;
  return idx;
}

void MilpModel::add_constraint(const std::string& name, const std::string& tag,
                               std::vector<std::pair<int, double>> terms, Sense sense, double rhs) {
  // Merge duplicate indices and drop zeros so every row is canonical.
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> merged;
  for (const auto& [idx, coef] : terms) {
    if (idx < 0 || idx >= static_cast<int>(vars_.size())) {
      throw std::logic_error("constraint " + name + " references undeclared variable index");
    }
    if (!merged.empty() && merged.back().first == idx) {
      merged.back().second += coef;
    } else {
      merged.emplace_back(idx, coef);
    }
  }
  std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
  constraints_.push_back({name, tag, std::move(merged), sense, rhs});
}

void MilpModel::set_objective(int var, double coeff) {
  if (coeff == 0.0) {
    objective_.erase(var);
  } else {
    objective_[var] = coeff;
  }
}

void MilpModel::add_objective(int var, double coeff) {
  if (coeff == 0.0) return;
  objective_[var] += coeff;
  if (objective_[var] == 0.0) objective_.erase(var);
}

int MilpModel::variable_index(const std::string& name) const {
  auto it = name_to_index_.find(name);
  if (it == name_to_index_.end()) throw std::runtime_error("unknown variable: " + name);
  return it->second;
}

std::optional<int> MilpModel::find_variable(const std::string& name) const {
  auto it = name_to_index_.find(name);
  if (it == name_to_index_.end()) return std::nullopt;
  return it->second;
}

int MilpModel::num_binaries() const {
  int n = 0;
  for (const auto& v : vars_) {
    if (v.kind == VarKind::binary) ++n;
  }
  return n;
}

void MilpModel::dump_constraints_csv(const std::string& path) const {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : constraints_) {
    rows.push_back({c.tag, to_string(c.sense), csv::format_double(c.rhs), std::to_string(c.terms.size())});
  }
  csv::write_file(path, {"tag", "sense", "rhs", "nnz"}, rows);
}

double Solution::at(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw std::runtime_error("incomplete solution: missing value for " + name);
  return it->second;
}

namespace names {
namespace {
std::string fmt(const char* pattern, int a, int b = -1, int c = -1) {
  char buf[64];
  if (c >= 0) {
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  } else if (b >= 0) {
    std::snprintf(buf, sizeof(buf), pattern, a, b);
  } else {
    std::snprintf(buf, sizeof(buf), pattern, a);
  }
  return buf;
}
}  // namespace

std::string y(int s, int i) { return fmt("y_s%02d_i%02d", s, i); }
std::string z(int s, int i, int t) { return fmt("z_s%02d_i%02d_t%03d", s, i, t); }
std::string x(int s, int i, int m) { return fmt("x_s%02d_i%02d_m%03d", s, i, m); }
std::string a(int s, int i, int t) { return fmt("a_s%02d_i%02d_t%03d", s, i, t); }
std::string b(int m) { return fmt("b_m%03d", m); }
std::string p_chg(int s, int i, int t) { return fmt("pc_s%02d_i%02d_t%03d", s, i, t); }
std::string p_dsg(int s, int i, int t) { return fmt("pd_s%02d_i%02d_t%03d", s, i, t); }
std::string e_grid(int t) { return fmt("eg_t%03d", t); }
std::string q(int s, int i, int t) { return fmt("q_s%02d_i%02d_t%03d", s, i, t); }
std::string q_s2v(int m, int s) { return fmt("qs2v_m%03d_s%02d", m, s); }
std::string q_veh(int m, int s) { return fmt("qveh_m%03d_s%02d", m, s); }
std::string q_shrt(int m, int s) { return fmt("qsh_m%03d_s%02d", m, s); }
std::string ru(int t) { return fmt("ru_t%03d", t); }
std::string rd(int t) { return fmt("rd_t%03d", t); }
}  // namespace names

int InstanceIndex::station_index(const std::string& id) const {
  for (size_t i = 0; i < stations.size(); ++i) {
    if (stations[i].id == id) return static_cast<int>(i);
  }
  throw std::runtime_error("unknown station id: " + id);
}

const InstanceIndex::Visit* InstanceIndex::find_visit(int customer, int station) const {
  for (const auto& v : visits) {
    if (v.customer == customer && v.station == station) return &v;
  }
  return nullptr;
}

InstanceIndex build_instance_index(const ScenarioConfig& config) {
  InstanceIndex idx;
  idx.grid = config.grid;
  idx.stations = config.stations;
  std::sort(idx.stations.begin(), idx.stations.end(),
            [](const Station& a, const Station& b) { return a.id < b.id; });
  for (auto& st : idx.stations) std::sort(st.slots.begin(), st.slots.end());

  idx.customers = config.trips;
  std::sort(idx.customers.begin(), idx.customers.end(),
            [](const TripRequest& a, const TripRequest& b) { return a.customer_id < b.customer_id; });

  for (size_t s = 0; s < idx.stations.size(); ++s) {
    for (int slot : idx.stations[s].slots) {
      idx.packs.push_back({static_cast<int>(s), slot});
    }
  }

  for (size_t m = 0; m < idx.customers.size(); ++m) {
    const TripRequest& trip = idx.customers[m];
    double consumed = 0;
    for (size_t leg = 0; leg < trip.visits.size(); ++leg) {
      const StationVisit& sv = trip.visits[leg];
      consumed += sv.consumption_kwh;
      InstanceIndex::Visit v;
      v.customer = static_cast<int>(m);
      v.station = idx.station_index(sv.station_id);
      v.arrival_step = sv.arrival_step;
      v.consumed_to_here_kwh = consumed;
      v.demand_to_go_kwh = sv.demand_to_go_kwh;
      v.visit_order = static_cast<int>(leg);
      int vid = static_cast<int>(idx.visits.size());
      idx.visits.push_back(v);
      idx.arrivals[{v.station, v.arrival_step}].push_back(vid);
    }
  }
  return idx;
}

namespace {

// Shared constraint machinery for the planning and operations programs.
// Builds the swap-assignment, SOE-dynamics, customer-demand and grid
// constraint families; the callers add their own objective and the sizing
// or satisfaction layers.
struct ModelCtx {
  const ScenarioConfig& cfg;
  const OperationsOptions* ops;  // null for the planning build
  bool planning;

  MilpModel model;
  InstanceIndex index;
  std::vector<std::string> warnings;

  TimeSeries price;  // grid-aligned

  // variable index tables
  std::vector<std::vector<int>> v_z, v_a, v_pc, v_pd, v_q;  // [pack][t or soe point]
  std::vector<int> v_y;                                     // [pack], planning only
  std::vector<int> v_eg;                                    // [t]
  std::vector<int> v_qs2v, v_qveh, v_qsh;                   // [visit]
  std::vector<int> v_b;                                     // [customer], thresholds only
  std::vector<int> v_ru, v_rd;                              // [t], AS capacity mode
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> pack_arrivals;
  // (pack, t) -> list of (visit id, x index)
  std::vector<std::map<int, int>> visit_x;  // [visit] -> pack -> x index

  int T0, T1;
  double Q, eta, p_max, dt, e_bar;

  explicit ModelCtx(const ScenarioConfig& c, const OperationsOptions* o)
      : cfg(c), ops(o), planning(o == nullptr), index(build_instance_index(c)) {
    T0 = cfg.grid.t_begin;
    T1 = cfg.grid.t_end;
    Q = cfg.battery.capacity_kwh;
    eta = cfg.battery.eta;
    p_max = cfg.battery.p_max_kw;
    dt = cfg.grid.delta_t_h;
    e_bar = cfg.tariffs.grid_limit_kwh;
    price = resample(cfg.tariffs.grid_price, cfg.grid);
  }

  double price_at(int t) const { return price.values[t - T0]; }

  double qveh_lb(const InstanceIndex::Visit& v) const {
    return index.customers[v.customer].q_ini_kwh - v.consumed_to_here_kwh;
  }
  double qveh_ub(const InstanceIndex::Visit& v) const { return qveh_lb(v) + v.visit_order * Q; }
  double qsh_ub(const InstanceIndex::Visit& v) const {
    return std::max(0.0, v.demand_to_go_kwh + std::max(0.0, -qveh_lb(v)));
  }

  void create_variables() {
    size_t np = index.packs.size();
    v_z.assign(np, {});
    v_a.assign(np, {});
    v_pc.assign(np, {});
    v_pd.assign(np, {});
    v_q.assign(np, {});
    visit_x.assign(index.visits.size(), {});

    if (planning) {
      v_y.resize(np);
      for (size_t k = 0; k < np; ++k) {
        const auto& p = index.packs[k];
        v_y[k] = model.add_variable(names::y(p.station, p.slot), VarKind::binary, 0, 1);
      }
    }
    for (size_t k = 0; k < np; ++k) {
      const auto& p = index.packs[k];
      for (int t = T0; t <= T1; ++t) {
        v_z[k].push_back(model.add_variable(names::z(p.station, p.slot, t), VarKind::binary, 0, 1));
      }
    }
    for (size_t w = 0; w < index.visits.size(); ++w) {
      const auto& v = index.visits[w];
      for (size_t k = 0; k < np; ++k) {
        if (index.packs[k].station != v.station) continue;
        const auto& p = index.packs[k];
        int m_id = index.customers[v.customer].customer_id;
        int xi = model.add_variable(names::x(p.station, p.slot, m_id), VarKind::binary, 0, 1);
        visit_x[w][static_cast<int>(k)] = xi;
        pack_arrivals[{static_cast<int>(k), v.arrival_step}].push_back({static_cast<int>(w), xi});
      }
    }
    for (size_t k = 0; k < np; ++k) {
      const auto& p = index.packs[k];
      for (int t = T0; t <= T1; ++t) {
        v_a[k].push_back(model.add_variable(names::a(p.station, p.slot, t), VarKind::binary, 0, 1));
      }
    }
    if (!planning && ops->satisfaction == OperationsOptions::Satisfaction::thresholds) {
      for (const auto& c : index.customers) {
        v_b.push_back(model.add_variable(names::b(c.customer_id), VarKind::binary, 0, 1));
      }
    }

    for (size_t k = 0; k < np; ++k) {
      const auto& p = index.packs[k];
      for (int t = T0; t <= T1; ++t) {
        v_pc[k].push_back(model.add_variable(names::p_chg(p.station, p.slot, t), VarKind::continuous, 0, p_max));
        v_pd[k].push_back(model.add_variable(names::p_dsg(p.station, p.slot, t), VarKind::continuous, 0, p_max));
      }
      double q0_lo = planning ? 0.0 : cfg.initial_soe_frac * Q;
      double q0_hi = cfg.initial_soe_frac * Q;
      for (int t = T0; t <= T1 + 1; ++t) {
        double lo = (t == T0) ? q0_lo : 0.0;
        double hi = (t == T0) ? q0_hi : Q;
        v_q[k].push_back(model.add_variable(names::q(p.station, p.slot, t), VarKind::continuous, lo, hi));
      }
    }
    for (int t = T0; t <= T1; ++t) {
      v_eg.push_back(model.add_variable(names::e_grid(t), VarKind::continuous, -e_bar, e_bar));
    }
    for (size_t w = 0; w < index.visits.size(); ++w) {
      const auto& v = index.visits[w];
      int m_id = index.customers[v.customer].customer_id;
      v_qs2v.push_back(model.add_variable(names::q_s2v(m_id, v.station), VarKind::continuous, 0, Q));
      v_qveh.push_back(
          model.add_variable(names::q_veh(m_id, v.station), VarKind::continuous, qveh_lb(v), qveh_ub(v)));
      v_qsh.push_back(model.add_variable(names::q_shrt(m_id, v.station), VarKind::continuous, 0, qsh_ub(v)));
    }
    if (!planning && ops->as_mode == OperationsOptions::AsMode::capacity) {
      double cap = index.packs.size() * p_max * dt;
      for (int t = T0; t <= T1; ++t) {
        v_ru.push_back(model.add_variable(names::ru(t), VarKind::continuous, 0, cap));
        v_rd.push_back(model.add_variable(names::rd(t), VarKind::continuous, 0, cap));
      }
    }
  }

  std::string cname(const char* fam, int k, int t) const {
    const auto& p = index.packs[k];
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s_s%02d_i%02d_t%03d", fam, p.station, p.slot, t);
    return buf;
  }
  std::string vnamec(const char* fam, int w) const {
    const auto& v = index.visits[w];
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s_m%03d_s%02d", fam, index.customers[v.customer].customer_id,
                  v.station);
    return buf;
  }

  void add_assignment_constraints() {
    size_t np = index.packs.size();
    // Eq3: per (pack, t) the arrivals assigned to the pack define its swap flag.
    for (size_t k = 0; k < np; ++k) {
      for (int t = T0; t <= T1; ++t) {
        std::vector<std::pair<int, double>> terms;
        auto it = pack_arrivals.find({static_cast<int>(k), t});
        if (it != pack_arrivals.end()) {
          for (const auto& [w, xi] : it->second) terms.emplace_back(xi, 1.0);
        }
        terms.emplace_back(v_z[k][t - T0], -1.0);
        model.add_constraint(cname("Eq3", static_cast<int>(k), t), "Eq3", std::move(terms), Sense::eq, 0.0);
      }
    }
    // Eq4: one swap per station visit.
    for (size_t w = 0; w < index.visits.size(); ++w) {
      std::vector<std::pair<int, double>> terms;
      for (const auto& [k, xi] : visit_x[w]) terms.emplace_back(xi, 1.0);
      model.add_constraint(vnamec("Eq4", static_cast<int>(w)), "Eq4", std::move(terms), Sense::le, 1.0);
    }
    // Eq5: a swapped-in battery charges for at least one step before leaving.
    for (size_t k = 0; k < np; ++k) {
      for (int t = T0; t < T1; ++t) {
        model.add_constraint(cname("Eq5", static_cast<int>(k), t), "Eq5",
                             {{v_z[k][t - T0], 1.0}, {v_z[k][t + 1 - T0], 1.0}}, Sense::le, 1.0);
      }
    }
  }

  void add_soe_dynamics() {
    size_t np = index.packs.size();
    double m_chg = Q + dt * p_max * std::max(eta, 1.0 / eta);
    for (size_t k = 0; k < np; ++k) {
      for (int t = T0; t <= T1; ++t) {
        int qt = v_q[k][t - T0], qt1 = v_q[k][t + 1 - T0];
        int pc = v_pc[k][t - T0], pd = v_pd[k][t - T0], zt = v_z[k][t - T0];
        // Not swapped: SOE follows the charge/discharge power balance.
        model.add_constraint(cname("Eq6cu", static_cast<int>(k), t), "Eq6",
                             {{qt1, 1.0}, {qt, -1.0}, {pc, -dt * eta}, {pd, dt / eta}, {zt, -m_chg}},
                             Sense::le, 0.0);
        model.add_constraint(cname("Eq6cl", static_cast<int>(k), t), "Eq6",
                             {{qt1, 1.0}, {qt, -1.0}, {pc, -dt * eta}, {pd, dt / eta}, {zt, m_chg}},
                             Sense::ge, 0.0);
        // Swapped: SOE is replaced by the inbound vehicle battery's energy.
        auto it = pack_arrivals.find({static_cast<int>(k), t});
        if (it == pack_arrivals.end()) continue;
        for (const auto& [w, xi] : it->second) {
          double m_swp = std::max(Q - qveh_lb(index.visits[w]), qveh_ub(index.visits[w]));
          std::string base = cname("Eq6s", static_cast<int>(k), t) + "_" +
                             std::to_string(index.customers[index.visits[w].customer].customer_id);
          model.add_constraint(base + "_u", "Eq6",
                               {{qt1, 1.0}, {v_qveh[w], -1.0}, {xi, m_swp}}, Sense::le, m_swp);
          model.add_constraint(base + "_l", "Eq6",
                               {{qt1, 1.0}, {v_qveh[w], -1.0}, {xi, -m_swp}}, Sense::ge, -m_swp);
        }
      }
    }
    // Eq7: energy sold equals issued minus inbound when assigned, else zero.
    for (size_t w = 0; w < index.visits.size(); ++w) {
      const auto& v = index.visits[w];
      double m7 = std::max(Q + qveh_ub(v), Q - qveh_lb(v));
      std::vector<std::pair<int, double>> zero_link;
      for (const auto& [k, xi] : visit_x[w]) {
        int q_at_arrival = v_q[k][v.arrival_step - T0];
        std::string base = vnamec("Eq7", static_cast<int>(w)) + "_i" + std::to_string(index.packs[k].slot);
        model.add_constraint(base + "_u", "Eq7",
                             {{v_qs2v[w], 1.0}, {q_at_arrival, -1.0}, {v_qveh[w], 1.0}, {xi, m7}},
                             Sense::le, m7);
        model.add_constraint(base + "_l", "Eq7",
                             {{v_qs2v[w], 1.0}, {q_at_arrival, -1.0}, {v_qveh[w], 1.0}, {xi, -m7}},
                             Sense::ge, -m7);
        zero_link.emplace_back(xi, -Q);
      }
      zero_link.emplace_back(v_qs2v[w], 1.0);
      model.add_constraint(vnamec("Eq7z", static_cast<int>(w)), "Eq7", std::move(zero_link), Sense::le, 0.0);
    }
  }

  void add_demand_constraints() {
    // Eq8: shortage of the issued battery against the remaining route demand.
    for (size_t w = 0; w < index.visits.size(); ++w) {
      const auto& v = index.visits[w];
      for (const auto& [k, xi] : visit_x[w]) {
        int q_at_arrival = v_q[k][v.arrival_step - T0];
        std::string nm = vnamec("Eq8", static_cast<int>(w)) + "_i" + std::to_string(index.packs[k].slot);
        model.add_constraint(nm, "Eq8", {{v_qsh[w], 1.0}, {q_at_arrival, 1.0}, {xi, -v.demand_to_go_kwh}},
                             Sense::ge, 0.0);
      }
    }
    // Eq9: with no swap anywhere on the route, the vehicle's own energy
    // bounds the shortage.
    for (size_t w = 0; w < index.visits.size(); ++w) {
      const auto& v = index.visits[w];
      std::vector<std::pair<int, double>> terms{{v_qsh[w], 1.0}, {v_qveh[w], 1.0}};
      for (size_t w2 = 0; w2 < index.visits.size(); ++w2) {
        if (index.visits[w2].customer != v.customer) continue;
        for (const auto& [k, xi] : visit_x[w2]) terms.emplace_back(xi, v.demand_to_go_kwh);
      }
      model.add_constraint(vnamec("Eq9", static_cast<int>(w)), "Eq9", std::move(terms), Sense::ge,
                           v.demand_to_go_kwh);
    }
    // Eq10: vehicle arrival energy from route consumption plus any energy
    // picked up at earlier stops.
    for (size_t w = 0; w < index.visits.size(); ++w) {
      const auto& v = index.visits[w];
      std::vector<std::pair<int, double>> terms{{v_qveh[w], 1.0}};
      for (size_t w2 = 0; w2 < index.visits.size(); ++w2) {
        const auto& v2 = index.visits[w2];
        if (v2.customer == v.customer && v2.visit_order < v.visit_order) {
          terms.emplace_back(v_qs2v[w2], -1.0);
        }
      }
      const char* tag = (v.visit_order <= 1) ? "Eq10" : "Eq10-ext";
      model.add_constraint(vnamec("Eq10", static_cast<int>(w)), tag, std::move(terms), Sense::eq,
                           qveh_lb(v));
    }
  }

  void add_grid_constraints() {
    size_t np = index.packs.size();
    // Eq11: grid exchange aggregates all charging and discharging.
    for (int t = T0; t <= T1; ++t) {
      std::vector<std::pair<int, double>> terms;
      for (size_t k = 0; k < np; ++k) {
        terms.emplace_back(v_pc[k][t - T0], dt);
        terms.emplace_back(v_pd[k][t - T0], -dt);
      }
      terms.emplace_back(v_eg[t - T0], -1.0);
      char nm[32];
      std::snprintf(nm, sizeof(nm), "Eq11_t%03d", t);
      model.add_constraint(nm, "Eq11", std::move(terms), Sense::eq, 0.0);
    }
    // Eq12/Eq13: charging and discharging are mutually exclusive per pack.
    for (size_t k = 0; k < np; ++k) {
      for (int t = T0; t <= T1; ++t) {
        model.add_constraint(cname("Eq12", static_cast<int>(k), t), "Eq12",
                             {{v_pc[k][t - T0], 1.0}, {v_a[k][t - T0], -p_max}}, Sense::le, 0.0);
        model.add_constraint(cname("Eq13", static_cast<int>(k), t), "Eq13",
                             {{v_pd[k][t - T0], 1.0}, {v_a[k][t - T0], p_max}}, Sense::le, p_max);
      }
    }
    // Eq14: |e_grid| within the interconnection limit, as two inequalities.
    for (int t = T0; t <= T1; ++t) {
      char nm[32];
      std::snprintf(nm, sizeof(nm), "Eq14u_t%03d", t);
      model.add_constraint(nm, "Eq14", {{v_eg[t - T0], 1.0}}, Sense::le, e_bar);
      std::snprintf(nm, sizeof(nm), "Eq14l_t%03d", t);
      model.add_constraint(nm, "Eq14", {{v_eg[t - T0], -1.0}}, Sense::le, e_bar);
    }
  }

  void add_sizing_constraints() {
    size_t np = index.packs.size();
    for (size_t k = 0; k < np; ++k) {
      std::vector<std::pair<int, int>> xs;  // (visit, x index)
      for (size_t w = 0; w < index.visits.size(); ++w) {
        auto it = visit_x[w].find(static_cast<int>(k));
        if (it != visit_x[w].end()) xs.emplace_back(static_cast<int>(w), it->second);
      }
      const auto& p = index.packs[k];
      char nm[48];
      // Eq15: y is 1 exactly when the pack serves at least one swap.
      double m15 = std::max<size_t>(1, xs.size());
      std::vector<std::pair<int, double>> lo{{v_y[k], 1.0}};
      for (const auto& [w, xi] : xs) lo.emplace_back(xi, -1.0);
      std::snprintf(nm, sizeof(nm), "Eq15u_s%02d_i%02d", p.station, p.slot);
      model.add_constraint(nm, "Eq15", std::move(lo), Sense::le, 0.0);
      std::vector<std::pair<int, double>> hi{{v_y[k], -m15}};
      for (const auto& [w, xi] : xs) hi.emplace_back(xi, 1.0);
      std::snprintf(nm, sizeof(nm), "Eq15l_s%02d_i%02d", p.station, p.slot);
      model.add_constraint(nm, "Eq15", std::move(hi), Sense::le, 0.0);
      // Eq16: an uninstalled pack holds no energy at any SOE sample.
      for (int t = T0; t <= T1 + 1; ++t) {
        model.add_constraint(cname("Eq16", static_cast<int>(k), t), "Eq16",
                             {{v_q[k][t - T0], 1.0}, {v_y[k], -Q}}, Sense::le, 0.0);
      }
    }
  }

  void add_serve_all() {
    for (size_t w = 0; w < index.visits.size(); ++w) {
      model.add_constraint(vnamec("Eq17", static_cast<int>(w)), "Eq17", {{v_qsh[w], 1.0}}, Sense::eq, 0.0);
    }
  }

  void add_thresholds() {
    // Eq18: b_m certifies a fully served customer; at least alpha2*N of them.
    for (size_t m = 0; m < index.customers.size(); ++m) {
      std::vector<std::pair<int, double>> terms;
      double m18 = 0;
      for (size_t w = 0; w < index.visits.size(); ++w) {
        if (index.visits[w].customer != static_cast<int>(m)) continue;
        terms.emplace_back(v_qsh[w], 1.0);
        m18 += qsh_ub(index.visits[w]);
      }
      m18 = std::max(m18, 1.0);
      terms.emplace_back(v_b[m], m18);
      char nm[32];
      std::snprintf(nm, sizeof(nm), "Eq18b_m%03d", index.customers[m].customer_id);
      model.add_constraint(nm, "Eq18", std::move(terms), Sense::le, m18);
    }
    std::vector<std::pair<int, double>> count;
    for (size_t m = 0; m < index.customers.size(); ++m) count.emplace_back(v_b[m], 1.0);
    model.add_constraint("Eq18n", "Eq18", std::move(count), Sense::ge,
                         cfg.tariffs.alpha2 * static_cast<double>(index.customers.size()));
    // Eq19: per-stop energy service floor.
    for (size_t w = 0; w < index.visits.size(); ++w) {
      model.add_constraint(vnamec("Eq19", static_cast<int>(w)), "Eq19", {{v_qsh[w], 1.0}}, Sense::le,
                           (1.0 - cfg.tariffs.alpha1) * index.visits[w].demand_to_go_kwh);
    }
  }

  void add_terminal_pin() {
    for (size_t k = 0; k < index.packs.size(); ++k) {
      model.add_constraint(cname("pin", static_cast<int>(k), T1 + 1), "plumbing",
                           {{v_q[k][T1 + 1 - T0], 1.0}, {v_q[k][0], -1.0}}, Sense::ge, 0.0);
    }
  }

  void check_pool_size() {
    for (size_t s = 0; s < index.stations.size(); ++s) {
      size_t worst = 0;
      for (const auto& [key, vs] : index.arrivals) {
        if (key.first == static_cast<int>(s)) worst = std::max(worst, vs.size());
      }
      if (worst > index.stations[s].slots.size()) {
        warnings.push_back("station " + index.stations[s].id + ": " + std::to_string(worst) +
                           " simultaneous arrivals exceed its " +
                           std::to_string(index.stations[s].slots.size()) +
                           " candidate batteries; model is infeasible by construction");
      }
    }
  }
};

}  // namespace

ModelBuild build_planning_model(const ScenarioConfig& cfg) {
  ModelCtx ctx(cfg, nullptr);
  ctx.create_variables();
  ctx.add_assignment_constraints();
  ctx.add_soe_dynamics();
  ctx.add_demand_constraints();
  ctx.add_grid_constraints();
  ctx.add_sizing_constraints();
  ctx.add_serve_all();
  if (cfg.pin_terminal_soe) ctx.add_terminal_pin();
  ctx.check_pool_size();

  for (size_t k = 0; k < ctx.index.packs.size(); ++k) ctx.model.set_objective(ctx.v_y[k], 1.0);

  return {std::move(ctx.model), std::move(ctx.index), std::move(ctx.warnings)};
}

ModelBuild build_operations_model(const ScenarioConfig& cfg, const OperationsOptions& options) {
  ModelCtx ctx(cfg, &options);
  ctx.create_variables();
  ctx.add_assignment_constraints();
  ctx.add_soe_dynamics();
  ctx.add_demand_constraints();
  ctx.add_grid_constraints();
  switch (options.satisfaction) {
    case OperationsOptions::Satisfaction::none: break;
    case OperationsOptions::Satisfaction::serve_all: ctx.add_serve_all(); break;
    case OperationsOptions::Satisfaction::thresholds: ctx.add_thresholds(); break;
  }
  if (cfg.pin_terminal_soe) ctx.add_terminal_pin();
  ctx.check_pool_size();

  MilpModel& m = ctx.model;
  const TimeGrid& grid = cfg.grid;
  TimeSeries revenue = resample(cfg.tariffs.energy_revenue, grid);

  for (int t = grid.t_begin; t <= grid.t_end; ++t) {
    m.add_objective(ctx.v_eg[t - grid.t_begin], ctx.price_at(t));
  }
  for (size_t k = 0; k < ctx.index.packs.size(); ++k) {
    for (int t = grid.t_begin; t <= grid.t_end; ++t) {
      m.add_objective(ctx.v_z[k][t - grid.t_begin], -cfg.tariffs.swap_revenue_usd);
    }
  }
  for (size_t w = 0; w < ctx.index.visits.size(); ++w) {
    const auto& v = ctx.index.visits[w];
    m.add_objective(ctx.v_qs2v[w], -revenue.values[v.arrival_step - grid.t_begin]);
    m.add_objective(ctx.v_qsh[w], cfg.tariffs.shortage_penalty_usd_per_kwh);
  }

  if (options.factor != OperationsOptions::EmissionFactor::none && options.scc_usd_per_ton != 0) {
    const TimeSeries& raw =
        options.factor == OperationsOptions::EmissionFactor::average ? cfg.co2_avg : cfg.co2_marginal;
    if (raw.empty()) {
      throw std::runtime_error("carbon-aware objective requires the " +
                               std::string(options.factor == OperationsOptions::EmissionFactor::average
                                               ? "co2_avg"
                                               : "co2_marginal") +
                               " signal");
    }
    TimeSeries xi = resample(raw, grid);
    for (int t = grid.t_begin; t <= grid.t_end; ++t) {
      m.add_objective(ctx.v_eg[t - grid.t_begin], options.scc_usd_per_ton * xi.values[t - grid.t_begin]);
    }
  }

  if (options.as_mode != OperationsOptions::AsMode::off) {
    if (cfg.ru_price.empty() || cfg.rd_price.empty()) {
      throw std::runtime_error("ancillary-service objective requires ru_price and rd_price signals");
    }
    TimeSeries ru = resample(cfg.ru_price, grid);
    TimeSeries rd = resample(cfg.rd_price, grid);
    if (options.as_mode == OperationsOptions::AsMode::verbatim) {
      for (int t = grid.t_begin; t <= grid.t_end; ++t) {
        int i = t - grid.t_begin;
        m.add_objective(ctx.v_eg[i], ru.values[i] + rd.values[i]);
      }
    } else {
      // Capacity mode: regulation-down is committed from scheduled charging
      // and regulation-up from scheduled discharging; committed up-energy
      // earns the RU price instead of the wholesale price.
      for (int t = grid.t_begin; t <= grid.t_end; ++t) {
        int i = t - grid.t_begin;
        std::vector<std::pair<int, double>> rd_terms{{ctx.v_rd[i], 1.0}};
        std::vector<std::pair<int, double>> ru_terms{{ctx.v_ru[i], 1.0}};
        for (size_t k = 0; k < ctx.index.packs.size(); ++k) {
          rd_terms.emplace_back(ctx.v_pc[k][i], -ctx.dt);
          ru_terms.emplace_back(ctx.v_pd[k][i], -ctx.dt);
        }
        char nm[32];
        std::snprintf(nm, sizeof(nm), "Eq21rd_t%03d", t);
        m.add_constraint(nm, "Eq21", std::move(rd_terms), Sense::le, 0.0);
        std::snprintf(nm, sizeof(nm), "Eq21ru_t%03d", t);
        m.add_constraint(nm, "Eq21", std::move(ru_terms), Sense::le, 0.0);
        m.add_objective(ctx.v_rd[i], -rd.values[i]);
        m.add_objective(ctx.v_ru[i], ctx.price_at(t) - ru.values[i]);
      }
    }
  }

  return {std::move(ctx.model), std::move(ctx.index), std::move(ctx.warnings)};
}

std::vector<ConstraintViolation> validate_solution(const MilpModel& model, const Solution& solution,
                                                   double tol) {
  std::vector<ConstraintViolation> out;
  std::vector<double> vals(model.variables().size());
  for (size_t i = 0; i < model.variables().size(); ++i) {
    const Variable& v = model.variables()[i];
    vals[i] = solution.at(v.name);
    if (vals[i] < v.lb - tol || vals[i] > v.ub + tol) {
      out.push_back({v.name, "bounds", vals[i], v.lb,
                     std::max(v.lb - vals[i], vals[i] - v.ub),
                     "value outside [" + csv::format_double(v.lb) + ", " + csv::format_double(v.ub) + "]"});
    }
    if (v.kind == VarKind::binary && std::abs(vals[i] - std::round(vals[i])) > tol) {
      out.push_back({v.name, "integrality", vals[i], std::round(vals[i]),
                     std::abs(vals[i] - std::round(vals[i])), "binary variable is fractional"});
    }
  }
  for (const auto& c : model.constraints()) {
    double lhs = 0;
    for (const auto& [idx, coef] : c.terms) lhs += coef * vals[idx];
    double slack = 0;
    switch (c.sense) {
      case Sense::le: slack = lhs - c.rhs; break;
      case Sense::ge: slack = c.rhs - lhs; break;
      case Sense::eq: slack = std::abs(lhs - c.rhs); break;
    }
    if (slack > tol) {
      out.push_back({c.name, c.tag, lhs, c.rhs, slack,
                     "violated " + c.name + ": " + csv::format_double(lhs) + " " + to_string(c.sense) +
                         " " + csv::format_double(c.rhs)});
    }
  }
  return out;
}

}  // namespace swapnet
