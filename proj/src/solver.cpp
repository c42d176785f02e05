#include "swapnet/solver.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swapnet/csv.hpp"

namespace swapnet {

namespace fs = std::filesystem;

namespace {

constexpr double kIntTol = 1e-7;
constexpr double kObjTie = 1e-9;

LpProblem relaxation_of(const MilpModel& model) {
  LpProblem lp;
  int n = static_cast<int>(model.variables().size());
  lp.c = Eigen::VectorXd::Zero(n);
  lp.lb.resize(n);
  lp.ub.resize(n);
  for (int j = 0; j < n; ++j) {
    lp.lb[j] = model.variables()[j].lb;
    lp.ub[j] = model.variables()[j].ub;
  }
  for (const auto& [j, coef] : model.objective()) lp.c[j] = coef;
  lp.c0 = model.objective_constant();
  for (const auto& c : model.constraints()) {
    lp.rows.push_back({c.terms, c.sense, c.rhs});
  }
  return lp;
}

int branch_rank(const std::string& name) {
  if (name.starts_with("y_")) return 0;
  if (name.starts_with("z_")) return 1;
  if (name.starts_with("x_")) return 2;
  if (name.starts_with("a_")) return 3;
  if (name.starts_with("b_")) return 4;
  return 5;
}

struct Node {
  std::vector<int8_t> fix;  // per-binary: -1 free, 0, 1
  double bound;
};

}  // namespace

LpResult solve_relaxation(const MilpModel& model) { return lp_solve(relaxation_of(model)); }

Solution solve_exact(const MilpModel& model, const SolveLimits& limits) {
  const int nbin = model.num_binaries();
  if (nbin > limits.max_binaries) {
    throw SizeError("solve_exact: model has " + std::to_string(nbin) +
                    " binaries, above the guard rail of " + std::to_string(limits.max_binaries));
  }

  // Binaries in branch order: structural kind first, then name.
  std::vector<int> binaries;
  for (size_t j = 0; j < model.variables().size(); ++j) {
    if (model.variables()[j].kind == VarKind::binary) binaries.push_back(static_cast<int>(j));
  }
  std::sort(binaries.begin(), binaries.end(), [&](int a, int b) {
    const auto& va = model.variables()[a];
    const auto& vb = model.variables()[b];
    int ra = branch_rank(va.name), rb = branch_rank(vb.name);
    if (ra != rb) return ra < rb;
    return va.name < vb.name;
  });

  LpProblem base = relaxation_of(model);
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed_s = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  auto lp_with_fix = [&](const std::vector<int8_t>& fix) {
    LpProblem lp = base;
    for (size_t b = 0; b < binaries.size(); ++b) {
      if (fix[b] >= 0) {
        lp.lb[binaries[b]] = fix[b];
        lp.ub[binaries[b]] = fix[b];
      }
    }
    return lp_solve(lp);
  };

  bool have_incumbent = false;
  double best_obj = 0;
  Eigen::VectorXd best_x;
  std::vector<int8_t> best_key;
  long nodes = 0;
  bool limit_hit = false;
  double best_open_bound = -std::numeric_limits<double>::infinity();
  bool bound_known = false;

  auto binary_key = [&](const Eigen::VectorXd& x) {
    std::vector<int8_t> key(binaries.size());
    for (size_t b = 0; b < binaries.size(); ++b) {
      key[b] = static_cast<int8_t>(std::lround(x[binaries[b]]));
    }
    return key;
  };

  auto offer_incumbent = [&](double obj, const Eigen::VectorXd& x) {
    auto key = binary_key(x);
    if (!have_incumbent || obj < best_obj - kObjTie ||
        (std::abs(obj - best_obj) <= kObjTie && key < best_key)) {
      have_incumbent = true;
      best_obj = obj;
      best_x = x;
      best_key = std::move(key);
    }
  };

  auto first_fractional = [&](const Eigen::VectorXd& x, const std::vector<int8_t>& fix) {
    for (size_t b = 0; b < binaries.size(); ++b) {
      if (fix[b] >= 0) continue;
      double v = x[binaries[b]];
      if (std::abs(v - std::round(v)) > kIntTol) return static_cast<int>(b);
    }
    return -1;
  };

  std::vector<Node> stack;
  const std::vector<int8_t> all_free(binaries.size(), -1);

  // Root relaxation plus a rounding pass for an early upper bound.
  {
    LpResult root = lp_solve(base);
    if (root.status == LpStatus::unbounded) {
      return {SolveStatus::unbounded, 0, 0, {}};
    }
    if (root.status == LpStatus::iteration_limit) {
      return {SolveStatus::error, 0, 0, {}};
    }
    if (root.status == LpStatus::optimal) {
      if (!binaries.empty() && limits.time_limit_s > 0 && limits.node_limit > 0) {
        std::vector<int8_t> rounded(binaries.size());
        for (size_t b = 0; b < binaries.size(); ++b) {
          rounded[b] = static_cast<int8_t>(std::lround(root.x[binaries[b]]));
        }
        LpResult fixed = lp_with_fix(rounded);
        if (fixed.status == LpStatus::optimal) offer_incumbent(fixed.objective, fixed.x);
      }
      stack.push_back({all_free, root.objective});
    }
    // Root infeasible: fall through with an empty stack -> infeasible.
  }

  while (!stack.empty()) {
    if (nodes >= limits.node_limit || elapsed_s() > limits.time_limit_s) {
      limit_hit = true;
      double lo = stack.front().bound;
      for (const auto& n : stack) lo = std::min(lo, n.bound);
      best_open_bound = lo;
      bound_known = true;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    ++nodes;

    if (have_incumbent && node.bound >= best_obj - kObjTie) continue;

    LpResult lp = lp_with_fix(node.fix);
    if (lp.status != LpStatus::optimal) continue;  // infeasible branch
    if (have_incumbent && lp.objective >= best_obj - kObjTie) continue;

    int frac = first_fractional(lp.x, node.fix);
    if (frac < 0) {
      offer_incumbent(lp.objective, lp.x);
      // Early stop once the requested gap is certain: every open bound is
      // already within gap of the incumbent.
      if (limits.mip_gap > 0) {
        double lo = lp.objective;
        for (const auto& n : stack) lo = std::min(lo, n.bound);
        double gap = (best_obj - lo) / std::max(std::abs(best_obj), 1e-10);
        if (gap <= limits.mip_gap) {
          best_open_bound = lo;
          bound_known = true;
          limit_hit = true;  // stopped by gap rule, tree not exhausted
          break;
        }
      }
      continue;
    }

    double v = lp.x[binaries[frac]];
    int8_t near = v >= 0.5 ? 1 : 0;
    Node far{node.fix, lp.objective};
    far.fix[frac] = static_cast<int8_t>(1 - near);
    Node close{std::move(node.fix), lp.objective};
    close.fix[frac] = near;
    stack.push_back(std::move(far));
    stack.push_back(std::move(close));  // explored first
  }

  Solution sol;
  if (!have_incumbent) {
    sol.status = limit_hit ? SolveStatus::feasible_limit : SolveStatus::infeasible;
    sol.gap = std::numeric_limits<double>::infinity();
    return sol;
  }

  sol.status = SolveStatus::optimal;
  sol.objective = best_obj;
  if (limit_hit) {
    double lo = bound_known ? std::min(best_open_bound, best_obj) : best_obj;
    sol.gap = (best_obj - lo) / std::max(std::abs(best_obj), 1e-10);
    if (limits.mip_gap > 0 && sol.gap <= limits.mip_gap + 1e-12) {
      sol.status = SolveStatus::optimal;  // proven within requested gap
    } else {
      sol.status = SolveStatus::feasible_limit;
    }
  } else {
    sol.gap = 0;
  }
  for (size_t j = 0; j < model.variables().size(); ++j) {
    const Variable& var = model.variables()[j];
    double v = best_x[static_cast<int>(j)];
    if (var.kind == VarKind::binary) v = std::round(v);
    if (v == 0.0) v = 0.0;  // normalize -0
    sol.values[var.name] = v;
  }
  return sol;
}

// ---------------------------------------------------------------------------
// LP file format
// ---------------------------------------------------------------------------

namespace {

void append_term(std::string& out, bool first, double coef, const std::string& name) {
  if (first) {
    if (coef < 0) {
      out += "- ";
      coef = -coef;
    }
  } else {
    out += coef < 0 ? " - " : " + ";
    coef = std::abs(coef);
  }
  out += csv::format_double(coef);
  out += ' ';
  out += name;
}

}  // namespace

std::string render_lp(const MilpModel& model) {
  // Lexicographic variable order, as the interchange contract requires.
  std::vector<int> order(model.variables().size());
  for (size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return model.variables()[a].name < model.variables()[b].name;
  });
  std::vector<int> pos(order.size());
  for (size_t r = 0; r < order.size(); ++r) pos[order[r]] = static_cast<int>(r);

  std::string out;
  out += "\\ swapnet model export\n";
  out += "Minimize\n obj:";
  {
    std::vector<std::pair<int, double>> terms(model.objective().begin(), model.objective().end());
    std::sort(terms.begin(), terms.end(), [&](const auto& a, const auto& b) {
      return pos[a.first] < pos[b.first];
    });
    std::string expr;
    bool first = true;
    for (const auto& [j, coef] : terms) {
      expr += first ? " " : "";
      append_term(expr, first, coef, model.variables()[j].name);
      first = false;
    }
    if (model.objective_constant() != 0) {
      if (first) {
        expr += " " + csv::format_double(model.objective_constant());
      } else {
        double c = model.objective_constant();
        expr += c < 0 ? " - " : " + ";
        expr += csv::format_double(std::abs(c));
      }
    }
    out += expr;
    out += '\n';
  }
  out += "Subject To\n";
  for (const auto& c : model.constraints()) {
    out += ' ';
    out += c.name;
    out += ':';
    std::vector<std::pair<int, double>> terms = c.terms;
    std::sort(terms.begin(), terms.end(), [&](const auto& a, const auto& b) {
      return pos[a.first] < pos[b.first];
    });
    std::string expr;
    bool first = true;
    for (const auto& [j, coef] : terms) {
      expr += first ? " " : "";
      append_term(expr, first, coef, model.variables()[j].name);
      first = false;
    }
    if (first) expr += " 0 _zero";  // degenerate all-zero row keeps the format valid
    out += expr;
    out += ' ';
    out += to_string(c.sense);
    out += ' ';
    out += csv::format_double(c.rhs);
    out += '\n';
  }
  out += "Bounds\n";
  for (int j : order) {
    const Variable& v = model.variables()[j];
    if (v.kind == VarKind::binary) continue;  // [0,1] default is correct only after Binaries
    out += ' ';
    if (v.lb == v.ub) {
      out += v.name + " = " + csv::format_double(v.lb);
    } else {
      out += csv::format_double(v.lb) + " <= " + v.name + " <= " + csv::format_double(v.ub);
    }
    out += '\n';
  }
  out += "Binaries\n";
  for (int j : order) {
    if (model.variables()[j].kind == VarKind::binary) {
      out += ' ';
      out += model.variables()[j].name;
      out += '\n';
    }
  }
  out += "End\n";
  return out;
}

void export_lp(const MilpModel& model, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write LP file: " + path);
  f << render_lp(model);
  if (!f) throw std::runtime_error("write failed: " + path);
}

namespace {

struct LpTokenizer {
  std::vector<std::string> tokens;
  size_t pos = 0;

  explicit LpTokenizer(const std::string& text) {
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) {
        tokens.push_back(cur);
        cur.clear();
      }
    };
    for (size_t i = 0; i < text.size(); ++i) {
      char ch = text[i];
      if (ch == '\\') {  // comment to end of line
        flush();
        while (i < text.size() && text[i] != '\n') ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        flush();
        continue;
      }
      if (ch == ':' || ch == '+' || ch == '-') {
        // signs inside scientific notation stay glued to the number
        if ((ch == '-' || ch == '+') && !cur.empty() && (cur.back() == 'e' || cur.back() == 'E') &&
            (std::isdigit(static_cast<unsigned char>(cur[0])) || cur[0] == '.' || cur[0] == '-')) {
          cur.push_back(ch);
          continue;
        }
        // '-' may start a number when the current token is empty
        if (ch == '-' && cur.empty() && i + 1 < text.size() &&
            (std::isdigit(static_cast<unsigned char>(text[i + 1])) || text[i + 1] == '.')) {
          cur.push_back(ch);
          continue;
        }
        flush();
        tokens.emplace_back(1, ch);
        continue;
      }
      if (ch == '<' || ch == '>' || ch == '=') {
        flush();
        std::string op(1, ch);
        if (i + 1 < text.size() && text[i + 1] == '=') {
          op += '=';
          ++i;
        }
        tokens.push_back(op);
        continue;
      }
      cur.push_back(ch);
    }
    flush();
  }

  bool done() const { return pos >= tokens.size(); }
  const std::string& peek() const { return tokens[pos]; }
  std::string next() { return tokens[pos++]; }
};

bool is_number(const std::string& tok) {
  char* end = nullptr;
  std::strtod(tok.c_str(), &end);
  return end && *end == '\0' && end != tok.c_str();
}

bool is_keyword(const std::string& tok, const char* kw) {
  if (tok.size() != std::strlen(kw)) return false;
  for (size_t i = 0; i < tok.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(tok[i])) != std::tolower(kw[i])) return false;
  }
  return true;
}

}  // namespace

MilpModel parse_lp_text(const std::string& text) {
  LpTokenizer tz(text);
  MilpModel model;
  std::map<std::string, int> seen;

  auto get_var = [&](const std::string& name) {
    auto it = seen.find(name);
    if (it != seen.end()) return it->second;
    int idx = model.add_variable(name, VarKind::continuous, 0, kLpInf);
    seen[name] = idx;
    return idx;
  };

  enum class Section { none, objective, constraints, bounds, binaries, done };
  Section sec = Section::none;

  auto classify = [](const std::string& tok) -> std::optional<Section> {
    if (is_keyword(tok, "minimize") || is_keyword(tok, "min")) return Section::objective;
    if (is_keyword(tok, "subject") || is_keyword(tok, "st") || is_keyword(tok, "s.t.")) {
      return Section::constraints;
    }
    if (is_keyword(tok, "bounds")) return Section::bounds;
    if (is_keyword(tok, "binaries") || is_keyword(tok, "binary") || is_keyword(tok, "bin")) {
      return Section::binaries;
    }
    if (is_keyword(tok, "end")) return Section::done;
    if (is_keyword(tok, "maximize") || is_keyword(tok, "max")) {
      throw ProtocolError("LP parse: maximization models are not supported");
    }
    return std::nullopt;
  };
  // consumes the current section-keyword token (and a trailing "To")
  auto enter_section = [&](Section s) {
    tz.next();
    if (s == Section::constraints && !tz.done() && is_keyword(tz.peek(), "to")) tz.next();
    return s;
  };

  // expression parser shared by objective and constraints; stops at a
  // relational operator or a section keyword.
  struct Expr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0;
  };
  auto parse_expr = [&](std::optional<Section>& next_sec, std::string* sense_out,
                        std::string* label_out) -> Expr {
    Expr e;
    double sign = 1;
    bool pending_coef = false;
    double coef = 1;
    bool first_tok = true;
    auto fold_pending = [&] {
      if (pending_coef) {
        e.constant += coef;
        pending_coef = false;
      }
    };
    while (!tz.done()) {
      std::string tok = tz.peek();
      if (tok == "<=" || tok == ">=" || tok == "=" || tok == "<" || tok == ">") {
        fold_pending();
        if (sense_out) {
          tz.next();
          *sense_out = tok;
        }
        return e;
      }
      auto ns = classify(tok);
      if (ns) {
        fold_pending();
        next_sec = enter_section(*ns);
        return e;
      }
      tz.next();
      if (tok == "+") {
        sign = 1;
        continue;
      }
      if (tok == "-") {
        sign = -1;
        continue;
      }
      if (!tz.done() && tz.peek() == ":") {
        if (label_out && first_tok) {
          *label_out = tok;
          tz.next();
          first_tok = false;
          continue;
        }
        throw ProtocolError("LP parse: unexpected label " + tok);
      }
      first_tok = false;
      if (is_number(tok)) {
        double v = std::strtod(tok.c_str(), nullptr);
        if (pending_coef) throw ProtocolError("LP parse: two consecutive numbers near " + tok);
        coef = sign * v;
        pending_coef = true;
        sign = 1;
        continue;
      }
      // variable token
      int idx = get_var(tok);
      double c = pending_coef ? coef : sign;
      e.terms.emplace_back(idx, c);
      pending_coef = false;
      coef = 1;
      sign = 1;
    }
    if (pending_coef) e.constant += coef;
    return e;
  };

  while (!tz.done()) {
    if (sec == Section::none) {
      auto ns = classify(tz.peek());
      if (!ns) throw ProtocolError("LP parse: expected a section keyword at file start");
      sec = enter_section(*ns);
      continue;
    }
    if (sec == Section::objective) {
      std::optional<Section> ns;
      std::string label;
      Expr e = parse_expr(ns, nullptr, &label);
      for (const auto& [idx, c] : e.terms) model.add_objective(idx, c);
      model.add_objective_constant(e.constant);
      sec = ns.value_or(Section::done);
      continue;
    }
    if (sec == Section::constraints) {
      auto ns0 = classify(tz.peek());
      if (ns0) {
        sec = enter_section(*ns0);
        continue;
      }
      std::optional<Section> ns;
      std::string sense_tok, label;
      Expr e = parse_expr(ns, &sense_tok, &label);
      if (ns) {  // row without relation: only legal if empty
        if (!e.terms.empty()) throw ProtocolError("LP parse: constraint missing relation");
        sec = *ns;
        continue;
      }
      if (sense_tok.empty()) throw ProtocolError("LP parse: constraint missing relation");
      if (tz.done()) throw ProtocolError("LP parse: constraint missing right-hand side");
      std::string rhs_tok = tz.next();
      if (!is_number(rhs_tok)) throw ProtocolError("LP parse: bad right-hand side " + rhs_tok);
      double rhs = std::strtod(rhs_tok.c_str(), nullptr) - e.constant;
      Sense sense = sense_tok[0] == '<' ? Sense::le : (sense_tok[0] == '>' ? Sense::ge : Sense::eq);
      if (label.empty()) label = "r" + std::to_string(model.constraints().size());
      // drop parser-introduced `_zero` placeholder columns
      std::erase_if(e.terms, [&](const auto& t) { return model.variables()[t.first].name == "_zero"; });
      model.add_constraint(label, "plumbing", std::move(e.terms), sense, rhs);
      continue;
    }
    if (sec == Section::bounds) {
      auto ns0 = classify(tz.peek());
      if (ns0) {
        sec = enter_section(*ns0);
        continue;
      }
      // forms: a <= x <= b | x <= b | x >= a | x = v | x free
      std::string first = tz.next();
      if (is_number(first)) {
        double lo = std::strtod(first.c_str(), nullptr);
        if (tz.next() != "<=") throw ProtocolError("LP parse: bad bounds line near " + first);
        std::string var = tz.next();
        if (tz.next() != "<=") throw ProtocolError("LP parse: bad bounds line for " + var);
        std::string hi_tok = tz.next();
        double hi = std::strtod(hi_tok.c_str(), nullptr);
        int idx = get_var(var);
        model.mutable_variable(idx).lb = lo;
        model.mutable_variable(idx).ub = hi;
      } else {
        int idx = get_var(first);
        if (tz.done()) throw ProtocolError("LP parse: dangling bounds line for " + first);
        std::string op = tz.next();
        Variable& var = model.mutable_variable(idx);
        if (is_keyword(op, "free")) {
          var.lb = -kLpInf;
          var.ub = kLpInf;
        } else if (op == "<=") {
          var.ub = std::strtod(tz.next().c_str(), nullptr);
        } else if (op == ">=") {
          var.lb = std::strtod(tz.next().c_str(), nullptr);
        } else if (op == "=") {
          double v = std::strtod(tz.next().c_str(), nullptr);
          var.lb = var.ub = v;
        } else {
          throw ProtocolError("LP parse: bad bounds operator " + op);
        }
      }
      continue;
    }
    if (sec == Section::binaries) {
      auto ns0 = classify(tz.peek());
      if (ns0) {
        sec = enter_section(*ns0);
        continue;
      }
      int idx = get_var(tz.next());
      Variable& var = model.mutable_variable(idx);
      var.kind = VarKind::binary;
      if (var.lb < 0) var.lb = 0;
      if (var.ub > 1) var.ub = 1;
      continue;
    }
    if (sec == Section::done) break;
  }
  return model;
}

MilpModel import_lp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open LP file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lp_text(buf.str());
}

// ---------------------------------------------------------------------------
// solution interchange file
// ---------------------------------------------------------------------------

std::string render_solution_file(const Solution& solution) {
  std::string out;
  out += "status " + to_string(solution.status) + "\n";
  out += "objective " + csv::format_double(solution.objective) + "\n";
  out += "gap " + csv::format_double(solution.gap) + "\n";
  for (const auto& [name, value] : solution.values) {
    out += "v " + name + " " + csv::format_double(value) + "\n";
  }
  out += "end\n";
  return out;
}

void write_solution_file(const Solution& solution, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write solution file: " + path);
  f << render_solution_file(solution);
}

Solution parse_solution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProtocolError("solution file missing: " + path);
  Solution sol;
  std::string line;
  bool saw_status = false, saw_end = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "status") {
      std::string s;
      ls >> s;
      if (s == "optimal") sol.status = SolveStatus::optimal;
      else if (s == "feasible_limit") sol.status = SolveStatus::feasible_limit;
      else if (s == "infeasible") sol.status = SolveStatus::infeasible;
      else if (s == "unbounded") sol.status = SolveStatus::unbounded;
      else if (s == "error") sol.status = SolveStatus::error;
      else throw ProtocolError("solution file: unknown status '" + s + "'");
      saw_status = true;
    } else if (key == "objective" || key == "gap") {
      std::string tok;
      ls >> tok;
      char* end = nullptr;
      double v = std::strtod(tok.c_str(), &end);
      if (!end || *end != '\0') throw ProtocolError("solution file: bad number in '" + line + "'");
      (key == "objective" ? sol.objective : sol.gap) = v;
    } else if (key == "v") {
      std::string name, tok;
      ls >> name >> tok;
      char* end = nullptr;
      double value = std::strtod(tok.c_str(), &end);
      if (ls.fail() || !end || *end != '\0') {
        throw ProtocolError("solution file: malformed value line '" + line + "'");
      }
      sol.values[name] = value;
    } else if (key == "end") {
      saw_end = true;
    } else {
      throw ProtocolError("solution file: unknown record '" + key + "'");
    }
  }
  if (!saw_status || !saw_end) {
    throw ProtocolError("solution file truncated: " + path);
  }
  return sol;
}

// ---------------------------------------------------------------------------
// external solver adapter
// ---------------------------------------------------------------------------

Solution solve_external(const MilpModel& model, const SolveLimits& limits,
                        const std::string& solver_command) {
  if (solver_command.empty()) {
    throw EnvironmentError("no external solver configured; pass --solver-cmd or use the internal solver");
  }

  fs::path dir;
  {
    std::string tmpl = (fs::temp_directory_path() / "swapnet-solve-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw EnvironmentError("cannot create temp dir for solver run");
    dir = buf.data();
  }
  fs::path lp_path = dir / "model.lp";
  fs::path sol_path = dir / "model.sol";
  fs::path log_path = dir / "solver.log";

  export_lp(model, lp_path.string());

  std::string cmd = solver_command + " " + lp_path.string() + " " + sol_path.string() + " --gap " +
                    csv::format_double(limits.mip_gap);
  if (std::isfinite(limits.time_limit_s)) {
    cmd += " --time-limit " + csv::format_double(limits.time_limit_s);
  }
  if (limits.node_limit != std::numeric_limits<long>::max()) {
    cmd += " --node-limit " + std::to_string(limits.node_limit);
  }
  cmd += " > " + log_path.string() + " 2>&1";

  int rc = std::system(cmd.c_str());
  auto captured = [&]() -> std::string {
    std::ifstream f(log_path);
    std::ostringstream buf;
    buf << f.rdbuf();
    std::string s = buf.str();
    if (s.size() > 2000) s = s.substr(0, 2000) + "...";
    return s;
  };

  if (rc == -1 || (WIFEXITED(rc) && WEXITSTATUS(rc) == 127)) {
    std::string msg = "external solver not runnable: '" + solver_command +
                      "' (install it or point --solver-cmd at a solver binary)";
    fs::remove_all(dir);
    throw EnvironmentError(msg);
  }

  Solution sol;
  try {
    sol = parse_solution_file(sol_path.string());
  } catch (const ProtocolError& e) {
    std::string msg = std::string(e.what()) + "; solver output: " + captured();
    fs::remove_all(dir);
    throw ProtocolError(msg);
  }
  fs::remove_all(dir);

  if (sol.status == SolveStatus::optimal || sol.status == SolveStatus::feasible_limit) {
    if (sol.values.empty() && !model.variables().empty() && sol.status == SolveStatus::optimal) {
      throw ProtocolError("external solver reported optimal but returned no variable values");
    }
    // Sparse solution files are allowed; absent variables are at zero.
    for (const auto& v : model.variables()) {
      sol.values.emplace(v.name, 0.0);
    }
  }
  return sol;
}

}  // namespace swapnet
