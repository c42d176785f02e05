#include "swapnet/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace swapnet {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr long kMaxIters = 500000;

// How an original variable maps into the non-negative standard form.
struct VarMap {
  enum class Kind { shifted, negated, split } kind = Kind::shifted;
  int col = -1;       // primary standard-form column
  int col_neg = -1;   // negative part for split variables
  double offset = 0;  // lb for shifted, ub for negated
};

struct StdRow {
  std::vector<std::pair<int, double>> terms;
  Sense sense;
  double rhs;
};

}  // namespace

LpResult lp_solve(const LpProblem& problem) {
  const int n = problem.num_vars();

  // ---- transform variables to x >= 0 ----
  std::vector<VarMap> vmap(n);
  int n_std = 0;
  for (int j = 0; j < n; ++j) {
    double lo = problem.lb[j], hi = problem.ub[j];
    if (lo > hi) return {LpStatus::infeasible, {}, 0};
    if (std::isfinite(lo)) {
      vmap[j] = {VarMap::Kind::shifted, n_std++, -1, lo};
    } else if (std::isfinite(hi)) {
      vmap[j] = {VarMap::Kind::negated, n_std++, -1, hi};
    } else {
      vmap[j] = {VarMap::Kind::split, n_std, n_std + 1, 0};
      n_std += 2;
    }
  }

  auto transformed_terms = [&](const std::vector<std::pair<int, double>>& terms, double& rhs_shift) {
    std::vector<std::pair<int, double>> out;
    for (const auto& [j, coef] : terms) {
      const VarMap& m = vmap[j];
      switch (m.kind) {
        case VarMap::Kind::shifted:
          out.emplace_back(m.col, coef);
          rhs_shift += coef * m.offset;
          break;
        case VarMap::Kind::negated:
          out.emplace_back(m.col, -coef);
          rhs_shift += coef * m.offset;
          break;
        case VarMap::Kind::split:
          out.emplace_back(m.col, coef);
          out.emplace_back(m.col_neg, -coef);
          break;
      }
    }
    return out;
  };

  std::vector<StdRow> rows;
  rows.reserve(problem.rows.size() + static_cast<size_t>(n));
  for (const auto& row : problem.rows) {
    double shift = 0;
    auto terms = transformed_terms(row.terms, shift);
    rows.push_back({std::move(terms), row.sense, row.rhs - shift});
  }
  // Finite upper bounds of shifted variables become explicit rows.
  for (int j = 0; j < n; ++j) {
    const VarMap& m = vmap[j];
    if (m.kind == VarMap::Kind::shifted && std::isfinite(problem.ub[j])) {
      rows.push_back({{{m.col, 1.0}}, Sense::le, problem.ub[j] - problem.lb[j]});
    }
  }

  const int m_rows = static_cast<int>(rows.size());

  // ---- standard-form columns: vars, slacks, artificials ----
  int n_slack = 0;
  for (const auto& r : rows) {
    if (r.sense != Sense::eq) ++n_slack;
  }
  const int slack0 = n_std;
  const int art0 = n_std + n_slack;
  const int n_total = art0 + m_rows;  // at most one artificial per row
  const int rhs_col = n_total;

  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m_rows + 1, n_total + 1);
  std::vector<int> basis(m_rows, -1);
  std::vector<bool> is_artificial(n_total, false);
  int n_art = 0;

  {
    int slack = slack0;
    for (int r = 0; r < m_rows; ++r) {
      double sign = rows[r].rhs < 0 ? -1.0 : 1.0;
      for (const auto& [j, coef] : rows[r].terms) tab(r, j) += sign * coef;
      tab(r, rhs_col) = sign * rows[r].rhs;
      double slack_coef = 0;
      if (rows[r].sense == Sense::le) slack_coef = sign * 1.0;
      if (rows[r].sense == Sense::ge) slack_coef = sign * -1.0;
      if (rows[r].sense != Sense::eq) {
        tab(r, slack) = slack_coef;
        if (slack_coef > 0) basis[r] = slack;
        ++slack;
      }
      if (basis[r] < 0) {
        int art = art0 + n_art++;
        tab(r, art) = 1.0;
        is_artificial[art] = true;
        basis[r] = art;
      }
    }
  }

  auto pivot = [&](int r, int c) {
    tab.row(r) /= tab(r, c);
    for (int rr = 0; rr <= m_rows; ++rr) {
      if (rr == r) continue;
      double f = tab(rr, c);
      if (f != 0.0) tab.row(rr) -= f * tab.row(r);
    }
    basis[r] = c;
  };

  // Bland's rule: entering column is the smallest index with a negative
  // reduced cost; the leaving row breaks ratio ties by smallest basic index.
  auto run_simplex = [&](const std::vector<bool>& blocked) -> LpStatus {
    for (long iter = 0; iter < kMaxIters; ++iter) {
      int enter = -1;
      for (int j = 0; j < n_total; ++j) {
        if (blocked[j]) continue;
        if (tab(m_rows, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::optimal;
      int leave = -1;
      double best_ratio = 0;
      for (int r = 0; r < m_rows; ++r) {
        double a = tab(r, enter);
        if (a > kPivotTol) {
          double ratio = tab(r, rhs_col) / a;
          if (leave < 0 || ratio < best_ratio - kPivotTol ||
              (std::abs(ratio - best_ratio) <= kPivotTol && basis[r] < basis[leave])) {
            leave = r;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      pivot(leave, enter);
    }
    return LpStatus::iteration_limit;
  };

  std::vector<bool> none_blocked(n_total, false);

  // ---- phase 1 ----
  if (n_art > 0) {
    for (int j = art0; j < art0 + n_art; ++j) tab(m_rows, j) = 1.0;
    for (int r = 0; r < m_rows; ++r) {
      if (is_artificial[basis[r]]) tab.row(m_rows) -= tab.row(r);
    }
    LpStatus st = run_simplex(none_blocked);
    if (st == LpStatus::iteration_limit) return {st, {}, 0};
    if (tab(m_rows, rhs_col) < -kFeasTol) return {LpStatus::infeasible, {}, 0};
    // Drive residual artificials out of the basis where possible.
    for (int r = 0; r < m_rows; ++r) {
      if (!is_artificial[basis[r]]) continue;
      int c = -1;
      for (int j = 0; j < art0; ++j) {
        if (std::abs(tab(r, j)) > kPivotTol) {
          c = j;
          break;
        }
      }
      if (c >= 0) pivot(r, c);
      // else: redundant row; the artificial stays basic at value zero.
    }
  }

  // ---- phase 2 ----
  std::vector<bool> blocked(n_total, false);
  for (int j = 0; j < n_total; ++j) blocked[j] = is_artificial[j];
  tab.row(m_rows).setZero();
  for (int j = 0; j < n; ++j) {
    const VarMap& m = vmap[j];
    double cj = problem.c[j];
    if (cj == 0) continue;
    switch (m.kind) {
      case VarMap::Kind::shifted: tab(m_rows, m.col) += cj; break;
      case VarMap::Kind::negated: tab(m_rows, m.col) -= cj; break;
      case VarMap::Kind::split:
        tab(m_rows, m.col) += cj;
        tab(m_rows, m.col_neg) -= cj;
        break;
    }
  }
  for (int r = 0; r < m_rows; ++r) {
    double f = tab(m_rows, basis[r]);
    if (f != 0.0) tab.row(m_rows) -= f * tab.row(r);
  }
  LpStatus st = run_simplex(blocked);
  if (st == LpStatus::iteration_limit || st == LpStatus::unbounded) return {st, {}, 0};

  // ---- extract ----
  Eigen::VectorXd x_std = Eigen::VectorXd::Zero(n_total);
  for (int r = 0; r < m_rows; ++r) x_std[basis[r]] = tab(r, rhs_col);

  LpResult res;
  res.status = LpStatus::optimal;
  res.x.resize(n);
  for (int j = 0; j < n; ++j) {
    const VarMap& m = vmap[j];
    switch (m.kind) {
      case VarMap::Kind::shifted: res.x[j] = m.offset + x_std[m.col]; break;
      case VarMap::Kind::negated: res.x[j] = m.offset - x_std[m.col]; break;
      case VarMap::Kind::split: res.x[j] = x_std[m.col] - x_std[m.col_neg]; break;
    }
  }
  res.objective = problem.c.dot(res.x) + problem.c0;
  return res;
}

}  // namespace swapnet
