#include "regretlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace regretlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-7;

// x_j = shift + sign1 * y_{col1} + sign2 * y_{col2}; col2 < 0 when unused.
struct VarMap {
  double shift = 0.0;
  int col1 = -1, col2 = -1;
  double sign1 = 1.0, sign2 = -1.0;
};

struct Tableau {
  int cols = 0;                         // structural columns (no rhs)
  std::vector<std::vector<double>> t;   // rows of length cols + 1
  std::vector<int> basis;

  void pivot(int r, int e) {
    std::vector<double>& pr = t[r];
    const double pv = pr[e];
    for (double& v : pr) v /= pv;
    pr[e] = 1.0;
    for (size_t i = 0; i < t.size(); ++i) {
      if (static_cast<int>(i) == r) continue;
      std::vector<double>& row = t[i];
      const double f = row[e];
      if (f == 0.0) continue;
      for (int j = 0; j <= cols; ++j) row[j] -= f * pr[j];
      row[e] = 0.0;
    }
    basis[r] = e;
  }
};

// Bland's rule keeps the iteration count finite on degenerate problems.
enum class PivotResult { Optimal, Unbounded, Pivoted };

PivotResult simplex_step(Tableau& tab, std::vector<double>& cost,
                         double& cost_rhs, int allowed_cols) {
  int e = -1;
  for (int j = 0; j < allowed_cols; ++j)
    if (cost[j] < -kCostTol) {
      e = j;
      break;
    }
  if (e < 0) return PivotResult::Optimal;

  int r = -1;
  double best = kInf;
  for (size_t i = 0; i < tab.t.size(); ++i) {
    const double a = tab.t[i][e];
    if (a <= kPivotTol) continue;
    const double ratio = tab.t[i][tab.cols] / a;
    if (ratio < best - 1e-15 ||
        (ratio < best + 1e-15 &&
         (r < 0 || tab.basis[i] < tab.basis[r]))) {
      best = ratio;
      r = static_cast<int>(i);
    }
  }
  if (r < 0) return PivotResult::Unbounded;

  // Update the cost row alongside the tableau pivot.
  const double f = cost[e] / tab.t[r][e];
  if (f != 0.0) {
    for (int j = 0; j <= tab.cols; ++j) {
      const double v = j < tab.cols ? cost[j] : cost_rhs;
      const double nv = v - f * tab.t[r][j];
      if (j < tab.cols)
        cost[j] = nv;
      else
        cost_rhs = nv;
    }
    cost[e] = 0.0;
  }
  tab.pivot(r, e);
  return PivotResult::Pivoted;
}

double residual(const LpProblem& p, const std::vector<double>& x) {
  double worst = 0.0;
  for (size_t i = 0; i < p.a_ub.size(); ++i) {
    double s = -p.b_ub[i];
    for (int j = 0; j < p.n; ++j) s += p.a_ub[i][j] * x[j];
    worst = std::max(worst, s);
  }
  for (size_t i = 0; i < p.a_eq.size(); ++i) {
    double s = -p.b_eq[i];
    for (int j = 0; j < p.n; ++j) s += p.a_eq[i][j] * x[j];
    worst = std::max(worst, std::abs(s));
  }
  for (int j = 0; j < p.n; ++j) {
    if (p.lo[j] > -kInf) worst = std::max(worst, p.lo[j] - x[j]);
    if (p.hi[j] < kInf) worst = std::max(worst, x[j] - p.hi[j]);
  }
  return worst;
}

}  // namespace

LpProblem::LpProblem(int nvars)
    : n(nvars),
      c(nvars, 0.0),
      lo(nvars, -kInf),
      hi(nvars, kInf) {
  if (nvars <= 0) throw std::invalid_argument("lp needs at least one variable");
}

void LpProblem::add_ub(std::vector<double> row, double rhs) {
  if (static_cast<int>(row.size()) != n)
    throw std::invalid_argument("lp row has wrong length");
  a_ub.push_back(std::move(row));
  b_ub.push_back(rhs);
}

void LpProblem::add_eq(std::vector<double> row, double rhs) {
  if (static_cast<int>(row.size()) != n)
    throw std::invalid_argument("lp row has wrong length");
  a_eq.push_back(std::move(row));
  b_eq.push_back(rhs);
}

LpSolution lp_solve(const LpProblem& p) {
  // Rewrite over nonnegative variables y.
  std::vector<VarMap> vmap(p.n);
  int ny = 0;
  std::vector<std::pair<int, double>> range_rows;  // (y col, hi - lo)
  for (int j = 0; j < p.n; ++j) {
    VarMap& m = vmap[j];
    const double lo = p.lo[j], hi = p.hi[j];
    if (lo > -kInf) {
      m.shift = lo;
      m.col1 = ny++;
      m.sign1 = 1.0;
      if (hi < kInf) range_rows.push_back({m.col1, hi - lo});
    } else if (hi < kInf) {
      m.shift = hi;
      m.col1 = ny++;
      m.sign1 = -1.0;
    } else {
      m.col1 = ny++;
      m.col2 = ny++;
    }
  }

  const int n_ub = static_cast<int>(p.a_ub.size());
  const int n_range = static_cast<int>(range_rows.size());
  const int n_eq = static_cast<int>(p.a_eq.size());
  const int m = n_ub + n_range + n_eq;
  const int n_slack = n_ub + n_range;
  const int n_struct = ny + n_slack;

  Tableau tab;
  tab.cols = n_struct + m;  // artificials appended at the end
  tab.t.assign(m, std::vector<double>(tab.cols + 1, 0.0));
  tab.basis.resize(m);

  auto fill_row = [&](std::vector<double>& out, const std::vector<double>& a,
                      double b) {
    double rhs = b;
    for (int j = 0; j < p.n; ++j) {
      const VarMap& vm = vmap[j];
      const double coef = a[j];
      if (coef == 0.0) continue;
      rhs -= coef * vm.shift;
      out[vm.col1] += coef * vm.sign1;
      if (vm.col2 >= 0) out[vm.col2] += coef * vm.sign2;
    }
    out[tab.cols] = rhs;
  };

  int row = 0;
  for (int i = 0; i < n_ub; ++i, ++row) {
    fill_row(tab.t[row], p.a_ub[i], p.b_ub[i]);
    tab.t[row][ny + row] = 1.0;
  }
  for (int i = 0; i < n_range; ++i, ++row) {
    tab.t[row][range_rows[i].first] = 1.0;
    tab.t[row][ny + row] = 1.0;
    tab.t[row][tab.cols] = range_rows[i].second;
  }
  for (int i = 0; i < n_eq; ++i, ++row) fill_row(tab.t[row], p.a_eq[i], p.b_eq[i]);

  double scale = 1.0;
  for (int i = 0; i < m; ++i) {
    std::vector<double>& r = tab.t[i];
    if (r[tab.cols] < 0.0)
      for (double& v : r) v = -v;
    scale = std::max(scale, r[tab.cols]);
    r[n_struct + i] = 1.0;
    tab.basis[i] = n_struct + i;
  }

  // Phase 1: minimize the artificial mass.
  std::vector<double> cost(tab.cols, 0.0);
  double cost_rhs = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= tab.cols; ++j) {
      const double v = tab.t[i][j];
      if (j < tab.cols)
        cost[j] -= v;
      else
        cost_rhs -= v;
    }
  }
  for (int i = 0; i < m; ++i) cost[n_struct + i] = 0.0;

  const long iter_cap = 20000L + 200L * (m + tab.cols);
  long iters = 0;
  while (true) {
    PivotResult r = simplex_step(tab, cost, cost_rhs, n_struct);
    if (r == PivotResult::Optimal) break;
    if (r == PivotResult::Unbounded)
      throw std::runtime_error("phase-1 lp cannot be unbounded");
    if (++iters > iter_cap) throw std::runtime_error("simplex iteration limit");
  }

  LpSolution sol;
  if (-cost_rhs > kFeasTol * scale) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }

  // Drive leftover artificials out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n_struct) continue;
    int e = -1;
    for (int j = 0; j < n_struct; ++j)
      if (std::abs(tab.t[i][j]) > kPivotTol) {
        e = j;
        break;
      }
    if (e >= 0) {
      const double f = cost[e] / tab.t[i][e];
      if (f != 0.0) {
        for (int j = 0; j < tab.cols; ++j) cost[j] -= f * tab.t[i][j];
        cost_rhs -= f * tab.t[i][tab.cols];
        cost[e] = 0.0;
      }
      tab.pivot(i, e);
    }
    // Otherwise the row is redundant; its artificial stays basic at zero.
  }

  // Phase 2: the real objective over y.
  std::vector<double> cy(tab.cols, 0.0);
  for (int j = 0; j < p.n; ++j) {
    const VarMap& vm = vmap[j];
    cy[vm.col1] += p.c[j] * vm.sign1;
    if (vm.col2 >= 0) cy[vm.col2] += p.c[j] * vm.sign2;
  }
  cost = cy;
  cost_rhs = 0.0;
  for (int i = 0; i < m; ++i) {
    const int b = tab.basis[i];
    const double cb = cy[b];
    if (cb == 0.0) continue;
    for (int j = 0; j < tab.cols; ++j) cost[j] -= cb * tab.t[i][j];
    cost_rhs -= cb * tab.t[i][tab.cols];
    cost[tab.basis[i]] = 0.0;
  }

  iters = 0;
  while (true) {
    PivotResult r = simplex_step(tab, cost, cost_rhs, n_struct);
    if (r == PivotResult::Optimal) break;
    if (r == PivotResult::Unbounded) {
      sol.status = LpStatus::Unbounded;
      return sol;
    }
    if (++iters > iter_cap) throw std::runtime_error("simplex iteration limit");
  }

  std::vector<double> y(n_struct + m, 0.0);
  for (int i = 0; i < m; ++i) y[tab.basis[i]] = tab.t[i][tab.cols];
  sol.x.resize(p.n);
  for (int j = 0; j < p.n; ++j) {
    const VarMap& vm = vmap[j];
    double v = vm.shift + vm.sign1 * y[vm.col1];
    if (vm.col2 >= 0) v += vm.sign2 * y[vm.col2];
    sol.x[j] = v;
  }
  sol.status = LpStatus::Optimal;
  sol.objective = 0.0;
  for (int j = 0; j < p.n; ++j) sol.objective += p.c[j] * sol.x[j];
  sol.max_residual = residual(p, sol.x);
  return sol;
}

}  // namespace regretlab
