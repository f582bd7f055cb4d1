#pragma once

#include <vector>

namespace regretlab {

// Linear program  min c.x  subject to  a_ub x <= b_ub,  a_eq x = b_eq,
// lo <= x <= hi.  Variables are free by default; set bounds explicitly.
struct LpProblem {
  int n = 0;
  std::vector<double> c;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
  std::vector<double> lo, hi;

  explicit LpProblem(int nvars);
  void add_ub(std::vector<double> row, double rhs);
  void add_eq(std::vector<double> row, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  // Worst violation of the original constraints and bounds at x.
  double max_residual = 0.0;
};

LpSolution lp_solve(const LpProblem& p);

}  // namespace regretlab
