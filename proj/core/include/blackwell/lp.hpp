#pragma once

#include <vector>

#include "blackwell/errors.hpp"

namespace blackwell {

// Dense linear program
//   minimize    c'x
//   subject to  a_ub x <= b_ub,  a_eq x = b_eq,  x >= 0.
// Solved by a two-phase primal simplex with Bland's pivoting rule. Problems
// here are tiny (tens of variables); no effort is spent on sparsity.
struct LpProblem {
  int n = 0;  // number of variables
  std::vector<double> c;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
};

struct LpSolution {
  double objective = 0.0;
  std::vector<double> x;
  // KKT multipliers: lagrangian c'x + mult_ub'(a_ub x - b_ub) + mult_eq'(a_eq x - b_eq),
  // with mult_ub >= 0 at an optimum.
  std::vector<double> mult_ub;
  std::vector<double> mult_eq;
};

// Throws SolverError on infeasible or unbounded input.
LpSolution solve_lp(const LpProblem& lp);

}  // namespace blackwell
