#pragma once

#include <cstddef>
#include <vector>

namespace invloc {

// min c'x  s.t.  a_eq x = b_eq,  a_le x <= b_le,  lower <= x <= upper.
// Every lower bound must be finite; upper bounds may be +infinity.
// Encode >= rows as negated <= rows.
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<double> c;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
  std::vector<std::vector<double>> a_le;
  std::vector<double> b_le;
  std::vector<double> lower;
  std::vector<double> upper;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

// When status == Optimal: x is primal feasible within 1e-8, objective = c'x,
// and dual_eq / dual_le are row multipliers in the convention
// reduced_cost_j = c_j - sum_r y_r a_rj (so dual_le <= 0 at optimality).
// Otherwise x and the duals are empty and objective is 0.
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<double> dual_eq;
  std::vector<double> dual_le;
};

// Two-phase primal simplex on bounded variables. Deterministic: repeated
// solves of one problem take the identical pivot path. Throws
// std::invalid_argument on dimension mismatches or non-finite lower bounds.
LpSolution solve_lp(const LpProblem& prob);

}  // namespace invloc
