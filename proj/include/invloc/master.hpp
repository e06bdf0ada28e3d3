#pragma once

#include <optional>

#include "invloc/distance.hpp"
#include "invloc/model.hpp"
#include "invloc/simplex.hpp"

namespace invloc {

// The accumulated cut rows of one inverse run, all taken against a fixed
// goal point x_bar. generated_points[j] is the sub-problem optimum that
// produced rows[j].
struct CutPool {
  explicit CutPool(Point x_bar) : x_bar(x_bar) {}

  Point x_bar;
  std::vector<DistGapRow> rows;
  std::vector<Point> generated_points;

  void add(const Instance& inst, const Point& x_k);
  std::size_t size() const { return rows.size(); }
};

// Master LP over variables (w_hat, p, q) in R^{3n}:
//   min   sum_i c_plus_i p_i + c_minus_i q_i
//   s.t.  w_hat_i - p_i + q_i = w_i
//         0 <= w_hat,  0 <= p <= u_plus,  0 <= q <= u_minus
// plus, per pool row j, the cut sum_i delta_i^j w_hat_i <= 0.
LpProblem build_minisum_master(const Instance& inst, const CutPool& pool);

// Minimax variant. The cut max_i w_hat_i delta_i^j <= 0 is decomposed
// exactly: every index with delta_i^j > 1e-9 gets the row w_hat_i <= 0
// (duplicates across pool rows are emitted once). This is stronger than the
// aggregated minisum cut, so plans stay feasible for the goal point but may
// cost more than the true inverse optimum.
LpProblem build_minimax_master(const Instance& inst, const CutPool& pool);

// Builds the master for the instance's objective, solves it, and returns the
// complementarity-normalized plan, or nullopt when the LP is infeasible.
// An unbounded master cannot occur (the objective is nonnegative); it is
// surfaced as std::logic_error.
std::optional<ModificationPlan> solve_master(const Instance& inst,
                                             const CutPool& pool);

}  // namespace invloc
