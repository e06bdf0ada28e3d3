#pragma once

#include "invloc/forward.hpp"
#include "invloc/master.hpp"
#include "invloc/model.hpp"

namespace invloc {

enum class HullCheck { Inside, Outside, NotApplicable };

// For Euclidean minisum instances the optimum always lies in the convex hull
// of the sites, for any nonnegative weights; a goal point outside the hull is
// therefore infeasible before any cut is generated. Boundary points (within
// 1e-9) count as inside. Other objectives/norms: NotApplicable.
HullCheck hull_precheck(const Instance& inst, const Point& x_bar);

struct InverseOptions {
  double eps = 0.01;       // stop when ||w_k - w_{k-1}||_2 <= eps
  int max_outer = 200;
  double forward_tol = 1e-3;
  int forward_max_iter = 10000;
};

// Row generation for the inverse problem: make x_bar optimal at minimum
// modification cost. Starts from the forward optimum under the original
// weights, then alternates master solves (over all cuts so far) with forward
// solves that generate the next cut. The operative stop is the weight-change
// rule (delta_w <= eps); a forward optimum landing exactly on x_bar stops
// too, and a stalled run (duplicate cut) either certifies x_bar optimal via
// a high-accuracy re-solve or ends at the iteration limit. An infeasible
// master at any iteration proves the whole inverse problem infeasible, as
// does a failed hull pre-check. Every outcome carries the full iteration
// trace.
RunTrace solve_inverse(const Instance& inst, const Point& x_bar,
                       const InverseOptions& opt = {});

struct VerifyReport {
  double gap = 0.0;        // f(x_bar, w_hat) - f(x_forward, w_hat)
  Point x_forward;
  double dist_to_xbar = 0.0;
  bool pass = false;       // gap <= tol
};

// Independent feasibility check of a finished plan: re-runs the forward
// solver under w_hat (tight tolerance) and reports how far x_bar is from
// optimal. gap may be slightly negative when x_bar beats the solver's point.
VerifyReport verify_plan(const Instance& inst, const Point& x_bar,
                         const ModificationPlan& plan, double tol);

}  // namespace invloc
