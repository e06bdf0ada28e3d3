#pragma once

#include <functional>
#include <span>

#include "invloc/model.hpp"

namespace invloc {

struct ForwardResult {
  Point x_star;
  double objective_value = 0.0;  // recomputed exactly at x_star, unsmoothed
  int iterations = 0;
  bool converged = false;
};

// Called once per accepted iterate with the point and the true (unsmoothed)
// objective there. Used by tests to observe descent behavior.
using IterateObserver = std::function<void(const Point&, double)>;

double eval_minisum(const Point& x, std::span<const double> w,
                    const Instance& inst);
double eval_minimax(const Point& x, std::span<const double> w,
                    const Instance& inst);

// Weighted l_p median: min_x sum_i w_i d(x, A_i). For p = 2 this runs the
// classic Weiszfeld iteration (with the on-site adjustment); other p go
// through solve_minisum_descent. Degenerate sum(w) = 0 returns the first
// site, converged, value 0. Stops when the successive-iterate displacement
// is <= tol or the gradient norm is <= tol * sum(w).
ForwardResult solve_minisum(const Instance& inst, std::span<const double> w,
                            double tol = 1e-3, int max_iter = 10000,
                            const IterateObserver& obs = {});

// Smoothed-surrogate gradient path for any p >= 1: hyperbolic smoothing
// d_delta = ((dx^2+delta^2)^(p/2) + (dy^2+delta^2)^(p/2))^(1/p), delta driven
// 1e-2 -> 1e-8 over 4 continuation stages, each minimized by Armijo
// backtracking descent. Exposed so p = 2 results can be cross-checked against
// the Weiszfeld path.
ForwardResult solve_minisum_descent(const Instance& inst,
                                    std::span<const double> w,
                                    double tol = 1e-3, int max_iter = 10000,
                                    const IterateObserver& obs = {});

// Weighted l_p center: min_x max_i w_i d(x, A_i), via log-sum-exp smoothing
// g_t = (1/t) log sum_i exp(t w_i d_delta_i) with t driven 10 -> 1e4 across
// the same 4 stages.
ForwardResult solve_minimax(const Instance& inst, std::span<const double> w,
                            double tol = 1e-3, int max_iter = 10000,
                            const IterateObserver& obs = {});

}  // namespace invloc
