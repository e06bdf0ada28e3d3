#pragma once

#include <array>
#include <vector>

#include "invloc/model.hpp"

namespace invloc {

// l_p distance between two points. Overflow-guarded for large coordinates:
// m * ((|dx|/m)^p + (|dy|/m)^p)^(1/p) with m = max(|dx|, |dy|).
double lp_distance(const Point& a, const Point& b, const Norm& norm);

// Gradient of x -> d(x, a). Component j is sign(x_j - a_j)*|x_j - a_j|^(p-1)
// / d^(p-1); its l_q norm is 1 (1/p + 1/q = 1) wherever defined. Throws
// std::domain_error when d(x, a) < 1e-12 (the distance has no gradient at
// coincident points).
std::array<double, 2> lp_distance_gradient(const Point& x, const Point& a,
                                           const Norm& norm);

// One cut row of the master program: delta_i = d(x_bar, A_i) - d(x_k, A_i).
// k identifies the generating iteration within a pool.
struct DistGapRow {
  int k = 0;
  std::vector<double> delta;
};

DistGapRow gap_row(const Instance& inst, const Point& x_bar, const Point& x_k);

}  // namespace invloc
