#include "invloc/distance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace invloc {

namespace {

constexpr double kSingularDist = 1e-12;

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double lp_distance(const Point& a, const Point& b, const Norm& norm) {
  const double dx = std::abs(a.x - b.x);
  const double dy = std::abs(a.y - b.y);
  if (norm.chebyshev()) return std::max(dx, dy);
  const double p = norm.p;
  if (p == 1.0) return dx + dy;
  const double m = std::max(dx, dy);
  if (m == 0.0) return 0.0;
  const double rx = dx / m, ry = dy / m;
  if (p == 2.0) return m * std::sqrt(rx * rx + ry * ry);
  return m * std::pow(std::pow(rx, p) + std::pow(ry, p), 1.0 / p);
}

std::array<double, 2> lp_distance_gradient(const Point& x, const Point& a,
                                           const Norm& norm) {
  const double dx = x.x - a.x;
  const double dy = x.y - a.y;
  const double d = lp_distance(x, a, norm);
  if (d < kSingularDist)
    throw std::domain_error(
        "lp_distance_gradient: singular at coincident points");
  if (norm.chebyshev()) {
    // Not differentiable on |dx| = |dy|; report the larger component's
    // subgradient, ties going to x.
    if (std::abs(dx) >= std::abs(dy)) return {sign_of(dx), 0.0};
    return {0.0, sign_of(dy)};
  }
  const double p = norm.p;
  if (p == 1.0) return {sign_of(dx), sign_of(dy)};
  if (p == 2.0) return {dx / d, dy / d};
  const double m = std::max(std::abs(dx), std::abs(dy));
  const double scale = std::pow(d / m, p - 1.0);
  const double gx = sign_of(dx) * std::pow(std::abs(dx) / m, p - 1.0) / scale;
  const double gy = sign_of(dy) * std::pow(std::abs(dy) / m, p - 1.0) / scale;
  return {gx, gy};
}

DistGapRow gap_row(const Instance& inst, const Point& x_bar,
                   const Point& x_k) {
  DistGapRow row;
  row.delta.reserve(inst.size());
  for (const ClientSite& s : inst.sites)
    row.delta.push_back(lp_distance(x_bar, s.location, inst.norm) -
                        lp_distance(x_k, s.location, inst.norm));
  return row;
}

}  // namespace invloc
