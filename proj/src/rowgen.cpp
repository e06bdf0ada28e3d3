#include "invloc/rowgen.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace invloc {

namespace {

constexpr double kHullTol = 1e-9;
constexpr double kCertScale = 1e-9;   // objective-gap certificate scale
constexpr double kExactScale = 1e-12; // point-hit fires on exact hits only
constexpr double kDupTol = 1e-9;      // duplicate cut point detection

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain; returns the hull counterclockwise without the
// closing point. Collinear inputs collapse to 2 (or 1) points.
std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point& a, const Point& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Point> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double dist_point_segment(const Point& p, const Point& a, const Point& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

ForwardResult forward_solve(const Instance& inst, std::span<const double> w,
                            double tol, int max_iter) {
  return inst.objective == Objective::Minisum
             ? solve_minisum(inst, w, tol, max_iter)
             : solve_minimax(inst, w, tol, max_iter);
}

double eval_objective(const Instance& inst, const Point& x,
                      std::span<const double> w) {
  return inst.objective == Objective::Minisum ? eval_minisum(x, w, inst)
                                              : eval_minimax(x, w, inst);
}

double cert_f(double f_bar) {
  return kCertScale * std::max(1.0, std::abs(f_bar));
}

ModificationPlan zero_cost_plan(const Instance& inst) {
  ModificationPlan plan;
  plan.w_hat = inst.weights();
  plan.p_plus.assign(inst.size(), 0.0);
  plan.q_minus.assign(inst.size(), 0.0);
  plan.cost = 0.0;
  return plan;
}

}  // namespace

HullCheck hull_precheck(const Instance& inst, const Point& x_bar) {
  if (inst.objective != Objective::Minisum || inst.norm.p != 2.0)
    return HullCheck::NotApplicable;
  std::vector<Point> pts;
  pts.reserve(inst.size());
  for (const ClientSite& s : inst.sites) pts.push_back(s.location);
  const std::vector<Point> hull = convex_hull(std::move(pts));
  if (hull.size() == 1) {
    return std::hypot(x_bar.x - hull[0].x, x_bar.y - hull[0].y) <= kHullTol
               ? HullCheck::Inside
               : HullCheck::Outside;
  }
  if (hull.size() == 2) {
    return dist_point_segment(x_bar, hull[0], hull[1]) <= kHullTol
               ? HullCheck::Inside
               : HullCheck::Outside;
  }
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    const double signed_dist =
        cross(a, b, x_bar) / std::hypot(b.x - a.x, b.y - a.y);
    if (signed_dist < -kHullTol) return HullCheck::Outside;
  }
  return HullCheck::Inside;
}

// The loop's forward solves run at the caller's (coarse) tolerance, which is
// too loose to certify optimality: the apparent gap at x_bar can dip below
// the certificate while the master is still moving. Any objective-gap stop
// is therefore confirmed against a high-accuracy re-solve.
double accurate_gap(const Instance& inst, const Point& x_bar,
                    const std::vector<double>& w, const InverseOptions& opt) {
  const ForwardResult fwd =
      forward_solve(inst, w, 1e-6, std::max(opt.forward_max_iter, 200000));
  return eval_objective(inst, x_bar, w) - fwd.objective_value;
}

RunTrace solve_inverse(const Instance& inst, const Point& x_bar,
                       const InverseOptions& opt) {
  RunTrace trace;

  if (hull_precheck(inst, x_bar) == HullCheck::Outside) {
    trace.outcome = Outcome::Infeasible;
    return trace;
  }

  const std::vector<double> w0 = inst.weights();
  const ForwardResult fwd0 =
      forward_solve(inst, w0, opt.forward_tol, opt.forward_max_iter);
  trace.records.push_back({0, fwd0.x_star, w0, 0.0, 0.0, false});

  const double f_bar0 = eval_objective(inst, x_bar, w0);
  if (f_bar0 - fwd0.objective_value <= cert_f(f_bar0) &&
      accurate_gap(inst, x_bar, w0, opt) <= cert_f(f_bar0)) {
    // x_bar is already optimal under the original weights.
    trace.outcome = Outcome::Converged;
    trace.stop_rule = StopRule::ObjectiveGap;
    trace.final_plan = zero_cost_plan(inst);
    return trace;
  }

  const double exact_x =
      kExactScale * std::max({1.0, std::abs(x_bar.x), std::abs(x_bar.y)});

  CutPool pool(x_bar);
  pool.add(inst, fwd0.x_star);
  std::vector<double> w_prev = w0;

  for (int k = 1; k <= opt.max_outer; ++k) {
    std::optional<ModificationPlan> plan = solve_master(inst, pool);
    if (!plan) {
      // An infeasible relaxation proves the inverse problem infeasible.
      trace.outcome = Outcome::Infeasible;
      trace.final_plan.reset();
      return trace;
    }
    const std::vector<double> w_k = plan->w_hat;
    const ForwardResult fwd =
        forward_solve(inst, w_k, opt.forward_tol, opt.forward_max_iter);
    const Point x_k = fwd.x_star;
    const double delta = weight_change(w_k, w_prev);

    bool stalled = false;
    for (const Point& seen : pool.generated_points) {
      if (std::hypot(x_k.x - seen.x, x_k.y - seen.y) <= kDupTol) {
        stalled = true;
        break;
      }
    }
    trace.records.push_back({k, x_k, w_k, plan->cost, delta, stalled});
    trace.final_plan = std::move(plan);

    if (delta <= opt.eps) {
      trace.outcome = Outcome::Converged;
      trace.stop_rule = StopRule::WeightChange;
      return trace;
    }
    if (std::hypot(x_bar.x - x_k.x, x_bar.y - x_k.y) <= exact_x) {
      // The forward optimum landed on x_bar itself.
      trace.outcome = Outcome::Converged;
      trace.stop_rule = StopRule::PointHit;
      return trace;
    }
    if (stalled) {
      // A repeated cut cannot change the master. If x_bar is optimal under
      // w_k within certificate grade the stall is benign; otherwise stop
      // honestly rather than loop on identical relaxations.
      const double f_bar = eval_objective(inst, x_bar, w_k);
      if (accurate_gap(inst, x_bar, w_k, opt) <= cert_f(f_bar)) {
        trace.outcome = Outcome::Converged;
        trace.stop_rule = StopRule::ObjectiveGap;
        return trace;
      }
      trace.outcome = Outcome::IterationLimit;
      return trace;
    }
    pool.add(inst, x_k);
    w_prev = w_k;
  }
  trace.outcome = Outcome::IterationLimit;
  return trace;
}

VerifyReport verify_plan(const Instance& inst, const Point& x_bar,
                         const ModificationPlan& plan, double tol) {
  const ForwardResult fwd = forward_solve(inst, plan.w_hat, 1e-6, 200000);
  VerifyReport report;
  report.x_forward = fwd.x_star;
  report.gap =
      eval_objective(inst, x_bar, plan.w_hat) - fwd.objective_value;
  report.dist_to_xbar =
      std::hypot(x_bar.x - fwd.x_star.x, x_bar.y - fwd.x_star.y);
  report.pass = report.gap <= tol;
  return report;
}

}  // namespace invloc
