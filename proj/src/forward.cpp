#include "invloc/forward.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "invloc/distance.hpp"

namespace invloc {

namespace {

void check_sizes(const Instance& inst, std::span<const double> w) {
  if (w.size() != inst.size())
    throw std::invalid_argument("forward: weight vector size mismatch");
}

double sum_of(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += v;
  return s;
}

Point weighted_centroid(const Instance& inst, std::span<const double> w,
                        double sumw) {
  Point c{0.0, 0.0};
  for (std::size_t i = 0; i < inst.size(); ++i) {
    c.x += w[i] * inst.sites[i].location.x;
    c.y += w[i] * inst.sites[i].location.y;
  }
  c.x /= sumw;
  c.y /= sumw;
  return c;
}

struct Grad {
  double v = 0.0;
  double gx = 0.0;
  double gy = 0.0;
};

// Hyperbolically smoothed l_p distance and its gradient in x. Exact limit
// delta -> 0; smooth everywhere for delta > 0. Scaled by
// m = max(|dx|,|dy|,delta) so p up to 8 cannot overflow on any coordinates.
Grad smooth_dist(const Point& x, const Point& a, double p, double delta) {
  const double dx = x.x - a.x;
  const double dy = x.y - a.y;
  const double m = std::max({std::abs(dx), std::abs(dy), delta});
  const double rx = dx / m, ry = dy / m, rd = delta / m;
  const double u = rx * rx + rd * rd;
  const double v = ry * ry + rd * rd;
  if (p == 2.0) {
    const double s = u + v;
    const double inv = 1.0 / std::sqrt(s);
    return {m * std::sqrt(s), inv * rx, inv * ry};
  }
  const double hp = 0.5 * p;
  const double s = std::pow(u, hp) + std::pow(v, hp);
  const double f = std::pow(s, 1.0 / p - 1.0);
  return {m * std::pow(s, 1.0 / p), f * std::pow(u, hp - 1.0) * rx,
          f * std::pow(v, hp - 1.0) * ry};
}

// Armijo backtracking gradient descent on a smooth convex function.
// Stops on gradient norm <= grad_tol, on three consecutive displacements
// <= disp_tol, or when backtracking cannot descend any more (objective flat
// to floating-point precision; counted as converged).
struct DescentOut {
  Point x;
  int iters = 0;
  bool converged = false;
};

template <typename F, typename OnStep>
DescentOut armijo_minimize(const F& f, Point x0, double grad_tol,
                           double disp_tol, int max_iter,
                           const OnStep& on_step) {
  Point x = x0;
  Grad cur = f(x);
  double step = 1.0;
  int small_moves = 0;
  int it = 0;
  bool conv = false;
  for (; it < max_iter; ++it) {
    const double gn = std::hypot(cur.gx, cur.gy);
    if (gn <= grad_tol) {
      conv = true;
      break;
    }
    double s = step;
    bool accepted = false;
    Point cand;
    Grad nxt;
    for (int h = 0; h < 60; ++h) {
      cand = {x.x - s * cur.gx, x.y - s * cur.gy};
      nxt = f(cand);
      if (nxt.v <= cur.v - 1e-4 * s * gn * gn) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) {
      conv = true;
      break;
    }
    x = cand;
    cur = nxt;
    on_step(x);
    step = s * 2.0;
    if (s * gn <= disp_tol) {
      if (++small_moves >= 3) {
        conv = true;
        break;
      }
    } else {
      small_moves = 0;
    }
  }
  return {x, it, conv};
}

constexpr double kStageDelta[4] = {1e-2, 1e-4, 1e-6, 1e-8};

// The minimax path pairs each smoothing level with a log-sum-exp sharpness;
// the final stage pushes the max-approximation bias (log n / t) well below
// the distance smoothing error so reported optima are accurate to ~1e-5.
constexpr double kMinimaxDelta[5] = {1e-2, 1e-4, 1e-6, 1e-8, 1e-8};
constexpr double kMinimaxT[5] = {1e1, 1e2, 1e3, 1e4, 1e5};

// Short derivative-free simplex descent on the exact objective. The
// continuation stages park the iterate near the optimum of a smoothed
// surrogate, but a max-type optimum sits on a kink the smoothing rounds
// off, so gradients stop carrying information for the last ~1e-3. Three
// shrinking restarts close that gap; on a convex objective the result can
// only improve.
template <typename Eval>
std::pair<Point, int> exact_polish(const Eval& eval, Point seed) {
  struct Vertex {
    Point x;
    double fv;
  };
  const double scale = 1.0 + std::max(std::abs(seed.x), std::abs(seed.y));
  Point best = seed;
  double fbest = eval(seed);
  int steps = 0;
  for (const double radius : {1e-2 * scale, 1e-4 * scale, 1e-6 * scale}) {
    std::array<Vertex, 3> s{{{best, fbest},
                             {{best.x + radius, best.y}, 0.0},
                             {{best.x, best.y + radius}, 0.0}}};
    s[1].fv = eval(s[1].x);
    s[2].fv = eval(s[2].x);
    auto order = [&] {
      std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) {
        return a.fv < b.fv;
      });
    };
    for (int it = 0; it < 120; ++it) {
      order();
      if (s[2].fv - s[0].fv <= 1e-14 * (1.0 + std::abs(s[0].fv))) break;
      const Point cen{(s[0].x.x + s[1].x.x) / 2.0,
                      (s[0].x.y + s[1].x.y) / 2.0};
      const Point refl{2.0 * cen.x - s[2].x.x, 2.0 * cen.y - s[2].x.y};
      const double fr = eval(refl);
      if (fr < s[0].fv) {
        const Point ext{3.0 * cen.x - 2.0 * s[2].x.x,
                        3.0 * cen.y - 2.0 * s[2].x.y};
        const double fe = eval(ext);
        s[2] = fe < fr ? Vertex{ext, fe} : Vertex{refl, fr};
      } else if (fr < s[1].fv) {
        s[2] = {refl, fr};
      } else {
        const Point con{(cen.x + s[2].x.x) / 2.0, (cen.y + s[2].x.y) / 2.0};
        const double fc = eval(con);
        if (fc < s[2].fv) {
          s[2] = {con, fc};
        } else {
          for (int i = 1; i < 3; ++i) {
            s[i].x = {(s[i].x.x + s[0].x.x) / 2.0,
                      (s[i].x.y + s[0].x.y) / 2.0};
            s[i].fv = eval(s[i].x);
          }
        }
      }
      ++steps;
    }
    order();
    if (s[0].fv < fbest) {
      fbest = s[0].fv;
      best = s[0].x;
    }
  }
  return {best, steps};
}

// The Chebyshev norm has no finite p to smooth; a large finite surrogate
// keeps the descent path usable (the exact objective is still reported).
double effective_p(const Norm& n) { return n.chebyshev() ? 64.0 : n.p; }

ForwardResult degenerate_first_site(const Instance& inst) {
  return {inst.sites.front().location, 0.0, 0, true};
}

}  // namespace

double eval_minisum(const Point& x, std::span<const double> w,
                    const Instance& inst) {
  check_sizes(inst, w);
  double f = 0.0;
  for (std::size_t i = 0; i < inst.size(); ++i)
    f += w[i] * lp_distance(x, inst.sites[i].location, inst.norm);
  return f;
}

double eval_minimax(const Point& x, std::span<const double> w,
                    const Instance& inst) {
  check_sizes(inst, w);
  double f = 0.0;
  for (std::size_t i = 0; i < inst.size(); ++i)
    f = std::max(f, w[i] * lp_distance(x, inst.sites[i].location, inst.norm));
  return f;
}

namespace {

// Classic Weiszfeld iteration for p = 2, with the on-site adjustment: when
// an iterate lands on a site, the pull of the remaining sites either proves
// the site optimal (||R|| <= w_j) or prescribes a safeguarded step along R.
ForwardResult weiszfeld(const Instance& inst, std::span<const double> w,
                        double tol, int max_iter, const IterateObserver& obs) {
  const std::size_t n = inst.size();
  const double sumw = sum_of(w);
  Point x = weighted_centroid(inst, w, sumw);
  double f = eval_minisum(x, w, inst);
  if (obs) obs(x, f);

  std::vector<double> dist(n);
  int iters = 0;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    int onsite = -1;
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = inst.sites[i].location;
      dist[i] = lp_distance(x, a, inst.norm);
      if (w[i] > 0.0 && onsite < 0 &&
          dist[i] < 1e-12 * (1.0 + std::abs(a.x) + std::abs(a.y)))
        onsite = static_cast<int>(i);
    }

    Point cand;
    if (onsite >= 0) {
      double rx = 0.0, ry = 0.0, big_l = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<int>(i) == onsite || w[i] <= 0.0) continue;
        const Point& a = inst.sites[i].location;
        rx += w[i] * (a.x - x.x) / dist[i];
        ry += w[i] * (a.y - x.y) / dist[i];
        big_l += w[i] / dist[i];
      }
      const double rn = std::hypot(rx, ry);
      if (rn <= w[onsite] * (1.0 + 1e-12) + 1e-15) {
        converged = true;  // the site satisfies the optimality condition
        break;
      }
      double t = (rn - w[onsite]) / big_l;
      cand = {x.x + t * rx / rn, x.y + t * ry / rn};
      for (int h = 0; h < 60 && eval_minisum(cand, w, inst) > f; ++h) {
        t *= 0.5;
        cand = {x.x + t * rx / rn, x.y + t * ry / rn};
      }
    } else {
      double nx = 0.0, ny = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (w[i] <= 0.0) continue;
        const Point& a = inst.sites[i].location;
        const double wi_d = w[i] / dist[i];
        nx += wi_d * a.x;
        ny += wi_d * a.y;
        den += wi_d;
      }
      cand = {nx / den, ny / den};
    }

    const double disp = std::hypot(cand.x - x.x, cand.y - x.y);
    x = cand;
    f = eval_minisum(x, w, inst);
    ++iters;
    if (obs) obs(x, f);

    double gn = 0.0;
    bool off_site = true;
    double gx = 0.0, gy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] <= 0.0) continue;
      const Point& a = inst.sites[i].location;
      const double d = lp_distance(x, a, inst.norm);
      if (d < 1e-12 * (1.0 + std::abs(a.x) + std::abs(a.y))) {
        off_site = false;
        break;
      }
      gx += w[i] * (x.x - a.x) / d;
      gy += w[i] * (x.y - a.y) / d;
    }
    gn = off_site ? std::hypot(gx, gy) : std::numeric_limits<double>::max();

    if (disp <= tol || gn <= tol * sumw) {
      converged = true;
      break;
    }
  }
  return {x, eval_minisum(x, w, inst), iters, converged};
}

}  // namespace

ForwardResult solve_minisum(const Instance& inst, std::span<const double> w,
                            double tol, int max_iter,
                            const IterateObserver& obs) {
  check_sizes(inst, w);
  if (sum_of(w) <= 0.0) return degenerate_first_site(inst);
  if (inst.norm.p == 2.0) return weiszfeld(inst, w, tol, max_iter, obs);
  return solve_minisum_descent(inst, w, tol, max_iter, obs);
}

ForwardResult solve_minisum_descent(const Instance& inst,
                                    std::span<const double> w, double tol,
                                    int max_iter, const IterateObserver& obs) {
  check_sizes(inst, w);
  const double sumw = sum_of(w);
  if (sumw <= 0.0) return degenerate_first_site(inst);
  const double p = effective_p(inst.norm);

  Point x = weighted_centroid(inst, w, sumw);
  if (obs) obs(x, eval_minisum(x, w, inst));
  int total = 0;
  bool conv = false;
  for (double delta : kStageDelta) {
    auto f = [&](const Point& y) {
      Grad acc;
      for (std::size_t i = 0; i < inst.size(); ++i) {
        if (w[i] <= 0.0) continue;
        const Grad g = smooth_dist(y, inst.sites[i].location, p, delta);
        acc.v += w[i] * g.v;
        acc.gx += w[i] * g.gx;
        acc.gy += w[i] * g.gy;
      }
      return acc;
    };
    auto on_step = [&](const Point& y) {
      if (obs) obs(y, eval_minisum(y, w, inst));
    };
    const auto out =
        armijo_minimize(f, x, tol * sumw, tol, max_iter, on_step);
    x = out.x;
    total += out.iters;
    conv = out.converged;
  }
  return {x, eval_minisum(x, w, inst), total, conv};
}

ForwardResult solve_minimax(const Instance& inst, std::span<const double> w,
                            double tol, int max_iter,
                            const IterateObserver& obs) {
  check_sizes(inst, w);
  const double sumw = sum_of(w);
  if (sumw <= 0.0) return degenerate_first_site(inst);
  const double p = effective_p(inst.norm);
  const double wmax = *std::max_element(w.begin(), w.end());

  Point x = weighted_centroid(inst, w, sumw);
  if (obs) obs(x, eval_minimax(x, w, inst));
  const std::size_t n = inst.size();
  std::vector<Grad> parts(n);
  int total = 0;
  bool conv = false;
  for (int stage = 0; stage < 5; ++stage) {
    const double delta = kMinimaxDelta[stage];
    const double t = kMinimaxT[stage];
    auto f = [&](const Point& y) {
      double big = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        parts[i] = smooth_dist(y, inst.sites[i].location, p, delta);
        parts[i].v *= w[i];
        big = std::max(big, parts[i].v);
      }
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        sum += std::exp(t * (parts[i].v - big));
      Grad acc;
      acc.v = big + std::log(sum) / t;
      for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(t * (parts[i].v - big)) / sum;
        acc.gx += e * w[i] * parts[i].gx;
        acc.gy += e * w[i] * parts[i].gy;
      }
      return acc;
    };
    auto on_step = [&](const Point& y) {
      if (obs) obs(y, eval_minimax(y, w, inst));
    };
    const auto out =
        armijo_minimize(f, x, tol * std::max(1.0, wmax), tol, max_iter,
                        on_step);
    x = out.x;
    total += out.iters;
    conv = out.converged;
  }
  const auto [px, psteps] = exact_polish(
      [&](const Point& y) { return eval_minimax(y, w, inst); }, x);
  if (obs && (px.x != x.x || px.y != x.y)) obs(px, eval_minimax(px, w, inst));
  x = px;
  total += psteps;
  return {x, eval_minimax(x, w, inst), total, conv};
}

}  // namespace invloc
