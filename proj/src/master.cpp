#include "invloc/master.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace invloc {

namespace {

constexpr double kGapTol = 1e-9;  // a cut coefficient above this forces w_hat_i = 0
constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared frame: variables (w_hat, p, q) in R^{3n} with the linkage rows
// w_hat_i - p_i + q_i = w_i. Cuts differ per objective and are added by the
// builders below.
LpProblem master_frame(const Instance& inst) {
  const std::size_t n = inst.size();
  LpProblem lp;
  lp.num_vars = 3 * n;
  lp.c.assign(3 * n, 0.0);
  lp.lower.assign(3 * n, 0.0);
  lp.upper.assign(3 * n, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    const ClientSite& s = inst.sites[i];
    lp.c[n + i] = s.c_plus;
    lp.c[2 * n + i] = s.c_minus;
    lp.upper[n + i] = s.u_plus;
    lp.upper[2 * n + i] = s.u_minus;
    std::vector<double> row(3 * n, 0.0);
    row[i] = 1.0;
    row[n + i] = -1.0;
    row[2 * n + i] = 1.0;
    lp.a_eq.push_back(std::move(row));
    lp.b_eq.push_back(s.weight);
  }
  return lp;
}

}  // namespace

void CutPool::add(const Instance& inst, const Point& x_k) {
  DistGapRow row = gap_row(inst, x_bar, x_k);
  row.k = static_cast<int>(rows.size());
  rows.push_back(std::move(row));
  generated_points.push_back(x_k);
}

LpProblem build_minisum_master(const Instance& inst, const CutPool& pool) {
  const std::size_t n = inst.size();
  LpProblem lp = master_frame(inst);
  for (const DistGapRow& cut : pool.rows) {
    std::vector<double> row(3 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) row[i] = cut.delta[i];
    lp.a_le.push_back(std::move(row));
    lp.b_le.push_back(0.0);
  }
  return lp;
}

LpProblem build_minimax_master(const Instance& inst, const CutPool& pool) {
  const std::size_t n = inst.size();
  LpProblem lp = master_frame(inst);
  std::vector<bool> forced(n, false);
  for (const DistGapRow& cut : pool.rows)
    for (std::size_t i = 0; i < n; ++i)
      if (cut.delta[i] > kGapTol) forced[i] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!forced[i]) continue;
    std::vector<double> row(3 * n, 0.0);
    row[i] = 1.0;
    lp.a_le.push_back(std::move(row));
    lp.b_le.push_back(0.0);
  }
  return lp;
}

std::optional<ModificationPlan> solve_master(const Instance& inst,
                                             const CutPool& pool) {
  const LpProblem lp = inst.objective == Objective::Minisum
                           ? build_minisum_master(inst, pool)
                           : build_minimax_master(inst, pool);
  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Infeasible) return std::nullopt;
  if (sol.status == LpStatus::Unbounded)
    throw std::logic_error(
        "master LP unbounded; impossible with a nonnegative objective");

  const std::size_t n = inst.size();
  ModificationPlan plan;
  plan.w_hat.resize(n);
  plan.p_plus.resize(n);
  plan.q_minus.resize(n);
  double cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const ClientSite& s = inst.sites[i];
    double p = std::clamp(sol.x[n + i], 0.0, s.u_plus);
    double q = std::clamp(sol.x[2 * n + i], 0.0, s.u_minus);
    // Complementarity normalization: paying in both directions at one site
    // can only happen at zero marginal cost; cancel the overlap.
    const double overlap = std::min(p, q);
    p -= overlap;
    q -= overlap;
    plan.p_plus[i] = p;
    plan.q_minus[i] = q;
    plan.w_hat[i] = std::max(0.0, s.weight + p - q);
    cost += s.c_plus * p + s.c_minus * q;
  }
  plan.cost = cost;
  return plan;
}

}  // namespace invloc
