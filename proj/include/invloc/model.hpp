#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace invloc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Which facility objective an instance minimizes over locations x:
//   Minisum: sum_i w_i * d(x, A_i)      (weighted median)
//   Minimax: max_i w_i * d(x, A_i)      (weighted center)
enum class Objective { Minisum, Minimax };

// An l_p norm on the plane, p >= 1. p may be +infinity (Chebyshev).
struct Norm {
  double p = 2.0;

  // Validating factory; the canonical way to build a Norm. Throws
  // std::invalid_argument for p < 1 or NaN. Aggregate construction stays
  // possible so that not-yet-validated instances can be represented and
  // reported on by validate_instance.
  static Norm of(double p);

  bool chebyshev() const { return std::isinf(p); }
};

struct ClientSite {
  Point location;
  double weight = 0.0;   // w_i, must be >= 0
  double u_minus = 0.0;  // max allowed weight reduction
  double u_plus = 0.0;   // max allowed weight augmentation
  double c_minus = 0.0;  // cost per unit reduction
  double c_plus = 0.0;   // cost per unit augmentation
};

struct Instance {
  std::vector<ClientSite> sites;
  Norm norm{2.0};
  Objective objective = Objective::Minisum;

  std::size_t size() const { return sites.size(); }
  std::vector<double> weights() const;
};

// A weight modification: w_hat_i = w_i + p_plus_i - q_minus_i, with
// cost = sum_i (c_plus_i * p_plus_i + c_minus_i * q_minus_i).
// Plans returned by the solver are complementarity-normalized:
// min(p_plus_i, q_minus_i) = 0 for every i.
struct ModificationPlan {
  std::vector<double> w_hat;
  std::vector<double> p_plus;
  std::vector<double> q_minus;
  double cost = 0.0;
};

// One outer iteration of the row-generation loop. k = 0 is the initial
// forward solve under the original weights (cost_k = 0, delta_w = 0);
// for k >= 1, w_k is the k-th master optimum, x_k the forward optimum
// under w_k, cost_k the master objective, and delta_w = ||w_k - w_{k-1}||_2.
struct IterationRecord {
  int k = 0;
  Point x_k;
  std::vector<double> w_k;
  double cost_k = 0.0;
  double delta_w = 0.0;
  bool stalled = false;  // x_k duplicated an earlier cut point
};

enum class Outcome { Converged, Infeasible, IterationLimit };

// Which stopping certificate ended a Converged run.
enum class StopRule { None, WeightChange, ObjectiveGap, PointHit };

struct RunTrace {
  std::vector<IterationRecord> records;
  Outcome outcome = Outcome::IterationLimit;
  std::optional<ModificationPlan> final_plan;
  StopRule stop_rule = StopRule::None;
};

// Full validation of a (possibly unvalidated) instance. Returns one message
// per violation, naming the offending site (1-based) and field. Never throws.
std::vector<std::string> validate_instance(const Instance& inst);

// ||a - b||_2 over equally sized spans; the delta_w metric of the trace.
double weight_change(std::span<const double> a, std::span<const double> b);

}  // namespace invloc
