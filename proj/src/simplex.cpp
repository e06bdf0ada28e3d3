#include "invloc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace invloc {

namespace {

constexpr double kFeasTol = 1e-8;
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarStatus : char { AtLower, AtUpper, Basic };

// Dense tableau simplex over bounded variables. Columns are the structural
// variables, then one slack per <= row, then the artificials introduced for
// the phase-1 start. The current tableau T = B^{-1} A is maintained by pivot
// elimination and periodically rebuilt from a fresh LU of the basis to keep
// the accumulated rounding error down.
class Simplex {
 public:
  explicit Simplex(const LpProblem& prob) : prob_(prob) { build(); }

  LpSolution run() {
    LpSolution sol;
    if (phase1_needed_) {
      load_costs(phase1_cost_);
      const PhaseEnd end = iterate();
      if (end == PhaseEnd::IterationCap)
        throw std::logic_error("simplex: phase-1 iteration cap exceeded");
      if (current_objective() > kFeasTol * b_scale_) {
        sol.status = LpStatus::Infeasible;
        return sol;
      }
      // Artificials are pinned at zero for phase 2 but keep their columns:
      // a basic artificial stuck at zero is harmless, and the fixed bounds
      // keep all of them out of the pricing loop.
      for (int j = n_struct_slack_; j < n_; ++j) hi_[j] = 0.0;
    }
    load_costs(phase2_cost_);
    const PhaseEnd end = iterate();
    if (end == PhaseEnd::IterationCap)
      throw std::logic_error("simplex: phase-2 iteration cap exceeded");
    if (end == PhaseEnd::Unbounded) {
      sol.status = LpStatus::Unbounded;
      return sol;
    }
    return extract();
  }

 private:
  enum class PhaseEnd { Optimal, Unbounded, IterationCap };

  const LpProblem& prob_;

  int m_ = 0;               // rows: equalities first, then <= rows
  int m_eq_ = 0;
  int n_ = 0;               // total columns
  int n_struct_ = 0;
  int n_struct_slack_ = 0;  // structural + slack count (artificials follow)
  bool phase1_needed_ = false;
  double b_scale_ = 1.0;

  std::vector<double> a_;   // m x n original matrix, row-major
  std::vector<double> b_;
  std::vector<double> lo_, hi_;
  std::vector<double> phase1_cost_, phase2_cost_;
  std::vector<double> cost_;  // active phase costs

  std::vector<double> t_;     // m x n current tableau
  std::vector<double> beta_;  // basic variable values by row
  std::vector<double> d_;     // reduced costs
  std::vector<int> basis_;
  std::vector<VarStatus> stat_;

  double* row(int r) { return &t_[static_cast<std::size_t>(r) * n_]; }
  double* arow(int r) { return &a_[static_cast<std::size_t>(r) * n_]; }

  void build() {
    const std::size_t nv = prob_.num_vars;
    if (prob_.c.size() != nv || prob_.lower.size() != nv ||
        prob_.upper.size() != nv)
      throw std::invalid_argument("solve_lp: objective/bounds size mismatch");
    if (prob_.a_eq.size() != prob_.b_eq.size() ||
        prob_.a_le.size() != prob_.b_le.size())
      throw std::invalid_argument("solve_lp: row/rhs count mismatch");
    for (const auto& r : prob_.a_eq)
      if (r.size() != nv)
        throw std::invalid_argument("solve_lp: a_eq row width mismatch");
    for (const auto& r : prob_.a_le)
      if (r.size() != nv)
        throw std::invalid_argument("solve_lp: a_le row width mismatch");
    for (std::size_t j = 0; j < nv; ++j) {
      if (!std::isfinite(prob_.lower[j]))
        throw std::invalid_argument("solve_lp: lower bounds must be finite");
      if (std::isnan(prob_.upper[j]) || prob_.upper[j] < prob_.lower[j])
        throw std::invalid_argument("solve_lp: requires lower <= upper");
    }

    m_eq_ = static_cast<int>(prob_.a_eq.size());
    const int m_le = static_cast<int>(prob_.a_le.size());
    m_ = m_eq_ + m_le;
    n_struct_ = static_cast<int>(nv);
    n_struct_slack_ = n_struct_ + m_le;

    // Start every structural variable at its lower bound, slacks at 0, and
    // compute per-row residuals to decide which rows need an artificial.
    std::vector<double> resid(m_, 0.0);
    b_.resize(m_);
    for (int r = 0; r < m_; ++r) {
      const std::vector<double>& src =
          r < m_eq_ ? prob_.a_eq[r] : prob_.a_le[r - m_eq_];
      double dot = 0.0;
      for (int j = 0; j < n_struct_; ++j) dot += src[j] * prob_.lower[j];
      b_[r] = r < m_eq_ ? prob_.b_eq[r] : prob_.b_le[r - m_eq_];
      resid[r] = b_[r] - dot;
    }
    b_scale_ = 1.0;
    for (int r = 0; r < m_; ++r) b_scale_ = std::max(b_scale_, std::abs(b_[r]));

    std::vector<int> art_row;  // rows that get an artificial column
    for (int r = 0; r < m_; ++r) {
      const bool le = r >= m_eq_;
      if (le && resid[r] >= 0.0) continue;  // slack can carry the residual
      art_row.push_back(r);
    }
    phase1_needed_ = !art_row.empty();

    n_ = n_struct_slack_ + static_cast<int>(art_row.size());
    a_.assign(static_cast<std::size_t>(m_) * n_, 0.0);
    lo_.assign(n_, 0.0);
    hi_.assign(n_, kInf);
    for (int j = 0; j < n_struct_; ++j) {
      lo_[j] = prob_.lower[j];
      hi_[j] = prob_.upper[j];
    }
    for (int r = 0; r < m_; ++r) {
      const std::vector<double>& src =
          r < m_eq_ ? prob_.a_eq[r] : prob_.a_le[r - m_eq_];
      double* dst = arow(r);
      for (int j = 0; j < n_struct_; ++j) dst[j] = src[j];
      if (r >= m_eq_) dst[n_struct_ + (r - m_eq_)] = 1.0;  // slack
    }
    for (std::size_t k = 0; k < art_row.size(); ++k) {
      const int r = art_row[k];
      const int j = n_struct_slack_ + static_cast<int>(k);
      arow(r)[j] = resid[r] >= 0.0 ? 1.0 : -1.0;
    }

    phase1_cost_.assign(n_, 0.0);
    for (int j = n_struct_slack_; j < n_; ++j) phase1_cost_[j] = 1.0;
    phase2_cost_.assign(n_, 0.0);
    for (int j = 0; j < n_struct_; ++j) phase2_cost_[j] = prob_.c[j];

    // Initial basis: slack for residual-feasible <= rows, artificial
    // elsewhere. All other variables sit at their lower bound.
    stat_.assign(n_, VarStatus::AtLower);
    basis_.assign(m_, -1);
    beta_.assign(m_, 0.0);
    {
      std::size_t next_art = 0;
      for (int r = 0; r < m_; ++r) {
        if (r >= m_eq_ && resid[r] >= 0.0) {
          basis_[r] = n_struct_ + (r - m_eq_);
        } else {
          basis_[r] = n_struct_slack_ + static_cast<int>(next_art++);
        }
        beta_[r] = std::abs(resid[r]);
        if (r >= m_eq_ && resid[r] >= 0.0) beta_[r] = resid[r];
        stat_[basis_[r]] = VarStatus::Basic;
      }
    }
    t_ = a_;
    // The initial basis matrix is +-identity up to the artificial signs;
    // normalize rows whose artificial entered with coefficient -1.
    for (int r = 0; r < m_; ++r) {
      if (arow(r)[basis_[r]] < 0.0) {
        double* tr = row(r);
        for (int j = 0; j < n_; ++j) tr[j] = -tr[j];
      }
    }
    d_.assign(n_, 0.0);
  }

  void load_costs(const std::vector<double>& c) {
    cost_ = c;
    recompute_reduced_costs();
  }

  void recompute_reduced_costs() {
    for (int j = 0; j < n_; ++j) d_[j] = cost_[j];
    for (int r = 0; r < m_; ++r) {
      const double cb = cost_[basis_[r]];
      if (cb == 0.0) continue;
      const double* tr = row(r);
      for (int j = 0; j < n_; ++j) d_[j] -= cb * tr[j];
    }
    for (int r = 0; r < m_; ++r) d_[basis_[r]] = 0.0;
  }

  double var_value(int j) const {
    switch (stat_[j]) {
      case VarStatus::AtLower:
        return lo_[j];
      case VarStatus::AtUpper:
        return hi_[j];
      default:
        break;
    }
    for (int r = 0; r < m_; ++r)
      if (basis_[r] == j) return beta_[r];
    return lo_[j];
  }

  double current_objective() const {
    double obj = 0.0;
    for (int r = 0; r < m_; ++r) obj += cost_[basis_[r]] * beta_[r];
    for (int j = 0; j < n_; ++j) {
      if (stat_[j] == VarStatus::Basic || cost_[j] == 0.0) continue;
      obj += cost_[j] * (stat_[j] == VarStatus::AtLower ? lo_[j] : hi_[j]);
    }
    return obj;
  }

  // Rebuilds tableau, basic values and reduced costs from an LU of the
  // current basis, discarding accumulated pivot roundoff.
  void refactorize() {
    const int m = m_;
    std::vector<double> lu(static_cast<std::size_t>(m) * m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        lu[static_cast<std::size_t>(r) * m + c] = arow(r)[basis_[c]];
    std::vector<int> perm(m);
    for (int i = 0; i < m; ++i) perm[i] = i;
    for (int col = 0; col < m; ++col) {
      int piv = col;
      double best = std::abs(lu[static_cast<std::size_t>(col) * m + col]);
      for (int r = col + 1; r < m; ++r) {
        const double v = std::abs(lu[static_cast<std::size_t>(r) * m + col]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best < 1e-13)
        throw std::logic_error("simplex: singular basis during refactorize");
      if (piv != col) {
        for (int c = 0; c < m; ++c)
          std::swap(lu[static_cast<std::size_t>(piv) * m + c],
                    lu[static_cast<std::size_t>(col) * m + c]);
        std::swap(perm[piv], perm[col]);
      }
      const double diag = lu[static_cast<std::size_t>(col) * m + col];
      for (int r = col + 1; r < m; ++r) {
        const double f = lu[static_cast<std::size_t>(r) * m + col] / diag;
        lu[static_cast<std::size_t>(r) * m + col] = f;
        if (f == 0.0) continue;
        for (int c = col + 1; c < m; ++c)
          lu[static_cast<std::size_t>(r) * m + c] -=
              f * lu[static_cast<std::size_t>(col) * m + c];
      }
    }
    auto solve_inplace = [&](std::vector<double>& x) {
      std::vector<double> y(m);
      for (int i = 0; i < m; ++i) y[i] = x[perm[i]];
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < i; ++k)
          y[i] -= lu[static_cast<std::size_t>(i) * m + k] * y[k];
      for (int i = m - 1; i >= 0; --i) {
        for (int k = i + 1; k < m; ++k)
          y[i] -= lu[static_cast<std::size_t>(i) * m + k] * y[k];
        y[i] /= lu[static_cast<std::size_t>(i) * m + i];
      }
      x = y;
    };

    std::vector<double> colbuf(m);
    for (int j = 0; j < n_; ++j) {
      for (int r = 0; r < m; ++r) colbuf[r] = arow(r)[j];
      solve_inplace(colbuf);
      for (int r = 0; r < m; ++r) row(r)[j] = colbuf[r];
    }
    for (int r = 0; r < m; ++r) {
      colbuf[r] = b_[r];
      for (int j = 0; j < n_; ++j) {
        if (stat_[j] == VarStatus::Basic) continue;
        const double v = stat_[j] == VarStatus::AtLower ? lo_[j] : hi_[j];
        if (v != 0.0) colbuf[r] -= arow(r)[j] * v;
      }
    }
    solve_inplace(colbuf);
    beta_ = colbuf;
    recompute_reduced_costs();
  }

  PhaseEnd iterate() {
    const int iter_cap = 50000 + 200 * (m_ + n_);
    const int bland_trigger = 3 * (m_ + n_);
    int no_improve = 0;
    bool bland = false;
    double best_obj = current_objective();
    int since_refactor = 0;

    for (int it = 0; it < iter_cap; ++it) {
      if (++since_refactor >= 64) {
        refactorize();
        since_refactor = 0;
      }

      // Pricing.
      int e = -1;
      double best_score = 0.0;
      for (int j = 0; j < n_; ++j) {
        if (stat_[j] == VarStatus::Basic || lo_[j] == hi_[j]) continue;
        const double dj = d_[j];
        double score = 0.0;
        if (stat_[j] == VarStatus::AtLower && dj < -kCostTol)
          score = -dj;
        else if (stat_[j] == VarStatus::AtUpper && dj > kCostTol)
          score = dj;
        else
          continue;
        if (bland) {
          e = j;
          break;
        }
        if (score > best_score) {
          best_score = score;
          e = j;
        }
      }
      if (e < 0) return PhaseEnd::Optimal;

      const double dir = stat_[e] == VarStatus::AtLower ? 1.0 : -1.0;

      // Ratio test: the entering variable moves by tau >= 0 off its bound.
      double tau = hi_[e] - lo_[e];  // bound-flip limit, may be +inf
      int leave = -1;
      bool leave_to_upper = false;
      double leave_alpha = 0.0;
      for (int r = 0; r < m_; ++r) {
        const double alpha = row(r)[e];
        if (std::abs(alpha) <= kPivotTol) continue;
        const int bj = basis_[r];
        double lim;
        bool to_upper;
        if (dir * alpha > 0.0) {  // basic value decreases toward its lower
          lim = (beta_[r] - lo_[bj]) / (dir * alpha);
          to_upper = false;
        } else {  // basic value increases toward its upper
          if (hi_[bj] == kInf) continue;
          lim = (hi_[bj] - beta_[r]) / (-dir * alpha);
          to_upper = true;
        }
        if (lim < 0.0) lim = 0.0;  // tolerate slight bound drift
        const bool strictly_better = lim < tau - 1e-12;
        const bool tie = !strictly_better && lim <= tau + 1e-12;
        bool take = strictly_better;
        if (!take && tie && leave >= 0) {
          take = bland ? basis_[r] < basis_[leave]
                       : std::abs(alpha) > std::abs(leave_alpha);
        } else if (!take && tie && leave < 0) {
          take = true;  // row limit ties the plain bound flip: pivot instead
        }
        if (take) {
          tau = std::min(tau, lim);
          leave = r;
          leave_to_upper = to_upper;
          leave_alpha = alpha;
        }
      }

      if (tau == kInf) return PhaseEnd::Unbounded;

      // Apply the step.
      for (int r = 0; r < m_; ++r) beta_[r] -= dir * tau * row(r)[e];
      if (leave < 0) {
        stat_[e] = stat_[e] == VarStatus::AtLower ? VarStatus::AtUpper
                                                  : VarStatus::AtLower;
      } else {
        const int lv = basis_[leave];
        stat_[lv] = leave_to_upper ? VarStatus::AtUpper : VarStatus::AtLower;
        basis_[leave] = e;
        stat_[e] = VarStatus::Basic;
        beta_[leave] = dir > 0.0 ? lo_[e] + tau : hi_[e] - tau;

        // Pivot elimination on row `leave`, column e.
        double* pr = row(leave);
        const double piv = pr[e];
        for (int j = 0; j < n_; ++j) pr[j] /= piv;
        pr[e] = 1.0;
        for (int r = 0; r < m_; ++r) {
          if (r == leave) continue;
          double* tr = row(r);
          const double f = tr[e];
          if (f == 0.0) continue;
          for (int j = 0; j < n_; ++j) tr[j] -= f * pr[j];
          tr[e] = 0.0;
        }
        const double fd = d_[e];
        if (fd != 0.0) {
          for (int j = 0; j < n_; ++j) d_[j] -= fd * pr[j];
        }
        d_[e] = 0.0;
      }

      const double obj = current_objective();
      if (obj < best_obj - 1e-12 * (1.0 + std::abs(best_obj))) {
        best_obj = obj;
        no_improve = 0;
        bland = false;
      } else if (++no_improve > bland_trigger) {
        bland = true;
      }
    }
    return PhaseEnd::IterationCap;
  }

  LpSolution extract() {
    // One clean rebuild before reading the answer off the tableau.
    refactorize();

    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.x.resize(n_struct_);
    for (int j = 0; j < n_struct_; ++j) {
      const double v = var_value(j);
      sol.x[j] = std::min(std::max(v, lo_[j]), hi_[j]);
    }
    double obj = 0.0;
    for (int j = 0; j < n_struct_; ++j) obj += prob_.c[j] * sol.x[j];
    sol.objective = obj;

    // Duals from y' B = c_B' via the same LU machinery: solve with the
    // transposed basis matrix.
    const int m = m_;
    if (m > 0) {
      std::vector<double> bt(static_cast<std::size_t>(m) * m);
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
          bt[static_cast<std::size_t>(r) * m + c] = arow(c)[basis_[r]];
      std::vector<double> y(m);
      for (int r = 0; r < m; ++r) y[r] = cost_[basis_[r]];
      gauss_solve(bt, y);
      sol.dual_eq.assign(y.begin(), y.begin() + m_eq_);
      sol.dual_le.assign(y.begin() + m_eq_, y.end());
    }
    return sol;
  }

  // Solves M x = rhs in place by Gaussian elimination with partial pivoting.
  static void gauss_solve(std::vector<double>& M, std::vector<double>& rhs) {
    const int m = static_cast<int>(rhs.size());
    for (int col = 0; col < m; ++col) {
      int piv = col;
      double best = std::abs(M[static_cast<std::size_t>(col) * m + col]);
      for (int r = col + 1; r < m; ++r) {
        const double v = std::abs(M[static_cast<std::size_t>(r) * m + col]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best < 1e-13)
        throw std::logic_error("simplex: singular basis in dual extraction");
      if (piv != col) {
        for (int c = 0; c < m; ++c)
          std::swap(M[static_cast<std::size_t>(piv) * m + c],
                    M[static_cast<std::size_t>(col) * m + c]);
        std::swap(rhs[piv], rhs[col]);
      }
      const double diag = M[static_cast<std::size_t>(col) * m + col];
      for (int r = col + 1; r < m; ++r) {
        const double f = M[static_cast<std::size_t>(r) * m + col] / diag;
        if (f == 0.0) continue;
        for (int c = col; c < m; ++c)
          M[static_cast<std::size_t>(r) * m + c] -=
              f * M[static_cast<std::size_t>(col) * m + c];
        rhs[r] -= f * rhs[col];
      }
    }
    for (int r = m - 1; r >= 0; --r) {
      for (int c = r + 1; c < m; ++c)
        rhs[r] -= M[static_cast<std::size_t>(r) * m + c] * rhs[c];
      rhs[r] /= M[static_cast<std::size_t>(r) * m + r];
    }
  }
};

}  // namespace

LpSolution solve_lp(const LpProblem& prob) {
  Simplex s(prob);
  return s.run();
}

}  // namespace invloc
