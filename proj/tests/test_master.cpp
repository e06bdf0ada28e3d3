#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "invloc/master.hpp"
#include "test_helpers.hpp"

using namespace invloc;

namespace {

Instance two_site_minimax(double w1, double u1_minus) {
  Instance inst;
  inst.norm = Norm::of(2.0);
  inst.objective = Objective::Minimax;
  inst.sites = {
      {{1, 0}, w1, u1_minus, 3.0, 2.0, 2.0},
      {{-1, 0}, 1.0, 1.0, 3.0, 1.0, 1.0},
  };
  return inst;
}

}  // namespace

TEST_SUITE_BEGIN("master");

TEST_CASE("CutPool assigns sequential row ids and remembers the points") {
  const Instance inst = fixtures::example1();
  CutPool pool({0, 0});
  pool.add(inst, {0, -1});
  pool.add(inst, {1, 0});
  REQUIRE(pool.size() == 2);
  CHECK(pool.rows[0].k == 0);
  CHECK(pool.rows[1].k == 1);
  CHECK(pool.generated_points[0].y == -1.0);
  CHECK(pool.generated_points[1].x == 1.0);
  const DistGapRow direct = gap_row(inst, {0, 0}, {1, 0});
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(pool.rows[1].delta[i] == direct.delta[i]);
  }
}

TEST_CASE("minisum master has the documented shape") {
  const Instance inst = fixtures::example1();
  CutPool pool({0, 0});
  pool.add(inst, {0, -1});
  const LpProblem lp = build_minisum_master(inst, pool);
  const std::size_t n = 4;
  REQUIRE(lp.num_vars == 3 * n);
  REQUIRE(lp.a_eq.size() == n);
  REQUIRE(lp.a_le.size() == 1);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(lp.b_eq[i] == inst.sites[i].weight);
    CHECK(lp.c[i] == 0.0);                                  // w_hat slot
    CHECK(lp.c[n + i] == inst.sites[i].c_plus);             // p slot
    CHECK(lp.c[2 * n + i] == inst.sites[i].c_minus);        // q slot
    CHECK(lp.upper[n + i] == inst.sites[i].u_plus);
    CHECK(lp.upper[2 * n + i] == inst.sites[i].u_minus);
    CHECK(lp.upper[i] == std::numeric_limits<double>::infinity());
    // cut touches only the w_hat slots
    CHECK(lp.a_le[0][n + i] == 0.0);
    CHECK(lp.a_le[0][2 * n + i] == 0.0);
    CHECK(lp.a_le[0][i] == pool.rows[0].delta[i]);
  }
  CHECK(lp.b_le[0] == 0.0);
}

TEST_CASE("empty pool solves to the zero-cost identity plan") {
  const Instance inst = fixtures::example1();
  CutPool pool({0, 0});
  const auto plan = solve_master(inst, pool);
  REQUIRE(plan.has_value());
  CHECK(plan->cost == doctest::Approx(0.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(plan->w_hat[i] ==
          doctest::Approx(inst.sites[i].weight).epsilon(1e-10));
  }
  CHECK(fixtures::plan_problems(inst, *plan).empty());
}

TEST_CASE("first cut of the four-site example reproduces the known master") {
  const Instance inst = fixtures::example1();
  CutPool pool({0, 0});
  pool.add(inst, {0, -1});
  const auto plan = solve_master(inst, pool);
  REQUIRE(plan.has_value());
  // cheapest fill against the single cut: site 3 to its cap, then site 1,
  // the remainder from expensive site 2
  CHECK(plan->w_hat[0] == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(plan->w_hat[1] ==
        doctest::Approx(0.8979021355163717).epsilon(1e-9));
  CHECK(plan->w_hat[2] == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(plan->w_hat[3] ==
        doctest::Approx(10.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(plan->cost == doctest::Approx(18.356382760480077).epsilon(1e-9));
  CHECK(fixtures::plan_problems(inst, *plan).empty());
  // the plan satisfies the cut it was built against
  double lhs = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    lhs += pool.rows[0].delta[i] * plan->w_hat[i];
  }
  CHECK(lhs <= 1e-9);
}

TEST_CASE("plans satisfy every pooled cut, not just the last") {
  const Instance inst = fixtures::example1();
  CutPool pool({0, 0});
  pool.add(inst, {0, -1});
  pool.add(inst, {0.5, 0.5});
  pool.add(inst, {-0.25, 0.75});
  const auto plan = solve_master(inst, pool);
  REQUIRE(plan.has_value());
  for (const DistGapRow& row : pool.rows) {
    double lhs = 0.0;
    for (std::size_t i = 0; i < 4; ++i) lhs += row.delta[i] * plan->w_hat[i];
    CHECK(lhs <= 1e-9);
  }
  CHECK(fixtures::plan_problems(inst, *plan).empty());
}

TEST_CASE("free modification is normalized away") {
  // zero-cost reductions could return p and q both positive; the plan
  // must come back with the overlap canceled
  Instance inst;
  inst.norm = Norm::of(2.0);
  inst.objective = Objective::Minisum;
  inst.sites = {{{1, 0}, 1.0, 1.0, 4.0, 0.0, 0.0},
                {{-1, 0}, 1.0, 0.0, 4.0, 0.5, 0.5}};
  CutPool pool({-1, 0});
  pool.add(inst, {1, 0});  // delta = (2, -2): forces weight off site 1
  const auto plan = solve_master(inst, pool);
  REQUIRE(plan.has_value());
  CHECK(std::min(plan->p_plus[0], plan->q_minus[0]) <= 1e-9);
  CHECK(std::min(plan->p_plus[1], plan->q_minus[1]) <= 1e-9);
  CHECK(fixtures::plan_problems(inst, *plan).empty());
}

TEST_CASE("master infeasibility surfaces as nullopt") {
  Instance inst = fixtures::example1();
  for (ClientSite& s : inst.sites) s.u_plus = 0.0;
  CutPool pool({0, 0});
  pool.add(inst, {0, -1});
  CHECK_FALSE(solve_master(inst, pool).has_value());
}

TEST_CASE("minimax decomposition forces positive-gap sites to zero") {
  // x_bar = origin, cut point at site 1: site 1 gets farther (delta +1),
  // site 2 gets closer (delta -1); only site 1 is forced
  Instance inst = two_site_minimax(2.0, 2.0);
  CutPool pool({0, 0});
  pool.add(inst, {1, 0});
  const LpProblem lp = build_minimax_master(inst, pool);
  REQUIRE(lp.a_le.size() == 1);
  CHECK(lp.a_le[0][0] == 1.0);
  CHECK(lp.a_le[0][1] == 0.0);
  CHECK(lp.b_le[0] == 0.0);

  const auto plan = solve_master(inst, pool);
  REQUIRE(plan.has_value());
  CHECK(plan->w_hat[0] <= 1e-9);
  CHECK(plan->q_minus[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(plan->cost == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(fixtures::plan_problems(inst, *plan).empty());
}

TEST_CASE("minimax infeasible exactly when a forced site cannot reach zero") {
  Instance inst = two_site_minimax(2.0, 1.0);  // u_minus < w on the forced site
  CutPool pool({0, 0});
  pool.add(inst, {1, 0});
  CHECK_FALSE(solve_master(inst, pool).has_value());
}

TEST_CASE("duplicate forced indices collapse to one row") {
  Instance inst = two_site_minimax(2.0, 2.0);
  CutPool pool({0, 0});
  pool.add(inst, {1, 0});
  pool.add(inst, {0.9, 0.1});  // site 1 still the far side: forced again
  const LpProblem lp = build_minimax_master(inst, pool);
  CHECK(lp.a_le.size() == 1);
}

TEST_CASE("random minimax masters honor the forcing contract") {
  std::uint64_t state = 53;
  for (int rep = 0; rep < 10; ++rep) {
    Instance inst =
        fixtures::random_instance(state, 4, 2.0, Objective::Minimax);
    // shrink some reduction headroom so infeasible cases occur
    const auto [toggle, next] = next_uniform(state);
    state = next;
    if (toggle < 0.5) inst.sites[0].u_minus = 0.0;
    const Point x_bar{5, 5};
    CutPool pool(x_bar);
    pool.add(inst, inst.sites[1].location);
    pool.add(inst, inst.sites[2].location);

    bool any_stuck = false;
    std::vector<bool> forced(inst.size(), false);
    for (const DistGapRow& row : pool.rows) {
      for (std::size_t i = 0; i < inst.size(); ++i) {
        if (row.delta[i] > 1e-9) forced[i] = true;
      }
    }
    for (std::size_t i = 0; i < inst.size(); ++i) {
      if (forced[i] && inst.sites[i].weight - inst.sites[i].u_minus > 0.0) {
        any_stuck = true;
      }
    }
    const auto plan = solve_master(inst, pool);
    CHECK(plan.has_value() == !any_stuck);
    if (plan) {
      for (std::size_t i = 0; i < inst.size(); ++i) {
        if (forced[i]) CHECK(plan->w_hat[i] <= 1e-9);
      }
      CHECK(fixtures::plan_problems(inst, *plan).empty());
    }
  }
}

TEST_SUITE_END();
