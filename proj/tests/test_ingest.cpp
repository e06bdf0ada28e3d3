#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>

#include "invloc/ingest.hpp"
#include "test_helpers.hpp"

using namespace invloc;

TEST_SUITE_BEGIN("ingest");

TEST_CASE("write/parse round-trips every field bit-identically") {
  const Instance inst = fixtures::example1();
  const Instance back = parse_instance(write_instance(inst));
  REQUIRE(back.size() == inst.size());
  CHECK(back.objective == inst.objective);
  CHECK(back.norm.p == inst.norm.p);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    CHECK(back.sites[i].location.x == inst.sites[i].location.x);
    CHECK(back.sites[i].location.y == inst.sites[i].location.y);
    CHECK(back.sites[i].weight == inst.sites[i].weight);
    CHECK(back.sites[i].u_minus == inst.sites[i].u_minus);
    CHECK(back.sites[i].u_plus == inst.sites[i].u_plus);
    CHECK(back.sites[i].c_minus == inst.sites[i].c_minus);
    CHECK(back.sites[i].c_plus == inst.sites[i].c_plus);
  }
}

TEST_CASE("the shipped four-site file equals the in-code fixture") {
  const Instance file =
      fixtures::load_instance_file(fixtures::data_path(INVLOC_DATA_DIR,
                                                       "example1.loc"));
  const Instance inst = fixtures::example1();
  REQUIRE(file.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(file.sites[i].location.x == inst.sites[i].location.x);
    CHECK(file.sites[i].location.y == inst.sites[i].location.y);
    CHECK(file.sites[i].weight == inst.sites[i].weight);
    CHECK(file.sites[i].c_minus == inst.sites[i].c_minus);
    CHECK(file.sites[i].c_plus == inst.sites[i].c_plus);
  }
}

TEST_CASE("comments, blank lines and CRLF are tolerated") {
  const std::string text =
      "# leading comment\r\n"
      "INVLOC 1\r\n"
      "\r\n"
      "minisum 1 2  # trailing comment\r\n"
      "0 0 1 0 0 0 0\r\n";
  const Instance inst = parse_instance(text);
  CHECK(inst.size() == 1);
  CHECK(inst.norm.p == 2.0);
}

TEST_CASE("Chebyshev p round-trips as inf") {
  Instance inst = fixtures::unit_square();
  inst.norm = Norm::of(std::numeric_limits<double>::infinity());
  const std::string text = write_instance(inst);
  CHECK(text.find("inf") != std::string::npos);
  const Instance back = parse_instance(text);
  CHECK(back.norm.chebyshev());
}

TEST_CASE("malformed input reports line and column") {
  auto expect_error = [](const std::string& text, int line,
                         const char* fragment) {
    try {
      parse_instance(text);
      FAIL_CHECK("expected ParseError for: " << fragment);
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };
  expect_error("", 1, "empty input");
  expect_error("NOTLOC 1\nminisum 1 2\n0 0 1 0 0 0 0\n", 1, "INVLOC");
  expect_error("INVLOC 9\nminisum 1 2\n0 0 1 0 0 0 0\n", 1, "version");
  expect_error("INVLOC 1\nminimin 1 2\n0 0 1 0 0 0 0\n", 2, "objective");
  expect_error("INVLOC 1\nminisum 1 0.5\n0 0 1 0 0 0 0\n", 2, "p must be");
  expect_error("INVLOC 1\nminisum x 2\n0 0 1 0 0 0 0\n", 2, "site count");
  expect_error("INVLOC 1\nminisum 2 2\n0 0 1 0 0 0 0\n", 4, "mismatch");
  expect_error("INVLOC 1\nminisum 1 2\n0 0 1 0 0 0 0\n1 1 1 0 0 0 0\n", 4,
               "trailing");
  expect_error("INVLOC 1\nminisum 1 2\n0 0 1 0 0\n", 3, "expected 7 fields");
  expect_error("INVLOC 1\nminisum 1 2\n0 zz 1 0 0 0 0\n", 3, "bad number");
  expect_error("INVLOC 1\nminisum 1 2\n0 0 -1 0 0 0 0\n", 3, "weight");
}

TEST_CASE("column numbers point at the offending token") {
  try {
    parse_instance("INVLOC 1\nminisum 1 2\n0 0 1 0 oops 0 0\n");
    FAIL_CHECK("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 9);
  }
}

TEST_CASE("to_shortest is the shortest exact decimal form") {
  CHECK(to_shortest(1.0) == "1");
  CHECK(to_shortest(0.1) == "0.1");
  CHECK(to_shortest(-2.5) == "-2.5");
  CHECK(to_shortest(10.0 / std::sqrt(2.0)) == "7.071067811865475");
  CHECK(to_shortest(std::sqrt(2.0)) == "1.4142135623730951");

  std::uint64_t state = 5;
  for (int rep = 0; rep < 200; ++rep) {
    const auto [u, next] = next_uniform(state);
    state = next;
    const double v = (u - 0.5) * 2e6;
    const std::string s = to_shortest(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("plan files round-trip") {
  ModificationPlan plan;
  plan.w_hat = {0.0, 5.0, 5.0, 10.0 / std::sqrt(2.0)};
  plan.p_plus = {0.0, 5.0, 5.0, 0.0};
  plan.q_minus = {0.0, 0.0, 0.0, 0.0};
  plan.cost = 40.0;
  std::ostringstream out;
  write_plan(plan, out);
  std::istringstream in(out.str());
  const ModificationPlan back = parse_plan(in);
  CHECK(back.cost == plan.cost);
  REQUIRE(back.w_hat.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.w_hat[i] == plan.w_hat[i]);
    CHECK(back.p_plus[i] == plan.p_plus[i]);
    CHECK(back.q_minus[i] == plan.q_minus[i]);
  }
}

TEST_CASE("plan parse errors carry diagnostics") {
  auto expect_error = [](const std::string& text, const char* fragment) {
    std::istringstream in(text);
    try {
      parse_plan(in);
      FAIL_CHECK("expected ParseError for: " << fragment);
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };
  expect_error("", "empty input");
  expect_error("INVLOC 1 2 0\n1 0 0\n2 0 0\n", "INVLOC-PLAN");
  expect_error("INVLOC-PLAN 2 1 0\n1 0 0\n", "version");
  expect_error("INVLOC-PLAN 1 2 0\n1 0 0\n", "mismatch");
  expect_error("INVLOC-PLAN 1 1 0\n1 0\n", "expected 3 fields");
}

TEST_CASE("trace CSV has the pinned header and row shape") {
  RunTrace trace;
  trace.records.push_back({0, {0.0, -1.0}, {0, 0, 0, 7}, 0.0, 0.0, false});
  trace.records.push_back({1, {0.5, 0.25}, {1, 0, 0, 7}, 18.5, 2.0, false});
  const std::string csv = write_trace_csv(trace);
  CHECK(csv ==
        "k,x,y,cost,delta_w\n"
        "0,0,-1,0,0\n"
        "1,0.5,0.25,18.5,2\n");
}

TEST_CASE("generator stream is SplitMix64 with golden first draws") {
  {
    const auto [v, s] = next_uniform(0);
    CHECK(v == 0.8833108082136426);
    const auto [v2, s2] = next_uniform(s);
    CHECK(v2 == 0.43152799704850997);
    const auto [v3, s3] = next_uniform(s2);
    CHECK(v3 == 0.026433771592597743);
    (void)s3;
  }
  {
    const auto [v, s] = next_uniform(1);
    CHECK(v == 0.5665615751722809);
    (void)s;
  }
  {
    const auto [v, s] = next_uniform(42);
    CHECK(v == 0.7415648787718233);
    (void)s;
  }
}

TEST_CASE("uniform draws stay in [0,1) and advance the state") {
  std::uint64_t state = 1234;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto [v, next] = next_uniform(state);
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    CHECK(next != state);
    state = next;
  }
}

TEST_CASE("coordinate ingestion draws fields in the documented order") {
  const std::string coords = "0 0\n4 1\n";
  GeneratorConfig cfg;
  cfg.seed = 7;
  const Instance inst =
      ingest_coordinates(coords, cfg, Norm::of(2.0), Objective::Minisum);
  REQUIRE(inst.size() == 2);
  CHECK(inst.sites[1].location.x == 4.0);

  // replicate the stream: w, u_minus, u_plus, c_minus, c_plus per site
  std::uint64_t state = 7;
  auto draw = [&state] {
    const auto [u, next] = next_uniform(state);
    state = next;
    return 1.0 + u * 9.0;
  };
  for (std::size_t i = 0; i < 2; ++i) {
    const double w = draw();
    const double u_minus = std::min(draw(), w);
    const double u_plus = draw();
    const double c_minus = draw();
    const double c_plus = draw();
    CHECK(inst.sites[i].weight == w);
    CHECK(inst.sites[i].u_minus == u_minus);
    CHECK(inst.sites[i].u_plus == u_plus);
    CHECK(inst.sites[i].c_minus == c_minus);
    CHECK(inst.sites[i].c_plus == c_plus);
    CHECK(inst.sites[i].u_minus <= inst.sites[i].weight);
  }
}

TEST_CASE("coordinate ingestion is deterministic and seed-sensitive") {
  const std::string coords = "0 0\n1 5\n2 3\n";
  GeneratorConfig cfg;
  cfg.seed = 1;
  const Instance a =
      ingest_coordinates(coords, cfg, Norm::of(2.0), Objective::Minisum);
  const Instance b =
      ingest_coordinates(coords, cfg, Norm::of(2.0), Objective::Minisum);
  CHECK(write_instance(a) == write_instance(b));
  cfg.seed = 2;
  const Instance c =
      ingest_coordinates(coords, cfg, Norm::of(2.0), Objective::Minisum);
  CHECK(write_instance(a) != write_instance(c));
}

TEST_CASE("index-prefixed coordinate rows are accepted") {
  GeneratorConfig cfg;
  cfg.seed = 3;
  const Instance plain =
      ingest_coordinates("0 1\n2 3\n", cfg, Norm::of(2.0), Objective::Minisum);
  const Instance prefixed = ingest_coordinates("1 0 1\n2 2 3\n", cfg,
                                               Norm::of(2.0),
                                               Objective::Minisum);
  CHECK(write_instance(plain) == write_instance(prefixed));
}

TEST_CASE("coordinate ingestion rejects garbage") {
  GeneratorConfig cfg;
  CHECK_THROWS_AS(
      ingest_coordinates("", cfg, Norm::of(2.0), Objective::Minisum),
      ParseError);
  CHECK_THROWS_AS(
      ingest_coordinates("1 2 3 4\n", cfg, Norm::of(2.0), Objective::Minisum),
      ParseError);
  CHECK_THROWS_AS(
      ingest_coordinates("1 bad\n", cfg, Norm::of(2.0), Objective::Minisum),
      ParseError);
}

TEST_CASE("the Ruspini coordinate file ingests into the documented box") {
  const std::string body =
      fixtures::slurp(fixtures::data_path(INVLOC_DATA_DIR, "ruspini75.xy"));
  GeneratorConfig cfg;
  cfg.seed = 1;
  const Instance inst =
      ingest_coordinates(body, cfg, Norm::of(2.0), Objective::Minisum);
  REQUIRE(inst.size() == 75);
  double lo_x = 1e9, lo_y = 1e9, hi_x = -1e9, hi_y = -1e9;
  for (const ClientSite& s : inst.sites) {
    lo_x = std::min(lo_x, s.location.x);
    lo_y = std::min(lo_y, s.location.y);
    hi_x = std::max(hi_x, s.location.x);
    hi_y = std::max(hi_y, s.location.y);
    CHECK(s.weight >= 1.0);
    CHECK(s.weight < 10.0);
    CHECK(s.u_plus >= 1.0);
    CHECK(s.u_plus < 10.0);
    CHECK(s.c_minus >= 1.0);
    CHECK(s.c_plus >= 1.0);
    CHECK(s.u_minus <= s.weight);
  }
  CHECK(lo_x == 5.0);
  CHECK(lo_y == 5.0);
  CHECK(hi_x == 110.0);
  CHECK(hi_y == 110.0);
}

TEST_SUITE_END();
