// invloc: forward/inverse planar facility location from the command line.
//
// Subcommands:
//   forward  <instance>                 solve min_x f(x, w, A), print x and f
//   inverse  <instance> --xbar X Y      cheapest weight change making x̄ optimal
//   gen      <coords>   --seed S        build an instance from raw coordinates
//   verify   <instance> <plan> --xbar   check a plan actually certifies x̄
//
// Exit codes: 0 ok, 2 bad input, 3 iteration limit, 4 infeasible, 5 verify fail.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "invloc/forward.hpp"
#include "invloc/ingest.hpp"
#include "invloc/model.hpp"
#include "invloc/rowgen.hpp"

namespace {

using namespace invloc;

// Human-facing numbers: 7 significant digits. Machine files keep the
// shortest round-trip rendering from to_shortest.
std::string fmt7(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.7g", v);
  return buf;
}

std::string fmt_point(const Point& p) {
  return "(" + fmt7(p.x) + ", " + fmt7(p.y) + ")";
}

struct Overrides {
  std::optional<std::string> objective;
  std::optional<double> p;
};

Instance load_instance(const std::string& path, const Overrides& ov) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  Instance inst = parse_instance(in);
  if (ov.objective) {
    inst.objective =
        *ov.objective == "minimax" ? Objective::Minimax : Objective::Minisum;
  }
  if (ov.p) inst.norm = Norm::of(*ov.p);
  return inst;
}

ForwardResult run_forward_solve(const Instance& inst,
                                const std::vector<double>& w, double tol,
                                int max_iter) {
  if (inst.objective == Objective::Minimax) {
    return solve_minimax(inst, w, tol, max_iter);
  }
  return solve_minisum(inst, w, tol, max_iter);
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Converged: return "converged";
    case Outcome::Infeasible: return "infeasible";
    case Outcome::IterationLimit: return "iteration limit";
  }
  return "?";
}

const char* stop_name(StopRule s) {
  switch (s) {
    case StopRule::None: return "none";
    case StopRule::WeightChange: return "weight change";
    case StopRule::ObjectiveGap: return "objective gap";
    case StopRule::PointHit: return "target point reached";
  }
  return "?";
}

int outcome_code(Outcome o) {
  switch (o) {
    case Outcome::Converged: return 0;
    case Outcome::IterationLimit: return 3;
    case Outcome::Infeasible: return 4;
  }
  return 2;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << body;
}

int cmd_forward(const std::string& path, const Overrides& ov, int max_iter,
                const std::string& out_path) {
  const Instance inst = load_instance(path, ov);
  const ForwardResult res =
      run_forward_solve(inst, inst.weights(), 1e-6, max_iter);
  std::cout << "x = " << fmt_point(res.x_star) << "\n";
  std::cout << "f = " << fmt7(res.objective_value) << "\n";
  std::cout << "iterations = " << res.iterations << "\n";
  if (!out_path.empty()) {
    nlohmann::json j;
    j["x"] = {res.x_star.x, res.x_star.y};
    j["f"] = res.objective_value;
    j["iterations"] = res.iterations;
    j["converged"] = res.converged;
    write_file(out_path, j.dump(2) + "\n");
  }
  return res.converged ? 0 : 3;
}

// One inverse run plus its file outputs; shared by the single and batch paths.
struct InverseOutputs {
  RunTrace trace;
  int code = 0;
};

InverseOutputs run_inverse_one(const Instance& inst, Point x_bar,
                               const InverseOptions& opt,
                               const std::string& trace_path,
                               const std::string& plan_path) {
  InverseOutputs out;
  out.trace = solve_inverse(inst, x_bar, opt);
  out.code = outcome_code(out.trace.outcome);
  if (!trace_path.empty()) write_file(trace_path, write_trace_csv(out.trace));
  if (!plan_path.empty() && out.trace.final_plan) {
    std::ostringstream body;
    write_plan(*out.trace.final_plan, body);
    write_file(plan_path, body.str());
  }
  return out;
}

void print_inverse_report(const RunTrace& trace) {
  std::cout << "outcome = " << outcome_name(trace.outcome);
  if (trace.outcome == Outcome::Converged) {
    std::cout << " (" << stop_name(trace.stop_rule) << " stop)";
  }
  std::cout << "\n";
  if (trace.records.empty()) return;
  const IterationRecord& last = trace.records.back();
  std::cout << "t = " << last.k << "\n";
  std::cout << "x_t = " << fmt_point(last.x_k) << "\n";
  if (trace.final_plan) {
    std::cout << "C* = " << fmt7(trace.final_plan->cost) << "\n";
  }
  std::cout << "delta_w = " << fmt7(last.delta_w) << "\n";
}

int cmd_inverse(const std::string& path, const Overrides& ov, Point x_bar,
                const InverseOptions& opt, const std::string& trace_path,
                const std::string& plan_path) {
  const Instance inst = load_instance(path, ov);
  const InverseOutputs out =
      run_inverse_one(inst, x_bar, opt, trace_path, plan_path);
  print_inverse_report(out.trace);
  return out.code;
}

// Batch mode: every *.loc in the directory, solved concurrently. Each run
// owns its slot in `rows` and writes only <stem>.plan / <stem>.trace.csv,
// so there is no shared mutable state beyond the work counter.
int cmd_inverse_batch(const std::string& dir, const Overrides& ov, Point x_bar,
                      const InverseOptions& opt) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".loc") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .loc files in '" + dir + "'");

  struct Row {
    std::string summary;
    int code = 0;
  };
  std::vector<Row> rows(files.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < files.size();
         i = next.fetch_add(1)) {
      const fs::path& file = files[i];
      const std::string stem = (file.parent_path() / file.stem()).string();
      try {
        const Instance inst = load_instance(file.string(), ov);
        const InverseOutputs out = run_inverse_one(
            inst, x_bar, opt, stem + ".trace.csv", stem + ".plan");
        std::ostringstream line;
        line << file.filename().string() << ": "
             << outcome_name(out.trace.outcome)
             << " t=" << out.trace.records.back().k;
        if (out.trace.final_plan) {
          line << " C*=" << fmt7(out.trace.final_plan->cost);
        }
        rows[i] = {line.str(), out.code};
      } catch (const std::exception& e) {
        rows[i] = {file.filename().string() + ": input error (" + e.what() +
                       ")",
                   2};
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min<std::size_t>(hw, files.size());
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  int code = 0;
  for (const Row& row : rows) {
    std::cout << row.summary << "\n";
    code = std::max(code, row.code);
  }
  return code;
}

int cmd_gen(const std::string& coords_path, const GeneratorConfig& cfg,
            double p, const std::string& objective,
            const std::string& out_path) {
  std::ifstream in(coords_path);
  if (!in) throw std::runtime_error("cannot open '" + coords_path + "'");
  const Instance inst = ingest_coordinates(
      in, cfg, Norm::of(p),
      objective == "minimax" ? Objective::Minimax : Objective::Minisum);
  if (out_path.empty()) {
    write_instance(inst, std::cout);
  } else {
    write_file(out_path, write_instance(inst));
  }
  return 0;
}

int cmd_verify(const std::string& inst_path, const std::string& plan_path,
               const Overrides& ov, Point x_bar, std::optional<double> tol) {
  const Instance inst = load_instance(inst_path, ov);
  std::ifstream in(plan_path);
  if (!in) throw std::runtime_error("cannot open '" + plan_path + "'");
  const ModificationPlan plan = parse_plan(in);
  if (plan.w_hat.size() != inst.size()) {
    throw std::runtime_error("plan has " + std::to_string(plan.w_hat.size()) +
                             " rows but instance has " +
                             std::to_string(inst.size()) + " sites");
  }
  // Default tolerance is relative: the gap's natural scale is the objective
  // at the goal point, and a converged plan's residual gap scales with it.
  const double f_bar = inst.objective == Objective::Minisum
                           ? eval_minisum(x_bar, plan.w_hat, inst)
                           : eval_minimax(x_bar, plan.w_hat, inst);
  const double use_tol = tol ? *tol : 1e-4 * std::max(1.0, f_bar);
  const VerifyReport rep = verify_plan(inst, x_bar, plan, use_tol);
  std::cout << "gap = " << fmt7(rep.gap) << "\n";
  std::cout << "x_fwd = " << fmt_point(rep.x_forward) << "\n";
  std::cout << "dist_to_xbar = " << fmt7(rep.dist_to_xbar) << "\n";
  std::cout << (rep.pass ? "pass" : "fail") << "\n";
  return rep.pass ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar facility location: forward and inverse solvers"};
  app.require_subcommand(1);

  Overrides ov;
  std::string inst_path, plan_path, coords_path, out_path, trace_path, batch;
  std::string objective = "minisum";
  std::vector<double> xbar;
  double p = 2.0;
  double eps = 0.01;
  double tol = 0.0;
  int max_iter = 10000;
  int max_outer = 200;
  std::uint64_t seed = 0;

  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("--objective", ov.objective, "minisum|minimax")
        ->check(CLI::IsMember({"minisum", "minimax"}));
    sub->add_option("--p", ov.p, "norm exponent override, >= 1 or inf");
  };

  CLI::App* fwd = app.add_subcommand("forward", "solve min_x f(x, w, A)");
  fwd->add_option("instance", inst_path, "instance file")->required();
  add_overrides(fwd);
  fwd->add_option("--max-iter", max_iter, "forward iteration cap");
  fwd->add_option("--out", out_path, "machine-readable result (JSON)");

  CLI::App* inv = app.add_subcommand(
      "inverse", "cheapest weight modification making --xbar optimal");
  inv->add_option("instance", inst_path, "instance file");
  inv->add_option("--batch", batch, "directory of .loc instances, run all");
  inv->add_option("--xbar", xbar, "target point x y")
      ->expected(2)
      ->required();
  inv->add_option("--eps", eps, "weight-change stopping tolerance")
      ->check(CLI::PositiveNumber);
  inv->add_option("--max-iter", max_outer, "outer iteration cap");
  add_overrides(inv);
  inv->add_option("--trace", trace_path, "write iteration trace CSV here");
  inv->add_option("--out", out_path, "write the final plan here");

  CLI::App* gen =
      app.add_subcommand("gen", "build an instance from a coordinate list");
  gen->add_option("coords", coords_path, "coordinate file, one 'x y' per line")
      ->required();
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--p", p, "norm exponent")->check(CLI::Number);
  gen->add_option("--objective", objective, "minisum|minimax")
      ->check(CLI::IsMember({"minisum", "minimax"}));
  gen->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* ver =
      app.add_subcommand("verify", "check a plan makes --xbar optimal");
  ver->add_option("instance", inst_path, "instance file")->required();
  ver->add_option("plan", plan_path, "plan file")->required();
  ver->add_option("--xbar", xbar, "target point x y")
      ->expected(2)
      ->required();
  add_overrides(ver);
  ver->add_option("--tol", tol,
                  "objective-gap pass tolerance "
                  "(default: 1e-4 * max(1, f(xbar)))");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fwd->parsed()) {
      return cmd_forward(inst_path, ov, max_iter, out_path);
    }
    if (inv->parsed()) {
      InverseOptions opt;
      opt.eps = eps;
      opt.max_outer = max_outer;
      const Point x_bar{xbar[0], xbar[1]};
      if (!batch.empty()) {
        if (!inst_path.empty()) {
          throw std::runtime_error("give either an instance or --batch");
        }
        return cmd_inverse_batch(batch, ov, x_bar, opt);
      }
      if (inst_path.empty()) {
        throw std::runtime_error("an instance file or --batch is required");
      }
      return cmd_inverse(inst_path, ov, x_bar, opt, trace_path, out_path);
    }
    if (gen->parsed()) {
      GeneratorConfig cfg;
      cfg.seed = seed;
      return cmd_gen(coords_path, cfg, p, objective, out_path);
    }
    if (ver->parsed()) {
      const Point x_bar{xbar[0], xbar[1]};
      return cmd_verify(inst_path, plan_path, ov, x_bar,
                        ver->count("--tol") ? std::optional<double>(tol)
                                            : std::nullopt);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
