#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>

#include "invloc/model.hpp"

namespace invloc {

// Thrown for malformed instance/plan/coordinate text. line/column are
// 1-based; column is 0 for whole-line or semantic complaints.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Canonical instance format:
//   line 1:      INVLOC 1
//   line 2:      <minisum|minimax> <n> <p>
//   lines 3..:   <a_i> <b_i> <w_i> <u_minus_i> <u_plus_i> <c_minus_i> <c_plus_i>
// '#' starts a comment; blank lines are ignored. parse_instance rejects
// malformed or semantically invalid input (negative weight, p < 1, site
// count mismatch) with line/column diagnostics.
Instance parse_instance(std::istream& in);
Instance parse_instance(const std::string& text);

// Writes the canonical format with shortest round-trip number rendering, so
// parse_instance(write_instance(x)) reproduces every field bit-identically.
void write_instance(const Instance& inst, std::ostream& out);
std::string write_instance(const Instance& inst);

// Plan file: header "INVLOC-PLAN 1 <n> <cost>", then n lines
// "<w_hat_i> <p_plus_i> <q_minus_i>".
ModificationPlan parse_plan(std::istream& in);
void write_plan(const ModificationPlan& plan, std::ostream& out);

// Trace CSV: header "k,x,y,cost,delta_w", one row per iteration record.
void write_trace_csv(const RunTrace& trace, std::ostream& out);
std::string write_trace_csv(const RunTrace& trace);

// SplitMix64 step: advances the state and maps the output word to [0, 1).
// Pure; the returned pair is (value, next state).
std::pair<double, std::uint64_t> next_uniform(std::uint64_t state);

struct GeneratorConfig {
  std::uint64_t seed = 0;
  double low = 1.0;   // draws are uniform in [low, high)
  double high = 10.0;
};

// Builds a full instance from a plain coordinate list: one site per line,
// "x y" optionally prefixed by an index token (skipped). w, u_minus, u_plus,
// c_minus, c_plus are drawn in that field order, site by site, from the
// SplitMix64 stream; u_minus is then clamped to <= w so weights can always
// reach zero but never go negative. Deterministic in (text, seed).
Instance ingest_coordinates(std::istream& in, const GeneratorConfig& cfg,
                            const Norm& norm, Objective objective);
Instance ingest_coordinates(const std::string& text,
                            const GeneratorConfig& cfg, const Norm& norm,
                            Objective objective);

// Shortest decimal rendering that parses back to the identical double.
std::string to_shortest(double v);

}  // namespace invloc
