#include "invloc/ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace invloc {

namespace {

struct Token {
  std::string text;
  int column = 0;  // 1-based start column
};

// Splits one physical line into whitespace-separated tokens, dropping
// everything from the first '#' on. Keeps the start column of each token.
std::vector<Token> tokenize(const std::string& raw) {
  std::string line = raw;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (const auto hash = line.find('#'); hash != std::string::npos) {
    line.erase(hash);
  }
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ' || line[i] == '\t') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

// Reads significant (non-blank after comment stripping) lines one at a time.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Advances to the next significant line. Returns false at end of input.
  bool next(std::vector<Token>& tokens, int& line_no) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      tokens = tokenize(raw);
      if (!tokens.empty()) {
        line_no = line_;
        return true;
      }
    }
    return false;
  }

 private:
  std::istream& in_;
  int line_ = 0;
};

double parse_double(const Token& tok, int line) {
  double v = 0.0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw ParseError("bad number '" + tok.text + "'", line, tok.column);
  }
  return v;
}

long long parse_count(const Token& tok, int line) {
  long long v = 0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw ParseError("bad site count '" + tok.text + "'", line, tok.column);
  }
  return v;
}

// Non-negativity and finiteness check shared by all per-site fields.
double parse_field(const Token& tok, int line, const char* name) {
  const double v = parse_double(tok, line);
  if (!std::isfinite(v) || v < 0.0) {
    throw ParseError(std::string(name) + " must be finite and >= 0", line,
                     tok.column);
  }
  return v;
}

}  // namespace

ParseError::ParseError(std::string msg, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ": " +
                         std::move(msg)),
      line_(line),
      column_(column) {}

std::string to_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Instance parse_instance(std::istream& in) {
  LineReader reader(in);
  std::vector<Token> tok;
  int line = 0;

  if (!reader.next(tok, line)) {
    throw ParseError("empty input, expected 'INVLOC 1' header", 1, 0);
  }
  if (tok.size() != 2 || tok[0].text != "INVLOC") {
    throw ParseError("expected 'INVLOC 1' header", line, tok[0].column);
  }
  if (tok[1].text != "1") {
    throw ParseError("unsupported format version '" + tok[1].text + "'", line,
                     tok[1].column);
  }

  if (!reader.next(tok, line)) {
    throw ParseError("missing '<objective> <n> <p>' line", line + 1, 0);
  }
  if (tok.size() != 3) {
    throw ParseError("expected '<objective> <n> <p>'", line, 0);
  }
  Instance inst;
  if (tok[0].text == "minisum") {
    inst.objective = Objective::Minisum;
  } else if (tok[0].text == "minimax") {
    inst.objective = Objective::Minimax;
  } else {
    throw ParseError("unknown objective '" + tok[0].text + "'", line,
                     tok[0].column);
  }
  const long long n = parse_count(tok[1], line);
  if (n < 1 || n > 10'000'000) {
    throw ParseError("site count out of range", line, tok[1].column);
  }
  const double p = parse_double(tok[2], line);
  if (std::isnan(p) || p < 1.0) {
    throw ParseError("p must be >= 1", line, tok[2].column);
  }
  inst.norm = Norm{p};

  inst.sites.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    if (!reader.next(tok, line)) {
      throw ParseError("site count mismatch: header says " +
                           std::to_string(n) + ", file has " +
                           std::to_string(i),
                       line + 1, 0);
    }
    if (tok.size() != 7) {
      throw ParseError("expected 7 fields 'a b w u- u+ c- c+', got " +
                           std::to_string(tok.size()),
                       line, 0);
    }
    ClientSite s;
    s.location.x = parse_double(tok[0], line);
    s.location.y = parse_double(tok[1], line);
    if (!std::isfinite(s.location.x) || !std::isfinite(s.location.y)) {
      throw ParseError("coordinates must be finite", line, tok[0].column);
    }
    s.weight = parse_field(tok[2], line, "weight");
    s.u_minus = parse_field(tok[3], line, "u_minus");
    s.u_plus = parse_field(tok[4], line, "u_plus");
    s.c_minus = parse_field(tok[5], line, "c_minus");
    s.c_plus = parse_field(tok[6], line, "c_plus");
    inst.sites.push_back(s);
  }
  if (reader.next(tok, line)) {
    throw ParseError("trailing content after last site", line, tok[0].column);
  }

  // Belt and braces: the inline checks above should leave nothing for this.
  const auto problems = validate_instance(inst);
  if (!problems.empty()) {
    throw ParseError(problems.front(), 0, 0);
  }
  return inst;
}

Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

void write_instance(const Instance& inst, std::ostream& out) {
  out << "INVLOC 1\n";
  out << (inst.objective == Objective::Minisum ? "minisum" : "minimax") << ' '
      << inst.sites.size() << ' ' << to_shortest(inst.norm.p) << '\n';
  for (const ClientSite& s : inst.sites) {
    out << to_shortest(s.location.x) << ' ' << to_shortest(s.location.y) << ' '
        << to_shortest(s.weight) << ' ' << to_shortest(s.u_minus) << ' '
        << to_shortest(s.u_plus) << ' ' << to_shortest(s.c_minus) << ' '
        << to_shortest(s.c_plus) << '\n';
  }
}

std::string write_instance(const Instance& inst) {
  std::ostringstream out;
  write_instance(inst, out);
  return out.str();
}

ModificationPlan parse_plan(std::istream& in) {
  LineReader reader(in);
  std::vector<Token> tok;
  int line = 0;

  if (!reader.next(tok, line)) {
    throw ParseError("empty input, expected 'INVLOC-PLAN 1 <n> <cost>'", 1, 0);
  }
  if (tok.size() != 4 || tok[0].text != "INVLOC-PLAN") {
    throw ParseError("expected 'INVLOC-PLAN 1 <n> <cost>' header", line,
                     tok[0].column);
  }
  if (tok[1].text != "1") {
    throw ParseError("unsupported plan version '" + tok[1].text + "'", line,
                     tok[1].column);
  }
  const long long n = parse_count(tok[2], line);
  if (n < 1 || n > 10'000'000) {
    throw ParseError("site count out of range", line, tok[2].column);
  }
  ModificationPlan plan;
  plan.cost = parse_double(tok[3], line);
  if (!std::isfinite(plan.cost) || plan.cost < 0.0) {
    throw ParseError("cost must be finite and >= 0", line, tok[3].column);
  }

  plan.w_hat.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    if (!reader.next(tok, line)) {
      throw ParseError("plan row count mismatch: header says " +
                           std::to_string(n) + ", file has " +
                           std::to_string(i),
                       line + 1, 0);
    }
    if (tok.size() != 3) {
      throw ParseError("expected 3 fields 'w_hat p_plus q_minus', got " +
                           std::to_string(tok.size()),
                       line, 0);
    }
    plan.w_hat.push_back(parse_field(tok[0], line, "w_hat"));
    plan.p_plus.push_back(parse_field(tok[1], line, "p_plus"));
    plan.q_minus.push_back(parse_field(tok[2], line, "q_minus"));
  }
  if (reader.next(tok, line)) {
    throw ParseError("trailing content after last row", line, tok[0].column);
  }
  return plan;
}

void write_plan(const ModificationPlan& plan, std::ostream& out) {
  out << "INVLOC-PLAN 1 " << plan.w_hat.size() << ' ' << to_shortest(plan.cost)
      << '\n';
  for (std::size_t i = 0; i < plan.w_hat.size(); ++i) {
    out << to_shortest(plan.w_hat[i]) << ' ' << to_shortest(plan.p_plus[i])
        << ' ' << to_shortest(plan.q_minus[i]) << '\n';
  }
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << "k,x,y,cost,delta_w\n";
  for (const IterationRecord& r : trace.records) {
    out << r.k << ',' << to_shortest(r.x_k.x) << ',' << to_shortest(r.x_k.y)
        << ',' << to_shortest(r.cost_k) << ',' << to_shortest(r.delta_w)
        << '\n';
  }
}

std::string write_trace_csv(const RunTrace& trace) {
  std::ostringstream out;
  write_trace_csv(trace, out);
  return out.str();
}

std::pair<double, std::uint64_t> next_uniform(std::uint64_t state) {
  const std::uint64_t next = state + 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = next;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  // 53 high bits scaled into [0, 1).
  const double value = static_cast<double>(z >> 11) * 0x1.0p-53;
  return {value, next};
}

Instance ingest_coordinates(std::istream& in, const GeneratorConfig& cfg,
                            const Norm& norm, Objective objective) {
  if (!(cfg.low <= cfg.high) || !std::isfinite(cfg.low) ||
      !std::isfinite(cfg.high) || cfg.low < 0.0) {
    throw ParseError("generator range must satisfy 0 <= low <= high", 0, 0);
  }
  Instance inst;
  inst.norm = norm;
  inst.objective = objective;

  std::uint64_t state = cfg.seed;
  auto draw = [&] {
    const auto [u, next] = next_uniform(state);
    state = next;
    return cfg.low + u * (cfg.high - cfg.low);
  };

  LineReader reader(in);
  std::vector<Token> tok;
  int line = 0;
  while (reader.next(tok, line)) {
    std::size_t first = 0;
    if (tok.size() == 3) first = 1;  // leading index token, ignored
    if (tok.size() != 2 && tok.size() != 3) {
      throw ParseError("expected 'x y' (optionally index-prefixed), got " +
                           std::to_string(tok.size()) + " fields",
                       line, 0);
    }
    ClientSite s;
    s.location.x = parse_double(tok[first], line);
    s.location.y = parse_double(tok[first + 1], line);
    if (!std::isfinite(s.location.x) || !std::isfinite(s.location.y)) {
      throw ParseError("coordinates must be finite", line, tok[first].column);
    }
    s.weight = draw();
    s.u_minus = draw();
    s.u_plus = draw();
    s.c_minus = draw();
    s.c_plus = draw();
    if (s.u_minus > s.weight) s.u_minus = s.weight;
    inst.sites.push_back(s);
  }
  if (inst.sites.empty()) {
    throw ParseError("no coordinates in input", 1, 0);
  }
  return inst;
}

Instance ingest_coordinates(const std::string& text,
                            const GeneratorConfig& cfg, const Norm& norm,
                            Objective objective) {
  std::istringstream in(text);
  return ingest_coordinates(in, cfg, norm, objective);
}

}  // namespace invloc
