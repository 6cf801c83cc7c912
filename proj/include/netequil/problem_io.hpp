#pragma once

// Text formats for problems, solutions and iteration traces.
//
// Problem and solution files are line oriented: a versioned header line, then
// bracketed sections. '#' starts a comment. Numbers are written in shortest
// round-trip form; "inf" and "-inf" denote unbounded box limits.
//
//   netequil-problem 1
//   [commodities]
//   car
//   [nodes]
//   a
//   b
//   [arcs]
//   # id tail head capacity-family key=value ... ; constraint
//   e1 a b bpr alpha=0.15 rho=10 theta=1 p=4 ; orthant
//   e2 a b interval phi=quadratic a=1 lo=0 hi=5 ; box 0:inf
//   [supplies]
//   a 3
//   b -3
//   [solver]
//   gamma = 1
//   gamma.e2 = 0.5
//   lambda = 1.8
//   scheduler = roundrobin:2
//   T = 1

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "netequil/network.hpp"
#include "netequil/operators.hpp"
#include "netequil/solver.hpp"

namespace netequil::io {

enum class ErrorCode {
  Syntax,
  UnsupportedVersion,
  UnknownFamily,
  ParameterRange,
  DanglingReference,
  MissingCommodityEntry,
  Duplicate,
  MissingSection,
  InvalidSolverOption,
  DefaultedConstraint,
};

/// Stable short code such as "E004" for diagnostics.
std::string_view code_name(ErrorCode code);

struct Diagnostic {
  ErrorCode code;
  std::size_t line = 0;
  std::string section;
  std::string entity;
  std::string message;

  std::string format() const;
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(Diagnostic d) : std::runtime_error(d.format()), diagnostic_(std::move(d)) {}
  const Diagnostic& diagnostic() const { return diagnostic_; }

 private:
  Diagnostic diagnostic_;
};

struct ParsedProblem {
  Network net;
  OperatorSet ops;
  SolverConfig cfg;
  std::vector<Diagnostic> warnings;
};

/// Reads and fully validates a problem. Throws ParseError, never anything else
/// for malformed input.
ParsedProblem parse_problem(std::istream& in);
ParsedProblem parse_problem_file(const std::string& path);

void write_problem(std::ostream& out, const Network& net, const OperatorSet& ops,
                   const SolverConfig& cfg);

struct Solution {
  Flow x;
  ArcDual xdual;
  Potential v;
  double residual = 0.0;
  std::size_t iterations = 0;
  Termination termination = Termination::IterLimit;

  bool operator==(const Solution&) const = default;
};

Solution parse_solution(std::istream& in, const Network& net);
Solution parse_solution_file(const std::string& path, const Network& net);
void write_solution(std::ostream& out, const Network& net, const Solution& sol);

/// "full", "roundrobin:K" (interleaved groups) or "randomsweep:p". Throws
/// ConfigError for anything else.
SchedulerSpec parse_scheduler(std::string_view text, const Network& net, std::uint64_t seed = 0);

inline constexpr std::string_view kTraceHeader =
    "n,tau,pi,theta,lambda,active_arcs,active_nodes,residual,millis";

/// One CSV row in kTraceHeader order; absent optional fields are left empty.
std::string trace_row(const TraceRecord& rec);

/// Shortest decimal string that parses back to exactly v.
std::string format_number(double v);
std::optional<double> parse_number(std::string_view s);

}  // namespace netequil::io
