#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "netequil/errors.hpp"
#include "netequil/problem_io.hpp"

using namespace netequil;
using namespace netequil::io;

namespace {

const std::string kFixtures = NETEQUIL_FIXTURES_DIR;

const char* kMinimal = R"(netequil-problem 1
[commodities]
car
[nodes]
a
b
[arcs]
e1 a b bpr alpha=1 rho=1 theta=1 p=1 ; orthant
[supplies]
a 1
b -1
)";

ParsedProblem parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_problem(in);
}

// Parses `text` expecting failure and returns the diagnostic.
Diagnostic parse_failure(const std::string& text) {
  try {
    parse_text(text);
  } catch (const ParseError& e) {
    return e.diagnostic();
  }
  ADD_FAILURE() << "no ParseError for:\n" << text;
  return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST(ProblemIo, MinimalFile) {
  const auto p = parse_text(kMinimal);
  EXPECT_EQ(p.net.num_nodes(), 2u);
  EXPECT_EQ(p.net.num_arcs(), 1u);
  EXPECT_EQ(p.net.num_commodities(), 1u);
  EXPECT_EQ(std::get<Bpr>(p.ops.arcs[0].capacity), (Bpr{1.0, 1.0, 1.0, 1.0}));
  EXPECT_TRUE(p.ops.arcs[0].constraint.is_orthant());
  EXPECT_EQ(p.ops.nodes[1].supply[0], -1.0);
  EXPECT_EQ(p.cfg, SolverConfig::defaults(p.net));
  EXPECT_TRUE(p.warnings.empty());
}

TEST(ProblemIo, FixtureRoundTrip) {
  for (const char* name : {"two_arc.prob", "braess.prob", "multicommodity.prob"}) {
    const auto a = parse_problem_file(kFixtures + "/" + name);
    std::ostringstream out;
    write_problem(out, a.net, a.ops, a.cfg);
    const auto b = parse_text(out.str());
    EXPECT_EQ(a.ops, b.ops) << name;
    EXPECT_EQ(a.cfg, b.cfg) << name;
    EXPECT_EQ(a.net.node_ids(), b.net.node_ids()) << name;
    ASSERT_EQ(a.net.num_arcs(), b.net.num_arcs());
    for (std::size_t j = 0; j < a.net.num_arcs(); ++j) {
      EXPECT_EQ(a.net.arc(j).id, b.net.arc(j).id);
      EXPECT_EQ(a.net.arc(j).tail, b.net.arc(j).tail);
      EXPECT_EQ(a.net.arc(j).head, b.net.arc(j).head);
    }
    // Writing is a fixed point after one round.
    std::ostringstream again;
    write_problem(again, b.net, b.ops, b.cfg);
    EXPECT_EQ(out.str(), again.str()) << name;
  }
}

TEST(ProblemIo, MulticommodityFixtureContents) {
  const auto p = parse_problem_file(kFixtures + "/multicommodity.prob");
  EXPECT_EQ(p.net.num_commodities(), 2u);
  const auto& box = p.ops.arcs[p.net.arc_index("r23")].constraint;
  EXPECT_EQ(box.hi[0], 3.0);
  EXPECT_TRUE(std::isinf(box.hi[1]));
  ASSERT_TRUE(std::holds_alternative<RoundRobin>(p.cfg.scheduler));
  EXPECT_EQ(std::get<RoundRobin>(p.cfg.scheduler), RoundRobin::interleaved(p.net, 2));
  EXPECT_EQ(p.cfg.sweep_bound, 1u);
  EXPECT_EQ(p.cfg.tol, 1e-7);
  EXPECT_EQ(p.cfg.check_interval, 5u);
  // n2 is missing from [supplies].
  EXPECT_EQ(p.ops.nodes[p.net.node_index("n2")].supply, (std::vector<double>{0.0, 0.0}));
}

TEST(ProblemIo, SolverOverrides) {
  const std::string text = std::string(kMinimal) + R"([solver]
gamma = 2
gamma.e1 = 0.5
sigma.b = 3
lambda = 1.5, 1.0
scheduler = randomsweep:0.25
seed = 99
T = 2
max_iter = 17
)";
  const auto p = parse_text(text);
  EXPECT_EQ(p.cfg.gamma, (std::vector<double>{0.5}));
  EXPECT_EQ(p.cfg.sigma, (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(p.cfg.lambda.values, (std::vector<double>{1.5, 1.0}));
  EXPECT_EQ(std::get<RandomSweep>(p.cfg.scheduler), (RandomSweep{99, 0.25}));
  EXPECT_EQ(p.cfg.sweep_bound, 2u);
  EXPECT_EQ(p.cfg.max_iter, 17u);
}

TEST(ProblemIo, ErrorCodes) {
  const std::string base = kMinimal;
  struct Case {
    std::string text;
    ErrorCode code;
  };
  const std::vector<Case> cases{
      {replace(base, "netequil-problem 1", "netequil-problem 2"), ErrorCode::UnsupportedVersion},
      {replace(base, "netequil-problem 1", "hello"), ErrorCode::Syntax},
      {replace(base, "[supplies]", "[bogus]"), ErrorCode::Syntax},
      {replace(base, "bpr alpha", "quartic alpha"), ErrorCode::UnknownFamily},
      {replace(base, "alpha=1", "alpha=-1"), ErrorCode::ParameterRange},
      {replace(base, "alpha=1", "alpha=x"), ErrorCode::Syntax},
      {replace(base, "e1 a b", "e1 a zz"), ErrorCode::DanglingReference},
      {replace(base, "a 1\n", "zz 1\n"), ErrorCode::DanglingReference},
      {replace(base, "; orthant", "; box 0:1 0:1"), ErrorCode::MissingCommodityEntry},
      {replace(base, "a 1\n", "a 1 2\n"), ErrorCode::MissingCommodityEntry},
      {replace(base, "b\n[arcs]", "b\na\n[arcs]"), ErrorCode::Duplicate},
      {replace(base, "[supplies]\na 1\nb -1\n", "[supplies]\na 1\nb -1\n[supplies]\n"), ErrorCode::Duplicate},
      {replace(base, "[commodities]\ncar\n", ""), ErrorCode::MissingSection},
      {base + "[solver]\nlambda = 2.5\n", ErrorCode::InvalidSolverOption},
      {base + "[solver]\nscheduler = sometimes\n", ErrorCode::InvalidSolverOption},
      {base + "[solver]\nwarp = 9\n", ErrorCode::InvalidSolverOption},
      {replace(base, "e1 a b", "e1 a a"), ErrorCode::ParameterRange},
  };
  for (const auto& c : cases) {
    const Diagnostic d = parse_failure(c.text);
    EXPECT_EQ(d.code, c.code) << c.text << "\n-> " << d.format();
  }
}

TEST(ProblemIo, NegativeAlphaNamesTheArc) {
  const Diagnostic d = parse_failure(replace(kMinimal, "alpha=1", "alpha=-1"));
  EXPECT_EQ(d.code, ErrorCode::ParameterRange);
  EXPECT_EQ(d.entity, "e1");
  EXPECT_EQ(d.line, 8u);
  EXPECT_EQ(code_name(d.code), "E004");
  EXPECT_NE(d.format().find("e1"), std::string::npos);
  EXPECT_NE(d.format().find("E004"), std::string::npos);
}

TEST(ProblemIo, OmittedConstraintWarns) {
  const auto p = parse_text(replace(kMinimal, " ; orthant", ""));
  EXPECT_TRUE(p.ops.arcs[0].constraint.is_orthant());
  ASSERT_EQ(p.warnings.size(), 1u);
  EXPECT_EQ(p.warnings[0].code, ErrorCode::DefaultedConstraint);
  EXPECT_EQ(code_name(p.warnings[0].code), "W001");
  EXPECT_EQ(p.warnings[0].entity, "e1");
}

TEST(ProblemIo, SolutionRoundTrip) {
  const auto p = parse_problem_file(kFixtures + "/two_arc.prob");
  const Solution fixture = parse_solution_file(kFixtures + "/two_arc.sol", p.net);
  EXPECT_EQ(fixture.x[0][0], 2.0);
  EXPECT_EQ(fixture.v[1][0], 3.0);
  EXPECT_EQ(fixture.termination, Termination::Converged);

  Solution sol{p.net.zero_flow(), p.net.zero_flow(), p.net.zero_potential(), 1.25e-7, 42,
               Termination::NumericalFailure};
  sol.x[0][0] = 0.1;
  sol.x[1][0] = 2.0 / 3.0;
  sol.xdual[1][0] = -1e-300;
  sol.v[1][0] = std::nextafter(3.0, 4.0);
  std::ostringstream out;
  write_solution(out, p.net, sol);
  std::istringstream in(out.str());
  EXPECT_EQ(parse_solution(in, p.net), sol);

  std::istringstream missing("netequil-solution 1\ntermination converged\niterations 1\nresidual 0\n"
                             "[flow]\ne1 1\n[arc_dual]\ne1 0\ne2 0\n[potential]\na 0\nb 0\n");
  EXPECT_THROW(parse_solution(missing, p.net), ParseError);
}

TEST(ProblemIo, NumbersRoundTrip) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int n = 0; n < 20000; ++n) {
    double v;
    const std::uint64_t b = bits(rng);
    std::memcpy(&v, &b, sizeof v);
    if (std::isnan(v)) continue;
    const auto back = parse_number(format_number(v));
    ASSERT_TRUE(back.has_value()) << format_number(v);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(*back), b) << format_number(v);
  }
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(parse_number("+2.5"), 2.5);
  EXPECT_FALSE(parse_number("nan").has_value());
  EXPECT_FALSE(parse_number("1.5x").has_value());
  EXPECT_FALSE(parse_number("").has_value());
}

TEST(ProblemIo, TraceRow) {
  TraceRecord rec;
  rec.n = 3;
  rec.tau = 0.5;
  rec.pi = 0.25;
  rec.theta = 0.9;
  rec.lambda = 1.8;
  rec.active_arcs = 4;
  rec.active_nodes = 2;
  EXPECT_EQ(trace_row(rec), "3,0.5,0.25,0.9,1.8,4,2,,");
  rec.residual = 1e-3;
  EXPECT_EQ(trace_row(rec), "3,0.5,0.25,0.9,1.8,4,2,0.001,");
  EXPECT_EQ(std::count(kTraceHeader.begin(), kTraceHeader.end(), ','), 8);
}

TEST(ProblemIo, SchedulerText) {
  EXPECT_THROW(parse_scheduler("roundrobin:2", parse_text(kMinimal).net), ConfigError);
  const auto p = parse_problem_file(kFixtures + "/two_arc.prob");
  EXPECT_TRUE(std::holds_alternative<FullSweep>(parse_scheduler("full", p.net)));
  EXPECT_EQ(std::get<RoundRobin>(parse_scheduler("roundrobin:2", p.net)), RoundRobin::interleaved(p.net, 2));
  EXPECT_EQ(std::get<RandomSweep>(parse_scheduler("randomsweep:0.5", p.net, 7)), (RandomSweep{7, 0.5}));
  EXPECT_THROW(parse_scheduler("roundrobin:0", p.net), ConfigError);
  EXPECT_THROW(parse_scheduler("randomsweep:", p.net), ConfigError);
  EXPECT_THROW(parse_scheduler("fast", p.net), ConfigError);
}
