#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "cli_support.hpp"
#include "netequil/problem_io.hpp"

using cli_support::quote;
using cli_support::run;
using cli_support::slurp;

namespace {

const std::string kCli = NETEQUIL_CLI;
const std::string kFixtures = NETEQUIL_FIXTURES_DIR;

std::string fixture(const std::string& name) { return quote(kFixtures + "/" + name); }

}  // namespace

TEST(Cli, SolveTwoArc) {
  cli_support::ScratchDir dir("solve");
  const auto r = run(kCli, "solve " + fixture("two_arc.prob") + " --out " + quote(dir / "out.sol"));
  ASSERT_EQ(r.exit_code, 0);
  const auto p = netequil::io::parse_problem_file(kFixtures + "/two_arc.prob");
  const auto sol = netequil::io::parse_solution_file(dir / "out.sol", p.net);
  EXPECT_EQ(sol.termination, netequil::Termination::Converged);
  EXPECT_NEAR(sol.x[0][0], 2.0, 1e-5);
  EXPECT_NEAR(sol.x[1][0], 1.0, 1e-5);
  EXPECT_NEAR(sol.v[1][0] - sol.v[0][0], 3.0, 1e-5);
}

TEST(Cli, SolutionOnStdoutWithoutOut) {
  const auto r = run(kCli, "solve -q " + fixture("two_arc.prob"));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.rfind("netequil-solution 1\n", 0), 0u);
}

TEST(Cli, CheckFixtureSolution) {
  const auto r = run(kCli, "check " + fixture("two_arc.prob") + " " + fixture("two_arc.sol"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.rfind("wardrop_residual 0", 0), 0u) << r.out;
}

TEST(Cli, CheckRejectsPerturbedSolution) {
  cli_support::ScratchDir dir("check");
  std::string sol = slurp(kFixtures + "/two_arc.sol");
  sol.replace(sol.find("e1 2\n"), 5, "e1 2.1\n");
  sol.replace(sol.find("e2 1\n"), 5, "e2 0.9\n");
  std::ofstream(dir / "bad.sol") << sol;
  EXPECT_EQ(run(kCli, "check " + fixture("two_arc.prob") + " " + quote(dir / "bad.sol")).exit_code, 2);
  EXPECT_EQ(run(kCli, "check " + fixture("two_arc.prob") + " " + quote(dir / "bad.sol") + " --tol 0.2")
                .exit_code,
            0);
}

TEST(Cli, CheckAcceptsEverySolveOutput) {
  cli_support::ScratchDir dir("accept");
  for (const char* name : {"two_arc.prob", "braess.prob", "multicommodity.prob"}) {
    for (const char* sched : {"full", "roundrobin:2", "randomsweep:0.5"}) {
      const std::string out = quote(dir / "s.sol");
      ASSERT_EQ(run(kCli, std::string("solve -q ") + fixture(name) + " --scheduler " + sched + " -o " + out)
                    .exit_code,
                0)
          << name << ' ' << sched;
      EXPECT_EQ(run(kCli, std::string("check ") + fixture(name) + " " + out).exit_code, 0)
          << name << ' ' << sched;
    }
  }
}

TEST(Cli, IterationLimit) {
  EXPECT_EQ(run(kCli, "solve -q " + fixture("two_arc.prob") + " --max-iter 0").exit_code, 2);
  EXPECT_EQ(run(kCli, "solve -q " + fixture("braess.prob") + " --max-iter 3").exit_code, 2);
}

TEST(Cli, InputErrors) {
  cli_support::ScratchDir dir("input");
  EXPECT_EQ(run(kCli, "solve " + quote(dir / "missing.prob")).exit_code, 1);
  std::ofstream(dir / "bad.prob") << "netequil-problem 1\n[nodes]\na\n";
  EXPECT_EQ(run(kCli, "solve " + quote(dir / "bad.prob")).exit_code, 1);
  EXPECT_EQ(run(kCli, "solve " + fixture("two_arc.prob") + " --scheduler sometimes").exit_code, 1);
  EXPECT_EQ(run(kCli, "solve " + fixture("two_arc.prob") + " --tol -1").exit_code, 1);
  EXPECT_EQ(run(kCli, "check " + fixture("two_arc.prob") + " " + fixture("braess.prob")).exit_code, 1);
  EXPECT_EQ(run(kCli, "frobnicate").exit_code, 1);
}

TEST(Cli, UnreachableToleranceIsNumericalFailure) {
  EXPECT_EQ(run(kCli, "solve -q " + fixture("braess.prob") + " --tol 1e-20").exit_code, 3);
}

TEST(Cli, SeededTracesAreBitwiseReproducible) {
  cli_support::ScratchDir dir("trace");
  const std::string args = "solve -q " + fixture("multicommodity.prob") +
                           " --scheduler randomsweep:0.4 --seed 11 --trace ";
  ASSERT_EQ(run(kCli, args + quote(dir / "a.csv") + " -o " + quote(dir / "a.sol")).exit_code, 0);
  ASSERT_EQ(run(kCli, args + quote(dir / "b.csv") + " -o " + quote(dir / "b.sol")).exit_code, 0);
  ASSERT_EQ(run(kCli, args + quote(dir / "c.csv") + " -o " + quote(dir / "c.sol") + " --threads 3").exit_code, 0);
  const std::string a = slurp(dir / "a.csv");
  EXPECT_EQ(a.rfind(std::string(netequil::io::kTraceHeader) + "\n", 0), 0u);
  EXPECT_GT(std::count(a.begin(), a.end(), '\n'), 10);
  EXPECT_EQ(a, slurp(dir / "b.csv"));
  EXPECT_EQ(a, slurp(dir / "c.csv"));
  EXPECT_EQ(slurp(dir / "a.sol"), slurp(dir / "b.sol"));

  ASSERT_EQ(run(kCli, "solve -q " + fixture("multicommodity.prob") +
                          " --scheduler randomsweep:0.4 --seed 12 --trace " + quote(dir / "d.csv") +
                          " -o " + quote(dir / "d.sol"))
                .exit_code,
            0);
  EXPECT_NE(a, slurp(dir / "d.csv"));
}

TEST(Cli, Selftest) {
  const auto r = run(kCli, "selftest");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}
