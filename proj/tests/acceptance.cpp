// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance <netequil-executable> <fixtures-dir>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli_support.hpp"
#include "netequil/problem_io.hpp"
#include "netequil/selftest.hpp"

using namespace netequil;
using cli_support::quote;
using cli_support::run;
using cli_support::slurp;

namespace {

selftest::Outcome cli_criterion(const std::string& cli, const std::string& fixtures) {
  selftest::Outcome o{"cli", true, ""};
  auto fail = [&](const std::string& why) {
    o.passed = false;
    o.detail += why + "; ";
  };
  cli_support::ScratchDir dir("acceptance");
  const std::vector<std::string> names{"two_arc.prob", "braess.prob", "multicommodity.prob"};

  for (const auto& name : names) {
    const std::string path = fixtures + "/" + name;
    try {
      const auto a = io::parse_problem_file(path);
      std::ostringstream first, second;
      io::write_problem(first, a.net, a.ops, a.cfg);
      std::istringstream in(first.str());
      const auto b = io::parse_problem(in);
      io::write_problem(second, b.net, b.ops, b.cfg);
      if (!(a.ops == b.ops && a.cfg == b.cfg && a.net.node_ids() == b.net.node_ids() &&
            first.str() == second.str())) {
        fail(name + " does not round-trip");
      }
    } catch (const std::exception& e) {
      fail(name + ": " + e.what());
      continue;
    }

    const std::string sol = quote(dir / (name + ".sol"));
    const int solved = run(cli, "solve -q " + quote(path) + " -o " + sol).exit_code;
    if (solved != 0) {
      fail("solve " + name + " exit " + std::to_string(solved));
      continue;
    }
    const auto checked = run(cli, "check " + quote(path) + " " + sol);
    if (checked.exit_code != 0) fail("check " + name + " exit " + std::to_string(checked.exit_code));
  }

  const std::string args = "solve -q " + quote(fixtures + "/multicommodity.prob") +
                           " --scheduler randomsweep:0.5 --seed 20260416 -o /dev/null --trace ";
  const int t1 = run(cli, args + quote(dir / "t1.csv")).exit_code;
  const int t2 = run(cli, args + quote(dir / "t2.csv")).exit_code;
  const std::string a = slurp(dir / "t1.csv"), b = slurp(dir / "t2.csv");
  if (t1 != 0 || t2 != 0 || a.empty()) {
    fail("seeded trace runs failed");
  } else if (a != b) {
    fail("seeded traces differ");
  } else {
    o.detail += "3 fixtures round-trip, solve and check; seeded traces identical (" +
                std::to_string(std::count(a.begin(), a.end(), '\n') - 1) + " rows)";
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <netequil-executable> <fixtures-dir>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1], fixtures = argv[2];

  const std::vector<std::function<selftest::Outcome()>> criteria{
      [] { return selftest::resolvent_identity(); },
      [] { return selftest::lambert_w_accuracy(); },
      [] { return selftest::separable_lift(); },
      [] { return selftest::adjointness(); },
      [] { return selftest::two_arc_equilibrium(); },
      [] { return selftest::braess_agreement(); },
      [] { return selftest::fejer_monotonicity(); },
      [] { return selftest::sweeping_enforcement(); },
      [] { return selftest::degenerate_branches(); },
      [&] { return cli_criterion(cli, fixtures); },
  };

  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    selftest::Outcome o;
    try {
      o = criteria[n]();
    } catch (const std::exception& e) {
      o = {"criterion", false, std::string("exception: ") + e.what()};
    }
    failed += !o.passed;
    std::printf("%s %zu %s: %s\n", o.passed ? "PASS" : "FAIL", n + 1, o.name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%zu/%zu criteria passed in %.1f s\n", criteria.size() - failed, criteria.size(), secs);
  return failed == 0 ? 0 : 1;
}
