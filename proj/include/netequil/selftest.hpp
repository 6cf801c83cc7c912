#pragma once

// Property suites shared by `netequil selftest`, the acceptance runner and the
// unit tests. Each suite is self-contained and deterministic for a given seed.

#include <cstdint>
#include <string>
#include <vector>

namespace netequil::selftest {

inline constexpr std::uint64_t kDefaultSeed = 20260416;

struct Outcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

Outcome resolvent_identity(std::uint64_t seed = kDefaultSeed);
Outcome lambert_w_accuracy();
Outcome separable_lift(std::uint64_t seed = kDefaultSeed);
Outcome adjointness(std::uint64_t seed = kDefaultSeed);
Outcome two_arc_equilibrium();
Outcome braess_agreement();
Outcome fejer_monotonicity();
Outcome sweeping_enforcement(std::uint64_t seed = kDefaultSeed);
Outcome degenerate_branches();

std::vector<Outcome> run_all(std::uint64_t seed = kDefaultSeed);

}  // namespace netequil::selftest
