#include <gtest/gtest.h>

#include <cmath>

#include "netequil/errors.hpp"
#include "netequil/lambert_w.hpp"

using netequil::lambert_w;
using netequil::lambert_w_exp;

namespace {

// w e^w = x by plain bisection on [-1, max(1, ln x + 1)].
double w_by_bisection(double x) {
  double lo = -1.0, hi = std::max(1.0, std::log(std::max(x, 1.0)) + 1.0);
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::exp(mid) < x ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(LambertW, KnownValues) {
  EXPECT_EQ(lambert_w(0.0), 0.0);
  EXPECT_NEAR(lambert_w(std::exp(1.0)), 1.0, 1e-15);
  EXPECT_NEAR(lambert_w(1.0), w_by_bisection(1.0), 1e-15);
  EXPECT_NEAR(lambert_w(1.0), 0.5671432904097838, 1e-15);
  EXPECT_NEAR(lambert_w(-std::exp(-1.0)), -1.0, 1e-7);
}

TEST(LambertW, MatchesBisectionAcrossRange) {
  for (double x : {-0.36, -0.3, -0.1, -1e-6, 1e-8, 0.5, 2.0, 3.0, 3.5, 10.0, 1e3, 1e6, 1e12}) {
    const double w = lambert_w(x);
    EXPECT_NEAR(w, w_by_bisection(x), 1e-13 * std::max(1.0, std::abs(w))) << x;
  }
}

TEST(LambertW, ResidualNearBranchPoint) {
  const double b = -std::exp(-1.0);
  for (double d : {1e-9, 1e-7, 1e-5, 1e-3}) {
    const double w = lambert_w(b + d);
    EXPECT_GE(w, -1.0);
    EXPECT_LE(std::abs(w * std::exp(w) - (b + d)), 1e-12);
  }
}

TEST(LambertW, BelowBranchPointIsDomainError) {
  EXPECT_THROW(lambert_w(-0.5), netequil::DomainError);
  EXPECT_THROW(lambert_w(std::nan("")), netequil::DomainError);
}

TEST(LambertW, ExpFormAgreesAndStaysFinite) {
  for (double z : {-30.0, -2.0, 0.0, 1.0, 5.0, 50.0, 300.0}) {
    EXPECT_NEAR(lambert_w_exp(z), lambert_w(std::exp(z)), 1e-13 * std::max(1.0, lambert_w(std::exp(z))))
        << z;
  }
  for (double z : {800.0, 1e4, 1e8, 1e300}) {
    const double w = lambert_w_exp(z);
    ASSERT_TRUE(std::isfinite(w));
    EXPECT_NEAR(w + std::log(w), z, 1e-13 * z) << z;
  }
}
