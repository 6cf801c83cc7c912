#include "netequil/lambert_w.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "netequil/network.hpp"

namespace netequil {

namespace {

constexpr int kMaxIterations = 50;
constexpr double kStepTolerance = 1e-15;
// Beyond this, exp(z) is evaluated nowhere; w + ln w = z is solved directly.
constexpr double kExpArgumentLimit = 700.0 * std::numbers::ln2;

double initial_guess(double x) {
  if (x < -0.32) {
    // Branch-point series in p = sqrt(2(ex + 1)).
    double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0)));
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  }
  if (x <= 3.0) {
    double l = std::log1p(x);
    return l * (1.0 - std::log1p(l) / (2.0 + l));
  }
  double l1 = std::log(x);
  double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w(double x) {
  if (std::isnan(x)) throw DomainError("lambert_w: NaN argument");
  if (x == 0.0) return 0.0;
  if (std::isinf(x) && x > 0) return x;
  double branch = std::numbers::e * x + 1.0;
  if (branch < 0.0) {
    if (x < -std::exp(-1.0)) {
      throw DomainError("lambert_w: argument below -1/e");
    }
  }
  if (branch <= 0.0) return -1.0;

  double w = initial_guess(x);
  for (int it = 0; it < kMaxIterations; ++it) {
    double ew = std::exp(w);
    double f = w * ew - x;
    double wp1 = w + 1.0;
    if (wp1 <= 0.0) {
      w = -1.0 + 1e-10;
      continue;
    }
    double dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= dw;
    if (std::abs(dw) <= kStepTolerance * (1.0 + std::abs(w))) break;
  }
  return std::max(w, -1.0);
}

double lambert_w_exp(double z) {
  if (std::isnan(z)) throw DomainError("lambert_w_exp: NaN argument");
  if (z <= kExpArgumentLimit) return lambert_w(std::exp(z));
  if (std::isinf(z)) return z;
  // Newton on g(w) = w + ln w - z; g is concave increasing so iterates from
  // the asymptotic guess converge monotonically.
  double w = z - std::log(z);
  for (int it = 0; it < kMaxIterations; ++it) {
    double dw = (w + std::log(w) - z) * w / (w + 1.0);
    w -= dw;
    if (std::abs(dw) <= kStepTolerance * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace netequil
