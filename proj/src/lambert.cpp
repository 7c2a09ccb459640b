#include "teachdim/lambert.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "teachdim/error.hpp"

namespace teachdim {

namespace {

constexpr double kBranchClamp = 1e-15;
constexpr int kMaxHalleySteps = 50;
constexpr double kResidualTol = 1e-14;

double initial_guess(double x) {
  if (x < -0.25) {
    // Series about the branch point in p = sqrt(2 (e x + 1)).
    const double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * x + 1.0)));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
  }
  // Winitzki's approximation.
  const double l = std::log1p(x);
  return l * (1.0 - std::log1p(l) / (2.0 + l));
}

}  // namespace

double lambert_w0(double x) {
  const double branch = -1.0 / std::numbers::e;
  if (std::isnan(x)) throw Error(errc::domain_error, "lambert_w0 of NaN");
  if (x < branch) {
    if (branch - x > kBranchClamp) {
      throw Error(errc::domain_error, "lambert_w0 requires x >= -1/e, got " + std::to_string(x));
    }
    x = branch;
  }
  if (x == branch) return -1.0;
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;

  const double tol = kResidualTol * std::max(1.0, std::abs(x));
  double w = initial_guess(x);
  for (int step = 0; step < kMaxHalleySteps; ++step) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::abs(f) <= tol) break;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double next = w - f / denom;
    if (next == w) break;
    // Stay on the principal branch.
    w = std::max(next, -1.0);
  }
  return w;
}

double tau_max() {
  static const double value = lambert_w0(std::exp(-1.0));
  return value;
}

double tau_argmax() { return 1.0 + tau_max(); }

double tau_inverse(double a) {
  const double top = tau_max();
  if (!(a > 0.0) || a > top + kBranchClamp) {
    throw Error(errc::domain_error, "tau_inverse requires 0 < a <= tau_max, got " + std::to_string(a));
  }
  a = std::min(a, top);
  const double z = -a * std::exp(a);
  // Within rounding of the branch point W = -1; the root there is a double
  // root and is only determined to sqrt(eps) by the residual.
  if (z + 1.0 / std::numbers::e <= kBranchClamp) return a + 1.0;
  return a - lambert_w0(z);
}

TauValue tau_point(double a) { return {a, tau_inverse(a)}; }

}  // namespace teachdim
