#include <doctest.h>

#include <cmath>
#include <numbers>

#include "teachdim/error.hpp"
#include "teachdim/lambert.hpp"
#include "teachdim/oracle.hpp"

using namespace teachdim;

// Frozen with mpmath at 40 digits (lambertw, and bisection on t / (1 + e^t)).
constexpr double kTauMax = 0.27846454276107379510935873902298;
constexpr double kTauArgmax = 1.27846454276107379510935873902298;
constexpr double kTauInv01 = 0.22526552881047887779723802785310;
constexpr double kTauInv02 = 0.54488044015998160620438468282021;
constexpr double kW700 = 4.95140829490515652715256735611202;
constexpr double kWm03 = -0.48940222718021493356502150257712;

TEST_CASE("lambert_w0 examples") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_w0(std::numbers::e) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lambert_w0(1.0 / std::numbers::e) == doctest::Approx(0.2785).epsilon(2e-4));
  CHECK(lambert_w0(700.0) == doctest::Approx(kW700).epsilon(1e-14));
  CHECK(lambert_w0(-0.3) == doctest::Approx(kWm03).epsilon(1e-14));
  CHECK(lambert_w0(-1.0 / std::numbers::e) == -1.0);
  CHECK_THROWS_AS(lambert_w0(-0.5), Error);
  // within the clamp guard of the branch point
  CHECK(lambert_w0(-1.0 / std::numbers::e - 5e-16) == -1.0);
}

TEST_CASE("lambert_w0 residual and monotonicity on a grid") {
  const double lo = -1.0 / std::numbers::e;
  double prev = -2.0;
  for (int i = 0; i <= 5000; ++i) {
    const double x = lo + (700.0 - lo) * std::pow(i / 5000.0, 3.0);
    const double w = lambert_w0(x);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-12 * std::max(1.0, std::abs(x)));
    CHECK(w >= prev);
    prev = w;
  }
}

TEST_CASE("tau_max") {
  CHECK(std::abs(tau_max() - 0.2785) <= 5e-5);
  CHECK(tau_max() == lambert_w0(std::exp(-1.0)));
  CHECK(tau_max() == doctest::Approx(kTauMax).epsilon(1e-15));
  CHECK(tau_argmax() == doctest::Approx(kTauArgmax).epsilon(1e-15));
  // golden-section maximization of t / (1 + e^t), independent of the lambert route
  auto g = [](double t) { return t / (1.0 + std::exp(t)); };
  double a = 0.0, b = 3.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    (g(c) > g(d) ? b : a) = (g(c) > g(d) ? d : c);
  }
  const double t_star = 0.5 * (a + b);
  CHECK(t_star == doctest::Approx(1.27846).epsilon(1e-5));
  CHECK(g(t_star) == doctest::Approx(tau_max()).epsilon(1e-14));
}

TEST_CASE("tau_inverse") {
  CHECK(tau_inverse(tau_max()) == doctest::Approx(kTauArgmax).epsilon(1e-12));
  CHECK(tau_inverse(0.1) == doctest::Approx(kTauInv01).epsilon(1e-13));
  CHECK(tau_inverse(0.2) == doctest::Approx(kTauInv02).epsilon(1e-13));
  CHECK(tau_inverse(1e-6) == doctest::Approx(2.000002000004e-6).epsilon(1e-10));
  const auto p = tau_point(0.15);
  CHECK(p.t / (1.0 + std::exp(p.t)) == doctest::Approx(0.15).epsilon(1e-14));
  CHECK_THROWS_AS(tau_inverse(0.0), Error);
  CHECK_THROWS_AS(tau_inverse(-0.1), Error);
  CHECK_THROWS_AS(tau_inverse(0.3), Error);
}

TEST_CASE("tau_inverse round trip and bisection agreement") {
  const double t_star = tau_inverse(tau_max());
  for (int k = 1; k <= 1000; ++k) {
    const double a = tau_max() * k / 1000.0;
    const double t = tau_inverse(a);
    CHECK(std::abs(t / (1.0 + std::exp(t)) - a) <= 1e-10);
    CHECK(t > 0.0);
    CHECK(t <= t_star);
    CHECK(std::abs(t - tau_inverse_bisection(a)) <= 1e-9);
  }
}
