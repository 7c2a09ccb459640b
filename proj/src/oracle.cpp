#include "teachdim/oracle.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "teachdim/bounds.hpp"
#include "teachdim/error.hpp"

namespace teachdim {

namespace {

double tau_curve(double t) { return t / (1.0 + std::exp(t)); }

}  // namespace

double default_box_radius(const TargetModel& target) { return 5.0 * (1.0 + target.effective().norm()); }

FalsificationReport falsify_smaller_sets(const LearnerSpec& spec, const TargetModel& target, long size,
                                         long trials, double box_radius, std::uint64_t seed,
                                         const VerifyConfig& config) {
  validate_target(spec, target);
  if (target.goal != Goal::exact_parameter) {
    throw Error(errc::invalid_target, "falsification needs an exact-parameter target");
  }
  if (trials < 1) throw Error(errc::invalid_option, "trials must be >= 1");
  if (size < 0) throw Error(errc::invalid_option, "size must be >= 0");
  if (!(box_radius > 0.0) || !std::isfinite(box_radius)) {
    throw Error(errc::invalid_option, "box_radius must be positive");
  }
  const long bound = lower_bound(spec, target);
  if (size >= bound) {
    throw Error(errc::vacuous_experiment,
                "size " + std::to_string(size) + " is not below the lower bound " + std::to_string(bound));
  }

  const Eigen::Index d = target.dim();
  FalsificationReport rep;
  rep.trials = trials;
  rep.size_tested = size;
  rep.box_radius = box_radius;
  rep.seed = seed;
  std::ostringstream region;
  region << "x ~ U[-" << box_radius << ", " << box_radius << "]^" << d << "; ";
  if (is_classification(spec.loss())) {
    region << "y ~ U{-1, +1}";
  } else {
    region << "y ~ U[-" << box_radius << ", " << box_radius << "]";
  }
  rep.sampled_region = region.str();

  std::vector<Example> items(static_cast<std::size_t>(size));
  for (long trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(trial));
    std::uniform_real_distribution<double> unif(-box_radius, box_radius);
    std::bernoulli_distribution coin(0.5);
    for (auto& item : items) {
      item.x.resize(d);
      for (Eigen::Index i = 0; i < d; ++i) item.x[i] = unif(rng);
      item.y = is_classification(spec.loss()) ? (coin(rng) ? 1.0 : -1.0) : unif(rng);
    }
    VerifyConfig cfg = config;
    cfg.solver.seed = seed + static_cast<std::uint64_t>(trial);
    if (verify_teaching_set(spec, items, target, cfg).passed) ++rep.successes;
  }
  return rep;
}

double tau_argmax_bisection() {
  // sign of d/dt [t / (1 + e^t)] is the sign of 1 + e^t (1 - t)
  double lo = 0.0;
  double hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (1.0 + std::exp(mid) * (1.0 - mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double tau_inverse_bisection(double a) {
  static const double t_star = tau_argmax_bisection();
  const double top = tau_curve(t_star);
  if (!(a > 0.0) || a > top + 1e-15) {
    throw Error(errc::domain_error, "tau_inverse_bisection requires 0 < a <= tau_max");
  }
  // At the top of the curve the root is a double root.
  if (a >= top - 1e-15) return t_star;
  double lo = 0.0;
  double hi = t_star;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (tau_curve(mid) < a) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double finite_difference_grad_check(LossKind loss, int samples, std::uint64_t seed) {
  constexpr double h = 1e-6;
  constexpr double kink_gap = 1e-3;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  std::bernoulli_distribution coin(0.5);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double u = unif(rng);
    const double y = is_classification(loss) ? (coin(rng) ? 1.0 : -1.0) : unif(rng);
    if (loss == LossKind::hinge && std::abs(1.0 - y * u) <= kink_gap) continue;
    const double fd = (loss_value(loss, u + h, y) - loss_value(loss, u - h, y)) / (2.0 * h);
    const SubgradientInterval sub = loss_subdifferential(loss, u, y);
    worst = std::max(worst, std::abs(sub.lo - fd));
  }
  return worst;
}

Vector finite_difference_objective_gradient(const LearnerSpec& spec, std::span<const Example> items,
                                            const Vector& theta, double h) {
  Vector g(theta.size());
  Vector probe = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + h;
    const double up = objective(spec, items, probe);
    probe[i] = theta[i] - h;
    const double down = objective(spec, items, probe);
    probe[i] = theta[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace teachdim
