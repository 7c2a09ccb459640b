#pragma once

// Independent checks: random falsification of sub-lower-bound teaching sets,
// a bisection route to tau^-1, and finite-difference gradient checks.

#include <cstdint>
#include <string>

#include "teachdim/model.hpp"
#include "teachdim/verify.hpp"

namespace teachdim {

struct FalsificationReport {
  long trials = 0;
  long size_tested = 0;
  long successes = 0;
  double box_radius = 0.0;
  std::uint64_t seed = 0;
  std::string sampled_region;
};

/// Samples `trials` random training sets of `size` items (x uniform in the
/// box, labels uniform over the loss's label set, regression targets uniform
/// in [-box_radius, box_radius]) and counts those that pass verification.
/// Requires size < lower_bound(spec, target).
FalsificationReport falsify_smaller_sets(const LearnerSpec& spec, const TargetModel& target, long size,
                                         long trials, double box_radius, std::uint64_t seed,
                                         const VerifyConfig& config = {});

/// Default sampling radius 5 (1 + ||theta*||).
double default_box_radius(const TargetModel& target);

/// Root of t / (1 + e^t) = a on (0, t*] by bisection to a 1e-12 bracket.
double tau_inverse_bisection(double a);

/// t* = argmax t / (1 + e^t), found by bisection on the derivative's sign.
double tau_argmax_bisection();

/// max |analytic - central difference (h = 1e-6)| over random (u, y).
/// Hinge samples within 1e-3 of the kink are skipped.
double finite_difference_grad_check(LossKind loss, int samples, std::uint64_t seed);

/// Central-difference gradient of the learner objective.
Vector finite_difference_objective_gradient(const LearnerSpec& spec, std::span<const Example> items,
                                            const Vector& theta, double h = 1e-6);

}  // namespace teachdim
