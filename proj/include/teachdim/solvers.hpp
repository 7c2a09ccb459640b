#pragma once

// Independent training routes for the three learners:
//   ridge     closed-form regularized normal equations
//   logistic  damped Newton
//   svm       averaged subgradient descent, refined by an active-set solve of
//             the margin equations and accepted on a KKT certificate

#include <cstdint>
#include <optional>
#include <span>

#include "teachdim/kkt.hpp"
#include "teachdim/model.hpp"

namespace teachdim {

struct SolverConfig {
  /// Defaults: 200000 subgradient steps (svm) / 100 Newton steps (logistic).
  std::optional<long> max_iterations;
  /// Defaults: 1e-10 relative gradient norm (logistic) / 1e-10 relative KKT
  /// residual for accepting a refined svm solution.
  std::optional<double> tolerance;
  /// Subgradient step is step_constant / sqrt(k).
  double step_constant = 1.0;
  std::uint64_t seed = 0x7e4c4d1aULL;
  /// Starting point drawn uniformly from [-R, R]^p.
  double init_radius = 10.0;
  /// Active-set refinement of the averaged svm iterate. Off: plain averaged
  /// subgradient descent.
  bool polish = true;
  KktOptions kkt;

  long max_iterations_for(LossKind loss) const;
  double tolerance_for(LossKind loss) const;
};

struct SolveResult {
  Vector theta;  // effective form
  double objective_value = 0.0;
  long iterations = 0;
  bool converged = false;
  /// False when the solver detected a non-unique minimizer (singular ridge
  /// system, or an unregularized bias without data).
  bool unique = true;
};

SolveResult solve_ridge(const LearnerSpec& spec, std::span<const Example> items, Eigen::Index dim);
SolveResult solve_logistic(const LearnerSpec& spec, std::span<const Example> items, Eigen::Index dim,
                           const SolverConfig& config = {});
SolveResult solve_svm(const LearnerSpec& spec, std::span<const Example> items, Eigen::Index dim,
                      const SolverConfig& config = {});

/// Routes to the loss-specific solver. `dim` is the feature dimension d.
SolveResult train(const LearnerSpec& spec, std::span<const Example> items, Eigen::Index dim,
                  const SolverConfig& config = {});

/// Uniform draw from [-radius, radius]^p seeded deterministically.
Vector random_start(Eigen::Index p, double radius, std::uint64_t seed);

}  // namespace teachdim
