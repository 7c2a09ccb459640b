#pragma once

// Certifies that a training set teaches a target: KKT membership at the
// target, recovery by independent training, and agreement of randomly
// restarted solves (plus a bias-perturbation witness for the inhomogeneous SVM).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "teachdim/kkt.hpp"
#include "teachdim/model.hpp"
#include "teachdim/solvers.hpp"

namespace teachdim {

struct VerifyConfig {
  double kkt_tol_smooth = 1e-9;
  double kkt_tol_hinge = 1e-8;
  double recovery_tol_smooth = 1e-6;
  double recovery_tol_hinge = 1e-3;
  double objective_gap_tol_hinge = 1e-6;
  double uniqueness_tol_smooth = 1e-6;
  double uniqueness_tol_hinge = 1e-3;
  int restarts = 4;
  /// Stop after the first failed check (the remaining ones are reported as
  /// not evaluated).
  bool short_circuit = true;
  KktOptions kkt;
  SolverConfig solver;
};

struct CheckRecord {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool evaluated = false;
  bool passed = false;
  std::string note;
};

struct VerifyReport {
  double kkt_residual = 0.0;
  double recovery_distance = 0.0;
  double objective_gap = 0.0;
  double uniqueness_spread = 0.0;
  bool passed = false;
  std::vector<CheckRecord> details;
  /// Parameter returned by the recovery solve (empty if not evaluated).
  Vector trained_theta;
  /// Only for decision-boundary targets: fraction of random probes whose
  /// predicted sign matches the original boundary.
  std::optional<double> boundary_agreement;
};

struct ProbeResult {
  double spread = 0.0;
  /// Every restart converged (and reported a unique minimizer).
  bool conclusive = true;
  /// Inhomogeneous SVM only: smallest f(w*, b* +- eps) - f(w*, b*).
  std::optional<double> bias_perturbation_increase;
};

ProbeResult uniqueness_probe(const LearnerSpec& spec, std::span<const Example> items, const Vector& theta_star,
                             std::span<const std::uint64_t> seeds, const SolverConfig& config = {});

/// Restart seeds are derived from config.seed by counter.
ProbeResult uniqueness_probe(const LearnerSpec& spec, std::span<const Example> items, const Vector& theta_star,
                             int restarts, const SolverConfig& config = {});

/// `target` must be an exact-parameter target.
VerifyReport verify_teaching_set(const LearnerSpec& spec, std::span<const Example> items,
                                 const TargetModel& target, const VerifyConfig& config = {});

/// Verifies a constructed set against the target it was built for. For a
/// decision-boundary target the set teaches scale_factor * theta*, and the
/// report also carries the sign agreement with the original boundary.
VerifyReport verify_construction(const LearnerSpec& spec, const TargetModel& target, const TeachingSet& set,
                                 const VerifyConfig& config = {}, int boundary_probes = 1000);

/// Fraction of `probes` random points (uniform in a box around the target)
/// where sign(x'w + b) under `theta` matches the target boundary. Points within
/// 1e-9 (normalized distance) of the target boundary are skipped.
double boundary_agreement(const TargetModel& target, const Vector& theta, int probes, std::uint64_t seed);

}  // namespace teachdim
