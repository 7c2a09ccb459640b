#include "teachdim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "teachdim/error.hpp"

namespace teachdim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kPerturbations[] = {1e-2, 1e-1};
constexpr double kStrictIncrease = 1e-12;
constexpr double kBoundaryExclusion = 1e-9;

std::uint64_t restart_seed(std::uint64_t base, std::uint64_t i) {
  return base + 0x9E3779B97F4A7C15ULL * (i + 1);
}

Eigen::Index feature_dim_of(const LearnerSpec& spec, const Vector& theta) {
  return spec.homogeneous() ? theta.size() : theta.size() - 1;
}

class Checks {
 public:
  Checks(VerifyReport& report, bool short_circuit) : report_(report), short_circuit_(short_circuit) {}

  // False once a check has failed in short-circuit mode.
  bool open() const { return !(short_circuit_ && failed_); }

  void record(std::string name, double value, double tol, bool ok, std::string note = {}) {
    report_.details.push_back({std::move(name), value, tol, true, ok, std::move(note)});
    failed_ = failed_ || !ok;
  }

  void skip(std::string name, double tol) {
    report_.details.push_back({std::move(name), kNan, tol, false, false, "not evaluated"});
    failed_ = true;
  }

  bool failed() const { return failed_; }

 private:
  VerifyReport& report_;
  bool short_circuit_;
  bool failed_ = false;
};

}  // namespace

ProbeResult uniqueness_probe(const LearnerSpec& spec, std::span<const Example> items, const Vector& theta_star,
                             std::span<const std::uint64_t> seeds, const SolverConfig& config) {
  if (seeds.size() < 2) throw Error(errc::invalid_option, "uniqueness probe needs at least 2 restarts");
  const Eigen::Index d = feature_dim_of(spec, theta_star);
  ProbeResult out;
  std::vector<Vector> solutions;
  solutions.reserve(seeds.size());
  for (const std::uint64_t seed : seeds) {
    SolverConfig cfg = config;
    cfg.seed = seed;
    const SolveResult r = train(spec, items, d, cfg);
    if (!r.converged || !r.unique) {
      out.conclusive = false;
      continue;
    }
    solutions.push_back(r.theta);
  }
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    for (std::size_t j = i + 1; j < solutions.size(); ++j) {
      out.spread = std::max(out.spread, (solutions[i] - solutions[j]).norm());
    }
  }

  if (spec.loss() == LossKind::hinge && !spec.homogeneous()) {
    const double base = objective(spec, items, theta_star);
    double smallest = std::numeric_limits<double>::infinity();
    for (const double eps : kPerturbations) {
      for (const double sign : {-1.0, 1.0}) {
        Vector moved = theta_star;
        moved[d] += sign * eps;
        smallest = std::min(smallest, objective(spec, items, moved) - base);
      }
    }
    out.bias_perturbation_increase = smallest;
  }
  return out;
}

ProbeResult uniqueness_probe(const LearnerSpec& spec, std::span<const Example> items, const Vector& theta_star,
                             int restarts, const SolverConfig& config) {
  if (restarts < 2) throw Error(errc::invalid_option, "uniqueness probe needs at least 2 restarts");
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(restarts));
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = restart_seed(config.seed, i);
  return uniqueness_probe(spec, items, theta_star, seeds, config);
}

VerifyReport verify_teaching_set(const LearnerSpec& spec, std::span<const Example> items,
                                 const TargetModel& target, const VerifyConfig& config) {
  validate_target(spec, target);
  if (target.goal != Goal::exact_parameter) {
    throw Error(errc::invalid_target, "verify_teaching_set needs an exact-parameter target");
  }
  const Vector theta_star = target.effective();
  const Eigen::Index d = target.dim();
  if (!items.empty() && feature_dim(items) != d) {
    throw Error(errc::dimension_mismatch, "training items do not match the target dimension");
  }
  const bool hinge = spec.loss() == LossKind::hinge;

  SolverConfig solver = config.solver;
  solver.init_radius = 2.0 * (1.0 + theta_star.norm());

  VerifyReport report;
  report.kkt_residual = report.recovery_distance = report.objective_gap = report.uniqueness_spread = kNan;
  Checks checks(report, config.short_circuit);

  // (a) first-order optimality of the target
  const double kkt_tol = hinge ? config.kkt_tol_hinge : config.kkt_tol_smooth;
  report.kkt_residual = kkt_residual(spec, items, theta_star, config.kkt);
  checks.record("kkt_residual", report.kkt_residual, kkt_tol, report.kkt_residual <= kkt_tol);

  // (b) recovery by independent training
  const double rec_tol = hinge ? config.recovery_tol_hinge : config.recovery_tol_smooth;
  if (checks.open()) {
    const SolveResult r = train(spec, items, d, solver);
    report.trained_theta = r.theta;
    report.recovery_distance = (r.theta - theta_star).norm();
    report.objective_gap = std::abs(r.objective_value - objective(spec, items, theta_star));
    std::string note;
    if (!r.converged) note = "solver did not converge";
    if (!r.unique) note = "solver reports a non-unique minimizer";
    checks.record("recovery_distance", report.recovery_distance, rec_tol,
                  r.converged && r.unique && report.recovery_distance <= rec_tol, note);
    if (hinge) {
      checks.record("objective_gap", report.objective_gap, config.objective_gap_tol_hinge,
                    report.objective_gap <= config.objective_gap_tol_hinge);
    }
  } else {
    checks.skip("recovery_distance", rec_tol);
    if (hinge) checks.skip("objective_gap", config.objective_gap_tol_hinge);
  }

  // (c) restart agreement
  const double uniq_tol = hinge ? config.uniqueness_tol_hinge : config.uniqueness_tol_smooth;
  if (checks.open()) {
    const ProbeResult probe = uniqueness_probe(spec, items, theta_star, std::max(2, config.restarts), solver);
    report.uniqueness_spread = probe.spread;
    checks.record("uniqueness_spread", probe.spread, uniq_tol, probe.conclusive && probe.spread <= uniq_tol,
                  probe.conclusive ? "" : "a restart did not converge");
    if (probe.bias_perturbation_increase) {
      const double inc = *probe.bias_perturbation_increase;
      checks.record("bias_perturbation_increase", inc, kStrictIncrease, inc > kStrictIncrease);
    }
  } else {
    checks.skip("uniqueness_spread", uniq_tol);
  }

  report.passed = !checks.failed();
  return report;
}

double boundary_agreement(const TargetModel& target, const Vector& theta, int probes, std::uint64_t seed) {
  const Eigen::Index d = target.dim();
  const double b_star = target.bias.value_or(0.0);
  const double w_norm = target.weights.norm();
  if (w_norm == 0.0) throw Error(errc::zero_target, "boundary agreement needs nonzero weights");
  const bool with_bias = theta.size() == d + 1;
  if (!with_bias && theta.size() != d) throw Error(errc::dimension_mismatch, "theta/target dimension");
  const Vector w = theta.head(d);
  const double b = with_bias ? theta[d] : 0.0;

  const double radius = 2.0 * (1.0 + std::abs(b_star) / w_norm);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-radius, radius);
  long counted = 0;
  long agree = 0;
  Vector x(d);
  for (int k = 0; k < probes; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) x[i] = unif(rng);
    const double reference = x.dot(target.weights) + b_star;
    if (std::abs(reference) / w_norm <= kBoundaryExclusion) continue;
    ++counted;
    if ((reference > 0.0) == (x.dot(w) + b > 0.0)) ++agree;
  }
  return counted == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(counted);
}

VerifyReport verify_construction(const LearnerSpec& spec, const TargetModel& target, const TeachingSet& set,
                                 const VerifyConfig& config, int boundary_probes) {
  validate_target(spec, target);
  if (target.goal == Goal::exact_parameter) return verify_teaching_set(spec, set.items, target, config);

  TargetModel scaled = target;
  scaled.goal = Goal::exact_parameter;
  scaled.weights *= set.scale_factor;
  if (scaled.bias) *scaled.bias *= set.scale_factor;
  VerifyReport report = verify_teaching_set(spec, set.items, scaled, config);
  if (report.trained_theta.size() > 0) {
    const double agreement = boundary_agreement(target, report.trained_theta, boundary_probes, config.solver.seed);
    report.boundary_agreement = agreement;
    report.details.push_back({"boundary_agreement", agreement, 1.0, true, agreement == 1.0, ""});
    report.passed = report.passed && agreement == 1.0;
  }
  return report;
}

}  // namespace teachdim
