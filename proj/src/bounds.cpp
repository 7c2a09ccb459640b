#include "teachdim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "teachdim/construct.hpp"
#include "teachdim/error.hpp"
#include "teachdim/lambert.hpp"

namespace teachdim {

namespace {

constexpr double kCeilNudge = 1e-12;
constexpr double kNonzeroTol = 1e-10;

bool full_rank(const Matrix& a) { return rank(PsdMatrix(a)) == a.rows(); }

// ceil for quantities known to be strictly positive: never below 1.
long positive_ceil(double z) { return std::max(1L, guarded_ceil(z)); }

// Decision-boundary targets are bounded through the scaled representative
// t * theta* that the constructions teach.
TargetModel bounded_representative(const LearnerSpec& spec, const TargetModel& target) {
  if (target.goal != Goal::decision_boundary) return target;
  const double t = boundary_scale(spec, target);
  TargetModel scaled = target;
  scaled.weights *= t;
  if (scaled.bias) *scaled.bias *= t;
  scaled.goal = Goal::exact_parameter;
  return scaled;
}

}  // namespace

long guarded_ceil(double z) {
  if (!std::isfinite(z)) throw Error(errc::domain_error, "ceiling of a non-finite value");
  return static_cast<long>(std::ceil(z - kCeilNudge * std::max(1.0, std::abs(z))));
}

double sup_coefficient(LossKind loss, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw Error(errc::domain_error, "sup coefficient needs s > 0");
  switch (loss) {
    case LossKind::hinge: return 1.0 / s;
    case LossKind::logistic: return tau_max() / s;
    case LossKind::squared: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

long lb1(const LearnerSpec& spec, const TargetModel& target) {
  validate_target(spec, target);
  const Matrix a = spec.effective_regularizer(target.dim());
  const Vector theta = target.effective();
  const long d_eff = static_cast<long>(theta.size());
  const long r = rank(PsdMatrix(a));
  const double a_norm = a.norm();
  const bool moves = (a * theta).norm() > kNonzeroTol * a_norm * theta.norm() && a_norm > 0.0;
  return d_eff - r + (moves ? 1 : 0);
}

long lb2(const LearnerSpec& spec, const TargetModel& original) {
  validate_target(spec, original);
  const TargetModel target = bounded_representative(spec, original);
  // Inhomogeneous: the padded regularizer is rank deficient.
  if (!spec.homogeneous()) return 0;
  const Matrix a = spec.weight_regularizer(target.dim());
  if (!full_rank(a) || target.weights.isZero(0.0)) return 0;
  const double s = mahalanobis_norm_sq(target.weights, PsdMatrix(a));
  const double sup = sup_coefficient(spec.loss(), s);
  if (std::isinf(sup)) return 0;
  return positive_ceil(spec.lambda() / sup);
}

std::optional<long> lb3(const LearnerSpec& spec, const TargetModel& original) {
  validate_target(spec, original);
  const TargetModel target = bounded_representative(spec, original);
  if (spec.homogeneous() || !is_classification(spec.loss())) return std::nullopt;
  const Matrix a = spec.weight_regularizer(target.dim());
  if (!full_rank(a) || target.weights.isZero(0.0)) return std::nullopt;
  const double s = mahalanobis_norm_sq(target.weights, PsdMatrix(a));
  return positive_ceil(spec.lambda() / sup_coefficient(spec.loss(), s));
}

long lower_bound(const LearnerSpec& spec, const TargetModel& target) {
  long best = std::max(lb1(spec, target), lb2(spec, target));
  if (const auto b3 = lb3(spec, target)) best = std::max(best, *b3);
  return best;
}

TdValue td_formula(const LearnerSpec& spec, const TargetModel& target) {
  validate_target(spec, target);
  if (!spec.identity_regularizer()) {
    throw Error(errc::non_identity_regularizer, "closed-form TD is only known for A = I");
  }
  const bool zero_w = target.weights.isZero(0.0);
  const LossKind loss = spec.loss();

  if (target.goal == Goal::decision_boundary) {
    return spec.homogeneous() ? TdValue{1, 1} : TdValue{2, 2};
  }

  const double s = target.weights.squaredNorm();
  const double lam = spec.lambda();
  if (spec.homogeneous()) {
    if (zero_w) return {0, 0};
    switch (loss) {
      case LossKind::squared: return {1, 1};
      case LossKind::hinge: {
        const long n = positive_ceil(lam * s);
        return {n, n};
      }
      case LossKind::logistic: {
        const long n = positive_ceil(lam * s / tau_max());
        return {n, n};
      }
    }
  }

  if (loss == LossKind::squared) return zero_w ? TdValue{1, 1} : TdValue{2, 2};
  if (zero_w) {
    throw Error(errc::zero_target, "inhomogeneous svm/logistic teaching needs w* != 0");
  }
  const double z = loss == LossKind::hinge ? lam * s : lam * s / tau_max();
  // LB1 = 2 also binds: the interval collapses to {2} when z <= 1.
  return {std::max(2L, positive_ceil(z)), 2 * positive_ceil(z / 2.0)};
}

BoundReport bound_report(const LearnerSpec& spec, const TargetModel& target) {
  BoundReport r;
  r.lb1 = lb1(spec, target);
  r.lb2 = lb2(spec, target);
  r.lb3 = lb3(spec, target);
  r.combined = lower_bound(spec, target);
  if (spec.identity_regularizer()) {
    const bool inhom_margin_zero =
        !spec.homogeneous() && is_classification(spec.loss()) && target.weights.isZero(0.0);
    if (!inhom_margin_zero) r.td = td_formula(spec, target);
  }
  return r;
}

}  // namespace teachdim
