#include "teachdim/construct.hpp"

#include <algorithm>
#include <cmath>

#include "teachdim/bounds.hpp"
#include "teachdim/error.hpp"
#include "teachdim/lambert.hpp"

namespace teachdim {

namespace {

constexpr double kOrthogonalityTol = 1e-10;
constexpr double kBoundaryScaleSlack = 1e-12;

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(errc::invalid_lambda, "lambda must be a positive finite number");
  }
}

void require_nonzero(const Vector& w, const char* what) {
  require_finite(w, what);
  if (w.size() < 1) throw Error(errc::invalid_target, std::string(what) + " must have dimension >= 1");
  if (w.isZero(0.0)) throw Error(errc::zero_target, std::string(what) + " must be nonzero");
}

void require_scale(double a) {
  if (a == 0.0 || !std::isfinite(a)) throw Error(errc::invalid_option, "scale_a must be a nonzero finite number");
}

Vector offset_for(const Vector& w_star, const ConstructionOptions& opts) {
  if (!opts.orthogonal_offset) return Vector::Zero(w_star.size());
  const Vector& u = *opts.orthogonal_offset;
  if (u.size() != w_star.size()) throw Error(errc::dimension_mismatch, "orthogonal_offset dimension");
  require_finite(u, "orthogonal_offset");
  if (std::abs(u.dot(w_star)) > kOrthogonalityTol * u.norm() * w_star.norm()) {
    throw Error(errc::invalid_option, "orthogonal_offset must be orthogonal to w*");
  }
  return u;
}

long item_count(double z) { return std::max(1L, guarded_ceil(z)); }

TeachingSet symmetric_pair_set(const Vector& x_pos, const Vector& x_neg, long half, const char* prov) {
  TeachingSet set;
  set.provenance = prov;
  set.items.reserve(static_cast<std::size_t>(2 * half));
  for (long i = 0; i < half; ++i) set.items.push_back({x_pos, 1.0});
  for (long i = 0; i < half; ++i) set.items.push_back({x_neg, -1.0});
  return set;
}

}  // namespace

TeachingSet teach_hom_ridge(const Vector& theta_star, double lambda, const ConstructionOptions& opts) {
  require_lambda(lambda);
  require_scale(opts.scale_a);
  require_finite(theta_star, "theta*");
  TeachingSet set;
  set.provenance = provenance::hom_ridge;
  if (theta_star.isZero(0.0)) return set;
  const double a = opts.scale_a;
  Vector x = a * theta_star;
  const double y = (lambda + x.squaredNorm()) / a;
  set.items.push_back({std::move(x), y});
  return set;
}

TeachingSet teach_hom_svm(const Vector& theta_star, double lambda) {
  require_lambda(lambda);
  require_nonzero(theta_star, "theta*");
  const long n = item_count(lambda * theta_star.squaredNorm());
  const Vector x = lambda * theta_star / static_cast<double>(n);
  TeachingSet set;
  set.provenance = provenance::hom_svm;
  set.items.assign(static_cast<std::size_t>(n), Example{x, 1.0});
  return set;
}

TeachingSet teach_hom_logistic(const Vector& theta_star, double lambda) {
  require_lambda(lambda);
  require_nonzero(theta_star, "theta*");
  const double s = theta_star.squaredNorm();
  const long n = item_count(lambda * s / tau_max());
  const double arg = std::min(lambda * s / static_cast<double>(n), tau_max());
  const Vector x = tau_inverse(arg) * theta_star / s;
  TeachingSet set;
  set.provenance = provenance::hom_logistic;
  set.items.assign(static_cast<std::size_t>(n), Example{x, 1.0});
  return set;
}

TeachingSet teach_inhom_ridge(const Vector& w_star, double b_star, double lambda,
                              const ConstructionOptions& opts) {
  require_lambda(lambda);
  require_scale(opts.scale_a);
  require_finite(w_star, "w*");
  if (!std::isfinite(b_star)) throw Error(errc::non_finite, "b* is not finite");
  TeachingSet set;
  set.provenance = provenance::inhom_ridge;
  if (w_star.isZero(0.0)) {
    set.items.push_back({Vector::Zero(w_star.size()), b_star});
    return set;
  }
  const double a = opts.scale_a;
  const Vector x1 = 0.5 * a * w_star;
  const Vector x2 = x1 - a * w_star;
  const double y1 = x1.dot(w_star) + b_star + lambda / a;
  const double y2 = y1 - a * w_star.squaredNorm() - 2.0 * lambda / a;
  set.items.push_back({x1, y1});
  set.items.push_back({x2, y2});
  return set;
}

TeachingSet teach_inhom_svm(const Vector& w_star, double b_star, double lambda,
                            const ConstructionOptions& opts) {
  require_lambda(lambda);
  require_nonzero(w_star, "w*");
  if (!std::isfinite(b_star)) throw Error(errc::non_finite, "b* is not finite");
  const Vector offset = offset_for(w_star, opts);
  const double s = w_star.squaredNorm();
  const long half = item_count(lambda * s / 2.0);
  const Vector x_pos = ((1.0 - b_star) / s) * w_star + offset;
  const Vector x_neg = x_pos - (2.0 / s) * w_star;
  return symmetric_pair_set(x_pos, x_neg, half, provenance::inhom_svm);
}

TeachingSet teach_inhom_logistic(const Vector& w_star, double b_star, double lambda,
                                 const ConstructionOptions& opts) {
  require_lambda(lambda);
  require_nonzero(w_star, "w*");
  if (!std::isfinite(b_star)) throw Error(errc::non_finite, "b* is not finite");
  const Vector offset = offset_for(w_star, opts);
  const double s = w_star.squaredNorm();
  const double z = lambda * s / tau_max();
  const long half = item_count(z / 2.0);
  const double arg = std::min(lambda * s / static_cast<double>(2 * half), tau_max());
  const double t = tau_inverse(arg);
  const Vector x_pos = ((t - b_star) / s) * w_star + offset;
  const Vector x_neg = x_pos - (2.0 * t / s) * w_star;
  return symmetric_pair_set(x_pos, x_neg, half, provenance::inhom_logistic);
}

double boundary_scale(const LearnerSpec& spec, const TargetModel& target) {
  if (!is_classification(spec.loss())) {
    throw Error(errc::boundary_unsupported, "decision boundaries are defined for svm and logistic only");
  }
  require_nonzero(target.weights, "target weights");
  const double root_lambda_norm = std::sqrt(spec.lambda()) * target.weights.norm();
  const double margin_budget = spec.loss() == LossKind::hinge ? 1.0 : tau_max();
  const double pairs = spec.homogeneous() ? 1.0 : 2.0;
  return std::sqrt(pairs * margin_budget) / root_lambda_norm;
}

TeachingSet teach(const LearnerSpec& spec, const TargetModel& target, const ConstructionOptions& opts) {
  validate_target(spec, target);
  if (!spec.identity_regularizer()) {
    throw Error(errc::non_identity_regularizer, "teaching-set constructions require A = I");
  }

  TargetModel goal_target = target;
  double scale = 1.0;
  if (target.goal == Goal::decision_boundary) {
    const double limit = boundary_scale(spec, target);
    scale = opts.boundary_scale.value_or(limit);
    if (!(scale > 0.0) || scale > limit * (1.0 + kBoundaryScaleSlack)) {
      throw Error(errc::invalid_option, "boundary_scale must lie in (0, " + std::to_string(limit) + "]");
    }
    goal_target.weights *= scale;
    if (goal_target.bias) *goal_target.bias *= scale;
  }

  const Vector& w = goal_target.weights;
  const double lam = spec.lambda();
  TeachingSet set;
  if (spec.homogeneous()) {
    if (w.isZero(0.0)) {
      // Rank(A) = d: the regularizer alone pins theta* = 0.
      set.provenance = provenance::empty;
    } else {
      switch (spec.loss()) {
        case LossKind::squared: set = teach_hom_ridge(w, lam, opts); break;
        case LossKind::hinge: set = teach_hom_svm(w, lam); break;
        case LossKind::logistic: set = teach_hom_logistic(w, lam); break;
      }
    }
  } else {
    const double b = *goal_target.bias;
    switch (spec.loss()) {
      case LossKind::squared: set = teach_inhom_ridge(w, b, lam, opts); break;
      case LossKind::hinge: set = teach_inhom_svm(w, b, lam, opts); break;
      case LossKind::logistic: set = teach_inhom_logistic(w, b, lam, opts); break;
    }
  }
  set.scale_factor = scale;
  return set;
}

}  // namespace teachdim
