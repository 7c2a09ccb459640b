#pragma once

// Minimal teaching-set constructions for ridge, SVM and logistic regression,
// homogeneous and inhomogeneous, with A = I.

#include <optional>

#include "teachdim/model.hpp"

namespace teachdim {

struct ConstructionOptions {
  /// Free nonzero scale of the ridge constructions.
  double scale_a = 1.0;
  /// Component added to x+ (and therefore x-) in the inhomogeneous svm and
  /// logistic constructions; must be orthogonal to w*.
  std::optional<Vector> orthogonal_offset;
  /// Scale t for decision-boundary teaching; at most boundary_scale().
  std::optional<double> boundary_scale;
};

namespace provenance {
inline constexpr const char* hom_ridge = "hom_ridge";
inline constexpr const char* hom_svm = "hom_svm";
inline constexpr const char* hom_logistic = "hom_logistic";
inline constexpr const char* inhom_ridge = "inhom_ridge";
inline constexpr const char* inhom_svm = "inhom_svm";
inline constexpr const char* inhom_logistic = "inhom_logistic";
inline constexpr const char* empty = "zero_target";
}  // namespace provenance

/// One item (a theta*, (lambda + a^2 ||theta*||^2) / a); empty when theta* = 0.
TeachingSet teach_hom_ridge(const Vector& theta_star, double lambda, const ConstructionOptions& opts = {});

/// ceil(lambda ||theta*||^2) copies of (lambda theta* / n, +1).
TeachingSet teach_hom_svm(const Vector& theta_star, double lambda);

/// ceil(lambda ||theta*||^2 / tau_max) copies of (tau^-1(lambda ||theta*||^2 / n) theta* / ||theta*||^2, +1).
TeachingSet teach_hom_logistic(const Vector& theta_star, double lambda);

/// Two items with x1 - x2 = a w* (x1 = a w* / 2), or (0, b*) when w* = 0.
TeachingSet teach_inhom_ridge(const Vector& w_star, double b_star, double lambda,
                              const ConstructionOptions& opts = {});

/// n = 2 ceil(lambda ||w*||^2 / 2): n/2 copies of (x+, +1) and n/2 of (x-, -1)
/// with margins exactly +1 and -1 at [w*; b*].
TeachingSet teach_inhom_svm(const Vector& w_star, double b_star, double lambda,
                            const ConstructionOptions& opts = {});

/// n = 2 ceil(lambda ||w*||^2 / (2 tau_max)), margins +-t with
/// t = tau^-1(lambda ||w*||^2 / n).
TeachingSet teach_inhom_logistic(const Vector& w_star, double b_star, double lambda,
                                 const ConstructionOptions& opts = {});

/// Largest t for which t * theta* has decision-boundary TD 1 (homogeneous)
/// or 2 (inhomogeneous).
double boundary_scale(const LearnerSpec& spec, const TargetModel& target);

/// Dispatches on the learner; decision-boundary targets are scaled first and
/// the scale recorded in TeachingSet::scale_factor.
TeachingSet teach(const LearnerSpec& spec, const TargetModel& target, const ConstructionOptions& opts = {});

}  // namespace teachdim
