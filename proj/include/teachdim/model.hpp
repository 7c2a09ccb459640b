#pragma once

// Learner family: minimize  sum_i loss(x_i, y_i; theta) + (lambda/2) ||w||_A^2
// over theta = w (homogeneous) or theta = [w; b] (inhomogeneous, b unregularized).
//
// Parameters are passed around in their "effective" form: a vector of length d
// for homogeneous learners and d + 1 (bias last) for inhomogeneous ones.

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace teachdim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Symmetric positive semidefinite matrix, validated on construction.
class PsdMatrix {
 public:
  explicit PsdMatrix(Matrix m);

  static PsdMatrix identity(Eigen::Index d);

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  bool is_identity() const;

 private:
  Matrix m_;
};

enum class LossKind { squared, hinge, logistic };

std::string to_string(LossKind loss);
LossKind parse_loss(const std::string& name);

inline bool is_classification(LossKind loss) { return loss != LossKind::squared; }

class LearnerSpec {
 public:
  LearnerSpec(LossKind loss, bool homogeneous, double lambda,
              std::optional<PsdMatrix> regularizer = std::nullopt);

  LossKind loss() const noexcept { return loss_; }
  bool homogeneous() const noexcept { return homogeneous_; }
  double lambda() const noexcept { return lambda_; }
  const std::optional<PsdMatrix>& regularizer() const noexcept { return regularizer_; }

  /// True when no regularizer was given or the given one is the identity.
  bool identity_regularizer() const;

  /// A for the weights (identity when absent). Throws on dimension mismatch.
  Matrix weight_regularizer(Eigen::Index d) const;
  /// A padded with a zero row/column for the bias in the inhomogeneous case.
  Matrix effective_regularizer(Eigen::Index d) const;

  Eigen::Index effective_dim(Eigen::Index d) const { return homogeneous_ ? d : d + 1; }

 private:
  LossKind loss_;
  bool homogeneous_;
  double lambda_;
  std::optional<PsdMatrix> regularizer_;
};

enum class Goal { exact_parameter, decision_boundary };

struct TargetModel {
  Vector weights;
  std::optional<double> bias;  // present iff the learner is inhomogeneous
  Goal goal = Goal::exact_parameter;

  Eigen::Index dim() const { return weights.size(); }
  /// theta* in effective form ([w*; b*] when a bias is present).
  Vector effective() const;
};

/// Checks the target against the learner (bias presence, finiteness, goal).
void validate_target(const LearnerSpec& spec, const TargetModel& target);

struct Example {
  Vector x;
  double y = 0.0;
};

struct TeachingSet {
  std::vector<Example> items;
  std::string provenance;
  double scale_factor = 1.0;

  std::size_t size() const { return items.size(); }
};

struct SubgradientInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double g) const { return lo <= g && g <= hi; }
  bool singleton() const { return lo == hi; }
};

void validate_label(LossKind loss, double y);
void require_finite(const Vector& v, const char* what);

/// x in effective form: x itself, or [x; 1] for inhomogeneous learners.
Vector effective_input(const Vector& x, bool homogeneous);

double mahalanobis_norm_sq(const Vector& v, const PsdMatrix& a);

/// Number of eigenvalues above rel_tol times the largest eigenvalue.
int rank(const PsdMatrix& a, double rel_tol = 1e-10);

/// u is the prediction x'theta; classification losses are evaluated at y*u.
double loss_value(LossKind loss, double u, double y);

/// Subdifferential of the loss w.r.t. the prediction u.
SubgradientInterval loss_subdifferential(LossKind loss, double u, double y);

/// Derivative for smooth losses; for the hinge, the left-continuous choice
/// (-y when y*u <= 1, else 0). Used by the solvers as a subgradient.
double loss_derivative(LossKind loss, double u, double y);

double objective(const LearnerSpec& spec, std::span<const Example> items, const Vector& theta);

/// Feature dimension d shared by the items; throws on inconsistency.
Eigen::Index feature_dim(std::span<const Example> items);

}  // namespace teachdim
