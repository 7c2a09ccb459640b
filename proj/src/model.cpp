#include "teachdim/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "teachdim/error.hpp"

namespace teachdim {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-10;

std::string dims(Eigen::Index a, Eigen::Index b) {
  return std::to_string(a) + " vs " + std::to_string(b);
}

}  // namespace

PsdMatrix::PsdMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw Error(errc::invalid_matrix, "regularizer must be a non-empty square matrix");
  }
  if (!m_.allFinite()) throw Error(errc::non_finite, "regularizer has non-finite entries");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw Error(errc::invalid_matrix, "regularizer is not symmetric");
  }
  m_ = 0.5 * (m_ + m_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m_, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  if (ev.minCoeff() < -kPsdTol * largest) {
    throw Error(errc::invalid_matrix, "regularizer is not positive semidefinite");
  }
}

PsdMatrix PsdMatrix::identity(Eigen::Index d) { return PsdMatrix(Matrix::Identity(d, d)); }

bool PsdMatrix::is_identity() const {
  return (m_ - Matrix::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff() <= kSymmetryTol;
}

std::string to_string(LossKind loss) {
  switch (loss) {
    case LossKind::squared: return "ridge";
    case LossKind::hinge: return "svm";
    case LossKind::logistic: return "logistic";
  }
  return "unknown";
}

LossKind parse_loss(const std::string& name) {
  if (name == "ridge" || name == "squared") return LossKind::squared;
  if (name == "svm" || name == "hinge") return LossKind::hinge;
  if (name == "logistic") return LossKind::logistic;
  throw Error(errc::invalid_option, "unknown learner '" + name + "'");
}

LearnerSpec::LearnerSpec(LossKind loss, bool homogeneous, double lambda,
                         std::optional<PsdMatrix> regularizer)
    : loss_(loss), homogeneous_(homogeneous), lambda_(lambda), regularizer_(std::move(regularizer)) {
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
    throw Error(errc::invalid_lambda, "lambda must be a positive finite number");
  }
}

bool LearnerSpec::identity_regularizer() const {
  return !regularizer_ || regularizer_->is_identity();
}

Matrix LearnerSpec::weight_regularizer(Eigen::Index d) const {
  if (!regularizer_) return Matrix::Identity(d, d);
  if (regularizer_->dim() != d) {
    throw Error(errc::dimension_mismatch, "regularizer dimension " + dims(regularizer_->dim(), d));
  }
  return regularizer_->matrix();
}

Matrix LearnerSpec::effective_regularizer(Eigen::Index d) const {
  if (homogeneous_) return weight_regularizer(d);
  Matrix a = Matrix::Zero(d + 1, d + 1);
  a.topLeftCorner(d, d) = weight_regularizer(d);
  return a;
}

Vector TargetModel::effective() const {
  if (!bias) return weights;
  Vector theta(weights.size() + 1);
  theta << weights, *bias;
  return theta;
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw Error(errc::non_finite, std::string(what) + " has non-finite entries");
}

void validate_target(const LearnerSpec& spec, const TargetModel& target) {
  if (target.weights.size() < 1) throw Error(errc::invalid_target, "target dimension must be >= 1");
  require_finite(target.weights, "target weights");
  if (spec.homogeneous() && target.bias) {
    throw Error(errc::invalid_target, "homogeneous learner takes no bias");
  }
  if (!spec.homogeneous() && !target.bias) {
    throw Error(errc::invalid_target, "inhomogeneous learner requires a bias");
  }
  if (target.bias && !std::isfinite(*target.bias)) {
    throw Error(errc::non_finite, "target bias is not finite");
  }
  if (spec.regularizer() && spec.regularizer()->dim() != target.dim()) {
    throw Error(errc::dimension_mismatch,
                "regularizer dimension " + dims(spec.regularizer()->dim(), target.dim()));
  }
  if (target.goal == Goal::decision_boundary) {
    if (!is_classification(spec.loss())) {
      throw Error(errc::boundary_unsupported, "decision-boundary teaching needs svm or logistic");
    }
    if (target.weights.isZero(0.0)) {
      throw Error(errc::zero_target, "decision-boundary teaching needs nonzero weights");
    }
  }
}

void validate_label(LossKind loss, double y) {
  if (!std::isfinite(y)) throw Error(errc::invalid_label, "label is not finite");
  if (is_classification(loss) && y != 1.0 && y != -1.0) {
    throw Error(errc::invalid_label, "classification labels must be -1 or +1");
  }
}

Vector effective_input(const Vector& x, bool homogeneous) {
  if (homogeneous) return x;
  Vector v(x.size() + 1);
  v << x, 1.0;
  return v;
}

double mahalanobis_norm_sq(const Vector& v, const PsdMatrix& a) {
  if (v.size() != a.dim()) throw Error(errc::dimension_mismatch, "vector/matrix " + dims(v.size(), a.dim()));
  return std::max(0.0, v.dot(a.matrix() * v));
}

int rank(const PsdMatrix& a, double rel_tol) {
  if (!(rel_tol > 0.0)) throw Error(errc::invalid_option, "rank tolerance must be positive");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a.matrix(), Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  if (largest == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > rel_tol * largest) ++r;
  }
  return r;
}

double loss_value(LossKind loss, double u, double y) {
  validate_label(loss, y);
  switch (loss) {
    case LossKind::squared: return 0.5 * (u - y) * (u - y);
    case LossKind::hinge: return std::max(1.0 - y * u, 0.0);
    case LossKind::logistic: {
      const double m = y * u;
      return m >= 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    }
  }
  return 0.0;
}

SubgradientInterval loss_subdifferential(LossKind loss, double u, double y) {
  validate_label(loss, y);
  switch (loss) {
    case LossKind::squared: return {u - y, u - y};
    case LossKind::hinge: {
      const double m = y * u;
      if (m < 1.0) return {-y, -y};
      if (m > 1.0) return {0.0, 0.0};
      return {std::min(-y, 0.0), std::max(-y, 0.0)};
    }
    case LossKind::logistic: {
      const double g = loss_derivative(loss, u, y);
      return {g, g};
    }
  }
  return {};
}

double loss_derivative(LossKind loss, double u, double y) {
  switch (loss) {
    case LossKind::squared: return u - y;
    case LossKind::hinge: return y * u <= 1.0 ? -y : 0.0;
    case LossKind::logistic: {
      // -y * sigmoid(-y u), evaluated without overflow.
      const double m = y * u;
      if (m >= 0.0) {
        const double e = std::exp(-m);
        return -y * e / (1.0 + e);
      }
      return -y / (1.0 + std::exp(m));
    }
  }
  return 0.0;
}

Eigen::Index feature_dim(std::span<const Example> items) {
  if (items.empty()) return 0;
  const Eigen::Index d = items.front().x.size();
  for (const auto& e : items) {
    if (e.x.size() != d) throw Error(errc::dimension_mismatch, "items have inconsistent dimensions");
  }
  return d;
}

double objective(const LearnerSpec& spec, std::span<const Example> items, const Vector& theta) {
  require_finite(theta, "theta");
  const Eigen::Index d = spec.homogeneous() ? theta.size() : theta.size() - 1;
  if (d < 1) throw Error(errc::dimension_mismatch, "theta too short for the learner");
  if (!items.empty() && feature_dim(items) != d) {
    throw Error(errc::dimension_mismatch, "items/theta " + dims(feature_dim(items), d));
  }
  const auto w = theta.head(d);
  const double b = spec.homogeneous() ? 0.0 : theta[d];
  double total = 0.0;
  for (const auto& e : items) {
    total += loss_value(spec.loss(), e.x.dot(w) + b, e.y);
  }
  const Vector wv = w;
  return total + 0.5 * spec.lambda() * wv.dot(spec.weight_regularizer(d) * wv);
}

}  // namespace teachdim
