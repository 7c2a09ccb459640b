#include "teachdim/kkt.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <vector>

#include "teachdim/error.hpp"

namespace teachdim {

namespace {

Vector clamp(const Vector& g, const Vector& lo, const Vector& hi) { return g.cwiseMax(lo).cwiseMin(hi); }

Eigen::Index check_dims(const LearnerSpec& spec, std::span<const Example> items, const Vector& theta) {
  require_finite(theta, "theta");
  const Eigen::Index d = spec.homogeneous() ? theta.size() : theta.size() - 1;
  if (d < 1) throw Error(errc::dimension_mismatch, "theta too short for the learner");
  if (!items.empty() && feature_dim(items) != d) {
    throw Error(errc::dimension_mismatch, "items do not match the parameter dimension");
  }
  for (const auto& e : items) validate_label(spec.loss(), e.y);
  return d;
}

}  // namespace

Vector box_least_squares(const Matrix& v, const Vector& c, const Vector& lo, const Vector& hi,
                         int max_iterations, double tolerance, int* iterations) {
  const Eigen::Index m = v.cols();
  int used = 0;
  if (m == 0) {
    if (iterations) *iterations = 0;
    return Vector();
  }
  const Matrix gram = v.transpose() * v;
  const Vector vc = v.transpose() * c;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lipschitz = std::max(eig.eigenvalues().maxCoeff(), 1e-300);

  // Warm start from the clamped minimum-norm least-squares solution; exact for
  // the interior case.
  Vector g = clamp(v.completeOrthogonalDecomposition().solve(-c), lo, hi);
  auto residual = [&](const Vector& x) { return (v * x + c).norm(); };
  double best = residual(g);
  Vector best_g = g;

  Vector z = g;
  Vector prev = g;
  double momentum = 1.0;
  double last_obj = best;
  while (used < max_iterations && best > tolerance) {
    ++used;
    const Vector grad = gram * z + vc;
    const Vector next = clamp(z - grad / lipschitz, lo, hi);
    const double obj = residual(next);
    if (obj < best) {
      best = obj;
      best_g = next;
    }
    // Stationary: the box-constrained minimum is positive.
    if ((next - prev).lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, next.lpNorm<Eigen::Infinity>())) {
      break;
    }
    if (obj > last_obj) {
      // Adaptive restart of the momentum.
      momentum = 1.0;
      z = next;
    } else {
      const double nm = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      z = next + ((momentum - 1.0) / nm) * (next - prev);
      momentum = nm;
    }
    prev = next;
    last_obj = obj;
  }
  if (iterations) *iterations = used;
  return best_g;
}

KktCertificate kkt_certificate(const LearnerSpec& spec, std::span<const Example> items, const Vector& theta,
                               const KktOptions& opts) {
  const Eigen::Index d = check_dims(spec, items, theta);
  const Eigen::Index n = static_cast<Eigen::Index>(items.size());
  Vector c = spec.lambda() * (spec.effective_regularizer(d) * theta);

  KktCertificate cert;
  cert.multipliers = Vector::Zero(n);
  std::vector<Eigen::Index> free_idx;
  std::vector<SubgradientInterval> free_box;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Example& e = items[static_cast<std::size_t>(i)];
    const Vector v = effective_input(e.x, spec.homogeneous());
    const double u = v.dot(theta);
    SubgradientInterval box = loss_subdifferential(spec.loss(), u, e.y);
    if (spec.loss() == LossKind::hinge && std::abs(e.y * u - 1.0) <= opts.kink_tol) {
      box = {std::min(-e.y, 0.0), std::max(-e.y, 0.0)};
    }
    if (box.singleton()) {
      cert.multipliers[i] = box.lo;
      c += box.lo * v;
    } else {
      free_idx.push_back(i);
      free_box.push_back(box);
    }
  }

  if (!free_idx.empty()) {
    const auto m = static_cast<Eigen::Index>(free_idx.size());
    Matrix v(c.size(), m);
    Vector lo(m), hi(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const Example& e = items[static_cast<std::size_t>(free_idx[static_cast<std::size_t>(j)])];
      v.col(j) = effective_input(e.x, spec.homogeneous());
      lo[j] = free_box[static_cast<std::size_t>(j)].lo;
      hi[j] = free_box[static_cast<std::size_t>(j)].hi;
    }
    const Vector g = box_least_squares(v, c, lo, hi, opts.max_iterations, opts.tolerance, &cert.iterations);
    for (Eigen::Index j = 0; j < m; ++j) cert.multipliers[free_idx[static_cast<std::size_t>(j)]] = g[j];
    c += v * g;
  }
  cert.residual = c.norm();
  return cert;
}

double kkt_residual(const LearnerSpec& spec, std::span<const Example> items, const Vector& theta,
                    const KktOptions& opts) {
  return kkt_certificate(spec, items, theta, opts).residual;
}

}  // namespace teachdim
