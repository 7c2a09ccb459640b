#pragma once

// First-order optimality residual of the learner objective:
//
//   min_{g_i in d loss(u_i, y_i)} || sum_i g_i v_i + lambda A_eff theta ||_2
//
// with v_i = x_i (or [x_i; 1] with a bias). Smooth losses make this a direct
// gradient norm; the hinge leaves a box-constrained least-squares problem over
// the items sitting on the margin.

#include <span>

#include "teachdim/model.hpp"

namespace teachdim {

struct KktOptions {
  /// Hinge items with |y u - 1| <= kink_tol are treated as on the margin.
  double kink_tol = 1e-9;
  int max_iterations = 10000;
  /// Absolute residual at which projected gradient stops early.
  double tolerance = 1e-11;
};

struct KktCertificate {
  double residual = 0.0;
  Vector multipliers;  // one subgradient per item
  int iterations = 0;
};

KktCertificate kkt_certificate(const LearnerSpec& spec, std::span<const Example> items, const Vector& theta,
                               const KktOptions& opts = {});

double kkt_residual(const LearnerSpec& spec, std::span<const Example> items, const Vector& theta,
                    const KktOptions& opts = {});

/// min_{lo <= g <= hi} ||V g + c|| by accelerated projected gradient.
/// Returns the minimizer; `iterations` receives the count used.
Vector box_least_squares(const Matrix& v, const Vector& c, const Vector& lo, const Vector& hi,
                         int max_iterations, double tolerance, int* iterations = nullptr);

}  // namespace teachdim
