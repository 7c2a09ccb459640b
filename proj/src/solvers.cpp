#include "teachdim/solvers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <random>
#include <vector>

#include "teachdim/error.hpp"

namespace teachdim {

namespace {

constexpr long kSubgradientIterations = 200000;
constexpr long kNewtonIterations = 100;
constexpr double kSmoothTolerance = 1e-10;
constexpr double kHingeCertifyTolerance = 1e-10;
constexpr long kFirstCheckpoint = 1000;
constexpr int kMaxHalvings = 60;
constexpr double kMaxStepRatio = 10.0;

struct Design {
  Matrix v;  // n x p, rows are effective inputs
  Vector y;
  Matrix reg;  // lambda * A_eff
};

Design make_design(const LearnerSpec& spec, std::span<const Example> items, Eigen::Index dim) {
  if (dim < 1) throw Error(errc::dimension_mismatch, "feature dimension must be >= 1");
  if (!items.empty() && feature_dim(items) != dim) {
    throw Error(errc::dimension_mismatch, "items do not match the feature dimension");
  }
  const Eigen::Index p = spec.effective_dim(dim);
  Design des;
  des.v.resize(static_cast<Eigen::Index>(items.size()), p);
  des.y.resize(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) {
    validate_label(spec.loss(), items[i].y);
    require_finite(items[i].x, "item x");
    const auto row = static_cast<Eigen::Index>(i);
    des.v.row(row) = effective_input(items[i].x, spec.homogeneous()).transpose();
    des.y[row] = items[i].y;
  }
  des.reg = spec.lambda() * spec.effective_regularizer(dim);
  return des;
}

SolveResult empty_result(const LearnerSpec& spec, std::span<const Example> items, Eigen::Index dim) {
  SolveResult r;
  r.theta = Vector::Zero(spec.effective_dim(dim));
  r.objective_value = objective(spec, items, r.theta);
  r.converged = true;
  // Without data an unregularized bias is free.
  r.unique = spec.homogeneous() && rank(PsdMatrix(spec.weight_regularizer(dim))) == dim;
  return r;
}

// Objective value, gradient and Hessian of the logistic learner.
struct LogisticState {
  double f = 0.0;
  Vector grad;
  Matrix hess;
  double grad_scale = 0.0;
};

LogisticState logistic_state(const Design& des, const Vector& theta, bool with_hessian) {
  LogisticState s;
  const Vector u = des.v * theta;
  const Vector reg_theta = des.reg * theta;
  s.f = 0.5 * theta.dot(reg_theta);
  s.grad = reg_theta;
  s.grad_scale = reg_theta.norm();
  if (with_hessian) s.hess = des.reg;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double y = des.y[i];
    s.f += loss_value(LossKind::logistic, u[i], y);
    const double d1 = loss_derivative(LossKind::logistic, u[i], y);
    s.grad += d1 * des.v.row(i).transpose();
    s.grad_scale += std::abs(d1) * des.v.row(i).norm();
    if (with_hessian) {
      // sigma(m) (1 - sigma(m)) = |d1| (1 - |d1|)
      const double w = std::abs(d1) * (1.0 - std::abs(d1));
      s.hess.noalias() += w * des.v.row(i).transpose() * des.v.row(i);
    }
  }
  return s;
}

double logistic_value(const Design& des, const Vector& theta) {
  const Vector u = des.v * theta;
  double f = 0.5 * theta.dot(des.reg * theta);
  for (Eigen::Index i = 0; i < u.size(); ++i) f += loss_value(LossKind::logistic, u[i], des.y[i]);
  return f;
}

// Armijo backtracking by halving; 0 when no sufficient decrease is found.
double backtrack(const Design& des, const Vector& theta, const Vector& dir, double f, double decrement) {
  const double slack = 1e-14 * std::max(1.0, std::abs(f));
  double t = 1.0;
  for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
    if (logistic_value(des, theta + t * dir) <= f - 1e-4 * t * decrement + slack) return t;
  }
  return 0.0;
}

Vector hinge_subgradient(const Design& des, const Vector& theta) {
  Vector g = des.reg * theta;
  const Vector u = des.v * theta;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double d1 = loss_derivative(LossKind::hinge, u[i], des.y[i]);
    if (d1 != 0.0) g += d1 * des.v.row(i).transpose();
  }
  return g;
}

// Solves the equality-constrained QP obtained by fixing which items are
// inside (active), on, or beyond the margin:
//   min sum_{active} (1 - y_i v_i' theta) + 1/2 theta' R theta
//   s.t. y_i v_i' theta = 1 for items on the margin.
Vector solve_margin_system(const Design& des, const std::vector<int>& state) {
  const Eigen::Index p = des.v.cols();
  std::vector<Eigen::Index> on_margin;
  Vector pull = Vector::Zero(p);
  for (Eigen::Index i = 0; i < des.v.rows(); ++i) {
    if (state[static_cast<std::size_t>(i)] < 0) pull += des.y[i] * des.v.row(i).transpose();
    if (state[static_cast<std::size_t>(i)] == 0) on_margin.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(on_margin.size());
  Matrix k = Matrix::Zero(p + m, p + m);
  Vector rhs = Vector::Zero(p + m);
  k.topLeftCorner(p, p) = des.reg;
  rhs.head(p) = pull;
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Index i = on_margin[static_cast<std::size_t>(j)];
    const Vector row = des.y[i] * des.v.row(i).transpose();
    k.block(p + j, 0, 1, p) = row.transpose();
    k.block(0, p + j, p, 1) = -row;
    rhs[p + j] = 1.0;
  }
  return k.completeOrthogonalDecomposition().solve(rhs).head(p);
}

std::optional<Vector> refine_svm(const LearnerSpec& spec, std::span<const Example> items, const Design& des,
                                 const Vector& approx, const SolverConfig& config) {
  static constexpr double kBands[] = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-5, 1e-6};
  const Vector margins = des.y.cwiseProduct(des.v * approx);
  const double tol = config.tolerance_for(LossKind::hinge);
  std::vector<int> last;
  for (double band : kBands) {
    std::vector<int> state(static_cast<std::size_t>(margins.size()));
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
      const double gap = margins[i] - 1.0;
      state[static_cast<std::size_t>(i)] = gap < -band ? -1 : (gap > band ? 1 : 0);
    }
    if (state == last) continue;
    last = state;
    const Vector candidate = solve_margin_system(des, state);
    if (!candidate.allFinite()) continue;
    const double scale = std::max(1.0, (des.reg * candidate).norm());
    if (kkt_residual(spec, items, candidate, config.kkt) <= tol * scale) return candidate;
  }
  return std::nullopt;
}

}  // namespace

long SolverConfig::max_iterations_for(LossKind loss) const {
  if (max_iterations) {
    if (*max_iterations < 1) throw Error(errc::invalid_option, "max_iterations must be positive");
    return *max_iterations;
  }
  return loss == LossKind::hinge ? kSubgradientIterations : kNewtonIterations;
}

double SolverConfig::tolerance_for(LossKind loss) const {
  if (tolerance) {
    if (!(*tolerance > 0.0)) throw Error(errc::invalid_option, "tolerance must be positive");
    return *tolerance;
  }
  return loss == LossKind::hinge ? kHingeCertifyTolerance : kSmoothTolerance;
}

Vector random_start(Eigen::Index p, double radius, std::uint64_t seed) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(errc::invalid_option, "init_radius must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-radius, radius);
  Vector v(p);
  for (Eigen::Index i = 0; i < p; ++i) v[i] = unif(rng);
  return v;
}

SolveResult solve_ridge(const LearnerSpec& spec, std::span<const Example> items, Eigen::Index dim) {
  if (spec.loss() != LossKind::squared) throw Error(errc::invalid_option, "solve_ridge needs the squared loss");
  const Design des = make_design(spec, items, dim);
  const Matrix system = des.v.transpose() * des.v + des.reg;
  const Vector rhs = des.v.transpose() * des.y;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(1e-12);
  cod.compute(system);
  SolveResult r;
  r.theta = cod.solve(rhs);
  r.iterations = 1;
  r.converged = true;
  r.unique = cod.rank() == system.rows();
  r.objective_value = objective(spec, items, r.theta);
  return r;
}

SolveResult solve_logistic(const LearnerSpec& spec, std::span<const Example> items, Eigen::Index dim,
                           const SolverConfig& config) {
  if (spec.loss() != LossKind::logistic) throw Error(errc::invalid_option, "solve_logistic needs the logistic loss");
  const Design des = make_design(spec, items, dim);
  if (items.empty()) return empty_result(spec, items, dim);

  const long max_it = config.max_iterations_for(LossKind::logistic);
  const double tol = config.tolerance_for(LossKind::logistic);
  SolveResult r;
  Vector theta = random_start(des.v.cols(), config.init_radius, config.seed);
  LogisticState st = logistic_state(des, theta, true);
  long it = 0;
  for (; it < max_it; ++it) {
    if (st.grad.norm() <= tol * std::max(1.0, st.grad_scale)) break;
    Eigen::LDLT<Matrix> ldlt(st.hess);
    Vector newton = ldlt.info() == Eigen::Success ? Vector(ldlt.solve(-st.grad)) : Vector(-st.grad);
    // Saturated margins leave near-zero curvature; cap the step length.
    const double cap = kMaxStepRatio * (1.0 + theta.norm());
    if (newton.norm() > cap) newton *= cap / newton.norm();
    double t = 0.0;
    Vector step;
    for (const Vector& dir : {newton, Vector(-st.grad)}) {
      const double decrement = -st.grad.dot(dir);
      if (!(decrement > 0.0) || !dir.allFinite()) continue;
      t = backtrack(des, theta, dir, st.f, decrement);
      if (t > 0.0) {
        step = dir;
        break;
      }
    }
    if (t == 0.0) break;
    theta += t * step;
    st = logistic_state(des, theta, true);
  }
  r.theta = theta;
  r.iterations = it;
  r.objective_value = st.f;
  r.converged = st.grad.norm() <= tol * std::max(1.0, st.grad_scale);
  return r;
}

SolveResult solve_svm(const LearnerSpec& spec, std::span<const Example> items, Eigen::Index dim,
                      const SolverConfig& config) {
  if (spec.loss() != LossKind::hinge) throw Error(errc::invalid_option, "solve_svm needs the hinge loss");
  const Design des = make_design(spec, items, dim);
  if (items.empty()) return empty_result(spec, items, dim);
  if (!(config.step_constant > 0.0)) throw Error(errc::invalid_option, "step_constant must be positive");

  const long max_it = config.max_iterations_for(LossKind::hinge);
  const Eigen::Index p = des.v.cols();
  Vector theta = random_start(p, config.init_radius, config.seed);
  // Block sums are taken relative to the block's first iterate to keep the
  // average accurate once iterates agree to many digits.
  Vector anchor = theta;
  Vector block_sum = Vector::Zero(p);
  long block_len = 0;
  long checkpoint = std::min(kFirstCheckpoint, max_it);
  Vector average = theta;

  SolveResult r;
  for (long k = 1; k <= max_it; ++k) {
    theta -= (config.step_constant / std::sqrt(static_cast<double>(k))) * hinge_subgradient(des, theta);
    if (block_len == 0) anchor = theta;
    block_sum += theta - anchor;
    ++block_len;
    if (k != checkpoint) continue;

    // Tail average: the block since the previous checkpoint.
    average = anchor + block_sum / static_cast<double>(block_len);
    block_sum.setZero();
    block_len = 0;
    checkpoint = std::min(2 * checkpoint, max_it);
    if (config.polish) {
      if (auto refined = refine_svm(spec, items, des, average, config)) {
        r.theta = std::move(*refined);
        r.iterations = k;
        r.converged = true;
        r.objective_value = objective(spec, items, r.theta);
        return r;
      }
    }
  }
  r.theta = average;
  r.iterations = max_it;
  r.objective_value = objective(spec, items, r.theta);
  const double scale = std::max(1.0, (des.reg * r.theta).norm());
  r.converged = kkt_residual(spec, items, r.theta, config.kkt) <= config.tolerance_for(LossKind::hinge) * scale;
  return r;
}

SolveResult train(const LearnerSpec& spec, std::span<const Example> items, Eigen::Index dim,
                  const SolverConfig& config) {
  switch (spec.loss()) {
    case LossKind::squared: return solve_ridge(spec, items, dim);
    case LossKind::hinge: return solve_svm(spec, items, dim, config);
    case LossKind::logistic: return solve_logistic(spec, items, dim, config);
  }
  throw Error(errc::invalid_option, "unknown loss");
}

}  // namespace teachdim
