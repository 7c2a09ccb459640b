// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "teachdim/bounds.hpp"
#include "teachdim/construct.hpp"
#include "teachdim/lambert.hpp"
#include "teachdim/oracle.hpp"
#include "teachdim/verify.hpp"

using namespace teachdim;

namespace {

struct Learner {
  const char* name;
  LossKind loss;
  bool homogeneous;
};

constexpr Learner kLearners[] = {
    {"hom ridge", LossKind::squared, true},      {"hom svm", LossKind::hinge, true},
    {"hom logistic", LossKind::logistic, true},  {"inhom ridge", LossKind::squared, false},
    {"inhom svm", LossKind::hinge, false},       {"inhom logistic", LossKind::logistic, false},
};

constexpr double kLambdas[] = {0.3, 1.0, 2.5, 5.0, 9.7};
constexpr int kDims[] = {1, 2, 5, 20};
constexpr int kTargetsPerCell = 5;

struct Cell {
  double lambda;
  Vector w;
  double b;
};

Vector random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(d);
  do {
    for (auto& c : v) c = normal(rng);
  } while (v.norm() < 1e-3);
  return v / v.norm();
}

// First target per (lambda, d) has unit norm, the rest norms in [0.25, 3].
std::vector<Cell> grid(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> norm(0.25, 3.0);
  std::uniform_real_distribution<double> bias(-2.0, 2.0);
  std::vector<Cell> cells;
  for (double l : kLambdas) {
    for (int d : kDims) {
      for (int k = 0; k < kTargetsPerCell; ++k) {
        const double r = k == 0 ? 1.0 : norm(rng);
        cells.push_back({l, random_unit(d, rng) * r, bias(rng)});
      }
    }
  }
  return cells;
}

TargetModel target_for(const Learner& learner, const Cell& c, Goal goal = Goal::exact_parameter) {
  return {c.w, learner.homogeneous ? std::nullopt : std::optional<double>(c.b), goal};
}

VerifyConfig config_for(const TargetModel& t) {
  VerifyConfig cfg;
  cfg.solver.init_radius = 2.0 * (1.0 + t.effective().norm());
  return cfg;
}

// Ceiling with a relative 1e-12 downward nudge, so a unit-norm target whose
// squared norm rounds to 1 + ulp still counts as norm 1.
long ceil_nudged(double z) { return static_cast<long>(std::ceil(z - 1e-12 * std::max(1.0, std::abs(z)))); }

long closed_form_size(const Learner& learner, double lambda, double s) {
  const double tm = tau_max();
  switch (learner.loss) {
    case LossKind::squared: return learner.homogeneous ? 1 : 2;
    case LossKind::hinge:
      return learner.homogeneous ? ceil_nudged(lambda * s) : 2 * ceil_nudged(lambda * s / 2.0);
    case LossKind::logistic:
      return learner.homogeneous ? ceil_nudged(lambda * s / tm) : 2 * ceil_nudged(lambda * s / (2.0 * tm));
  }
  return -1;
}

struct Outcome {
  bool passed = true;
  std::ostringstream detail;
  void fail(const std::string& what) {
    if (passed) detail << "first failure: " << what << "; ";
    passed = false;
  }
};

std::string describe(const Learner& learner, const Cell& c) {
  std::ostringstream os;
  os << learner.name << " lambda=" << c.lambda << " d=" << c.w.size() << " |w|=" << c.w.norm();
  if (!learner.homogeneous) os << " b=" << c.b;
  return os.str();
}

void exact_parameter_row(Outcome& out) {
  long checked = 0;
  for (const auto& c : grid(101)) {
    for (const auto& learner : kLearners) {
      const LearnerSpec spec(learner.loss, learner.homogeneous, c.lambda);
      const TargetModel t = target_for(learner, c);
      const auto set = teach(spec, t);
      const long want = closed_form_size(learner, c.lambda, c.w.squaredNorm());
      if (static_cast<long>(set.items.size()) != want) {
        out.fail(describe(learner, c) + " size " + std::to_string(set.items.size()) + " != " +
                 std::to_string(want));
      }
      if (!verify_teaching_set(spec, set.items, t, config_for(t)).passed) out.fail(describe(learner, c) + " verify");
      ++checked;
    }
  }
  out.detail << checked << " constructions";
}

void decision_boundary_row(Outcome& out) {
  long checked = 0;
  for (const auto& c : grid(202)) {
    for (const auto& learner : kLearners) {
      if (learner.loss == LossKind::squared) continue;
      const LearnerSpec spec(learner.loss, learner.homogeneous, c.lambda);
      const TargetModel t = target_for(learner, c, Goal::decision_boundary);
      const auto set = teach(spec, t);
      const std::size_t want = learner.homogeneous ? 1 : 2;
      if (set.items.size() != want) out.fail(describe(learner, c) + " boundary size");
      TargetModel scaled = t;
      scaled.weights *= set.scale_factor;
      if (scaled.bias) *scaled.bias *= set.scale_factor;
      const auto rep = verify_construction(spec, t, set, config_for(scaled), 1000);
      if (!rep.passed || !rep.boundary_agreement || *rep.boundary_agreement != 1.0) {
        out.fail(describe(learner, c) + " boundary verify");
      }
      ++checked;
    }
  }
  out.detail << checked << " constructions, 1000 probes each";
}

void lower_bound_table(Outcome& out) {
  const double tm = tau_max();
  long checked = 0;
  long gaps = 0;
  for (const auto& c : grid(303)) {
    const double s = c.w.squaredNorm();
    for (const auto& learner : kLearners) {
      const LearnerSpec spec(learner.loss, learner.homogeneous, c.lambda);
      const TargetModel t = target_for(learner, c);
      const auto rep = bound_report(spec, t);
      const bool margin = learner.loss != LossKind::squared;
      const double z = learner.loss == LossKind::hinge ? c.lambda * s : c.lambda * s / tm;
      const long want_lb1 = learner.homogeneous ? 1 : 2;
      const long want_lb2 = learner.homogeneous && margin ? ceil_nudged(z) : 0;
      const std::optional<long> want_lb3 =
          !learner.homogeneous && margin ? std::optional<long>(ceil_nudged(z)) : std::nullopt;
      if (rep.lb1 != want_lb1 || rep.lb2 != want_lb2 || rep.lb3 != want_lb3) {
        out.fail(describe(learner, c) + " bounds");
      }
      const long size = static_cast<long>(teach(spec, t).items.size());
      const long gap = size - rep.combined;
      if (gap < 0 || gap > 1) out.fail(describe(learner, c) + " gap " + std::to_string(gap));
      if (gap == 1) {
        ++gaps;
        if (learner.homogeneous || !margin) out.fail(describe(learner, c) + " unexpected gap");
      }
      ++checked;
    }
  }
  out.detail << checked << " reports, " << gaps << " rounding gaps (inhom svm/logistic only)";
}

void lambert_accuracy(Outcome& out) {
  const double tm = tau_max();
  if (std::abs(tm - 0.2785) > 5e-5) out.fail("tau_max");
  const double lo = -1.0 / std::numbers::e;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = lo + (700.0 - lo) * i / 999.0;
    const double w = lambert_w0(x);
    const double r = std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x));
    worst = std::max(worst, r);
  }
  if (worst > 1e-12) out.fail("residual");
  char buf[128];
  std::snprintf(buf, sizeof buf, "tau_max=%.16g, worst scaled residual %.3g over 1000 points", tm, worst);
  out.detail << buf;
}

void tau_inverse_round_trip(Outcome& out) {
  double worst_trip = 0.0;
  double worst_oracle = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    const double a = tau_max() * k / 1000.0;
    const double t = tau_inverse(a);
    worst_trip = std::max(worst_trip, std::abs(t / (1.0 + std::exp(t)) - a));
    worst_oracle = std::max(worst_oracle, std::abs(t - tau_inverse_bisection(a)));
  }
  if (worst_trip > 1e-10) out.fail("round trip");
  if (worst_oracle > 1e-9) out.fail("bisection agreement");
  char buf[128];
  std::snprintf(buf, sizeof buf, "worst round trip %.3g, worst bisection gap %.3g", worst_trip, worst_oracle);
  out.detail << buf;
}

void falsification(Outcome& out) {
  std::mt19937_64 rng(606);
  {
    const LearnerSpec spec(LossKind::hinge, true, 2.5);
    const TargetModel t{random_unit(2, rng), std::nullopt, Goal::exact_parameter};
    const auto rep = falsify_smaller_sets(spec, t, 2, 10000, default_box_radius(t), 6061);
    if (rep.successes != 0) out.fail("hom svm successes " + std::to_string(rep.successes));
    out.detail << "hom svm size 2: " << rep.successes << "/" << rep.trials << "; ";
  }
  {
    const LearnerSpec spec(LossKind::squared, false, 1.0);
    const TargetModel t{random_unit(2, rng) * 1.5, 0.7, Goal::exact_parameter};
    const auto rep = falsify_smaller_sets(spec, t, 1, 10000, default_box_radius(t), 6062);
    if (rep.successes != 0) out.fail("inhom ridge successes " + std::to_string(rep.successes));
    out.detail << "inhom ridge size 1: " << rep.successes << "/" << rep.trials;
  }
}

void uniqueness(Outcome& out) {
  long sets = 0;
  double worst_smooth = 0.0;
  double worst_hinge = 0.0;
  double least_increase = std::numeric_limits<double>::infinity();
  const auto probe = [&](const Learner& learner, const LearnerSpec& spec, const TargetModel& t,
                         const TeachingSet& set, const Cell& c) {
    SolverConfig cfg;
    cfg.init_radius = 2.0 * (1.0 + t.effective().norm());
    cfg.seed = 0xA11CE + static_cast<std::uint64_t>(sets);
    const auto p = uniqueness_probe(spec, set.items, t.effective(), 100, cfg);
    const bool hinge = learner.loss == LossKind::hinge;
    (hinge ? worst_hinge : worst_smooth) = std::max(hinge ? worst_hinge : worst_smooth, p.spread);
    if (!p.conclusive || p.spread > (hinge ? 1e-3 : 1e-6)) out.fail(describe(learner, c) + " spread");
    if (hinge && !learner.homogeneous) {
      if (!p.bias_perturbation_increase || !(*p.bias_perturbation_increase > 1e-12)) {
        out.fail(describe(learner, c) + " bias perturbation");
      } else {
        least_increase = std::min(least_increase, *p.bias_perturbation_increase);
      }
    }
    ++sets;
  };
  for (const auto& c : grid(101)) {
    for (const auto& learner : kLearners) {
      const LearnerSpec spec(learner.loss, learner.homogeneous, c.lambda);
      const TargetModel t = target_for(learner, c);
      probe(learner, spec, t, teach(spec, t), c);
      if (learner.loss == LossKind::squared) continue;
      const TargetModel boundary = target_for(learner, c, Goal::decision_boundary);
      const auto set = teach(spec, boundary);
      TargetModel scaled = t;
      scaled.weights *= set.scale_factor;
      if (scaled.bias) *scaled.bias *= set.scale_factor;
      probe(learner, spec, scaled, set, c);
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%ld sets x 100 restarts; worst spread %.3g smooth, %.3g hinge; least bias-perturbation "
                "increase %.3g",
                sets, worst_smooth, worst_hinge, least_increase);
  out.detail << buf;
}

void gradient_oracle(Outcome& out) {
  const double sq = finite_difference_grad_check(LossKind::squared, 1000, 801);
  const double lg = finite_difference_grad_check(LossKind::logistic, 1000, 802);
  const double hg = finite_difference_grad_check(LossKind::hinge, 1000, 803);
  if (sq > 1e-6) out.fail("squared");
  if (lg > 1e-6) out.fail("logistic");
  if (hg > 1e-6) out.fail("hinge");
  char buf[160];
  std::snprintf(buf, sizeof buf, "max error squared %.3g, logistic %.3g, hinge (off kink) %.3g", sq, lg, hg);
  out.detail << buf;
}

void monotone_failure(Outcome& out) {
  std::mt19937_64 rng(909);
  std::uniform_int_distribution<int> pick_lambda(0, 4);
  std::uniform_int_distribution<int> pick_dim(0, 3);
  std::uniform_real_distribution<double> norm(0.25, 3.0);
  std::uniform_real_distribution<double> bias(-2.0, 2.0);
  long deletions = 0;
  std::vector<long> covered(std::size(kLearners), 0);
  for (int cell = 0; cell < 10; ++cell) {
    const Cell c{kLambdas[pick_lambda(rng)], random_unit(kDims[pick_dim(rng)], rng) * norm(rng), bias(rng)};
    for (std::size_t li = 0; li < std::size(kLearners); ++li) {
      const auto& learner = kLearners[li];
      const LearnerSpec spec(learner.loss, learner.homogeneous, c.lambda);
      const TargetModel t = target_for(learner, c);
      const auto set = teach(spec, t);
      if (static_cast<long>(set.items.size()) != lower_bound(spec, t)) continue;
      ++covered[li];
      for (std::size_t i = 0; i < set.items.size(); ++i) {
        auto items = set.items;
        items.erase(items.begin() + static_cast<std::ptrdiff_t>(i));
        if (verify_teaching_set(spec, items, t, config_for(t)).passed) {
          out.fail(describe(learner, c) + " passed without item " + std::to_string(i));
        }
        ++deletions;
      }
    }
  }
  out.detail << deletions << " deletions; tight constructions per learner:";
  for (std::size_t li = 0; li < std::size(kLearners); ++li) {
    out.detail << " " << kLearners[li].name << "=" << covered[li];
    if (covered[li] == 0) out.fail(std::string(kLearners[li].name) + " never tight");
  }
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&)> run;
  double budget_seconds;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "exact-parameter teaching sets: sizes match the closed forms and verify", exact_parameter_row, 120.0},
      {2, "decision-boundary teaching sets: sizes (1, 1, 2, 2) and full sign agreement", decision_boundary_row, 0.0},
      {3, "lower bounds match the closed forms; gap <= 1 only for inhom svm/logistic", lower_bound_table, 0.0},
      {4, "tau_max = 0.2785 +- 5e-5 and Lambert W residual <= 1e-12", lambert_accuracy, 0.0},
      {5, "tau^-1 round trip <= 1e-10 and bisection agreement <= 1e-9", tau_inverse_round_trip, 0.0},
      {6, "random sub-lower-bound sets never teach (2 x 10000 trials)", falsification, 300.0},
      {7, "100-restart uniqueness on every constructed set; bias perturbation increases", uniqueness, 0.0},
      {8, "analytic vs central-difference loss gradients <= 1e-6", gradient_oracle, 0.0},
      {9, "deleting any item from a tight construction fails verification", monotone_failure, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0 && secs > c.budget_seconds) out.fail("over time budget");
    if (!out.passed) ++failures;
    std::printf("%s criterion %d: %s [%.1fs] (%s)\n", out.passed ? "PASS" : "FAIL", c.id, c.title, secs,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
