#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "teachdim/bounds.hpp"
#include "teachdim/error.hpp"
#include "teachdim/lambert.hpp"

using namespace teachdim;
using teachdim::testing::hom_target;
using teachdim::testing::inhom_target;
using teachdim::testing::vec;

TEST_CASE("guarded_ceil") {
  CHECK(guarded_ceil(3.0) == 3);
  CHECK(guarded_ceil(3.0000000000000004) == 3);
  CHECK(guarded_ceil(3.000001) == 4);
  CHECK(guarded_ceil(0.5) == 1);
  CHECK(guarded_ceil(0.0) == 0);
  CHECK(guarded_ceil(0.1 * 3.0 * 10.0) == 3);
}

TEST_CASE("sup_coefficient") {
  CHECK(sup_coefficient(LossKind::hinge, 1.0) == 1.0);
  CHECK(sup_coefficient(LossKind::hinge, 4.0) == 0.25);
  CHECK(sup_coefficient(LossKind::logistic, 2.0) == doctest::Approx(0.13923).epsilon(1e-4));
  CHECK(sup_coefficient(LossKind::logistic, 2.0) == tau_max() / 2.0);
  CHECK(sup_coefficient(LossKind::squared, 1.0) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(sup_coefficient(LossKind::hinge, 0.0), Error);
}

TEST_CASE("squared-loss slope sweep grows without bound") {
  // alpha * g with g = -d loss(alpha s, y) = y - alpha s, at y = 2 alpha s
  const double s = 1.0;
  double prev = 0.0;
  for (double alpha : {1.0, 10.0, 100.0, 1000.0}) {
    const double y = 2.0 * alpha * s;
    const double g = -loss_subdifferential(LossKind::squared, alpha * s, y).lo;
    CHECK(alpha * g > prev);
    prev = alpha * g;
  }
  CHECK(prev >= 1e6);
}

TEST_CASE("lb1") {
  const LearnerSpec hom(LossKind::squared, true, 1.0);
  CHECK(lb1(hom, hom_target(vec({1, 2}))) == 1);
  CHECK(lb1(hom, hom_target(vec({0, 0}))) == 0);
  const LearnerSpec inh(LossKind::hinge, false, 1.0);
  CHECK(lb1(inh, inhom_target(vec({1, 0, 0}), 0.3)) == 2);
  CHECK(lb1(inh, inhom_target(vec({0, 0}), 0.3)) == 1);
  // rank-deficient A
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  const LearnerSpec low(LossKind::squared, true, 1.0, PsdMatrix(a));
  CHECK(lb1(low, hom_target(vec({1, 1, 1}))) == 3);
  CHECK(lb1(low, hom_target(vec({0, 1, 1}))) == 2);
  CHECK_THROWS_AS(lb1(low, hom_target(vec({1, 1}))), Error);
}

TEST_CASE("lb1 is invariant under positive scaling") {
  const LearnerSpec hom(LossKind::logistic, true, 1.0);
  for (double c : {1e-8, 1e-3, 1.0, 7.0, 1e6}) CHECK(lb1(hom, hom_target(c * vec({0.3, -2, 1}))) == 1);
}

TEST_CASE("lb2") {
  CHECK(lb2(LearnerSpec(LossKind::hinge, true, 2.0), hom_target(vec({1, 0}))) == 2);
  CHECK(lb2(LearnerSpec(LossKind::squared, true, 2.0), hom_target(vec({1, 0}))) == 0);
  CHECK(lb2(LearnerSpec(LossKind::hinge, false, 2.0), inhom_target(vec({1, 0}), 1.0)) == 0);
  CHECK(lb2(LearnerSpec(LossKind::logistic, true, 1.0), hom_target(vec({1, 0}))) == 4);
  CHECK(lb2(LearnerSpec(LossKind::hinge, true, 2.0), hom_target(vec({0, 0}))) == 0);
}

TEST_CASE("lb3") {
  CHECK(lb3(LearnerSpec(LossKind::hinge, false, 3.0), inhom_target(vec({1}), 0.0)) == 3);
  CHECK(lb3(LearnerSpec(LossKind::logistic, false, 1.0), inhom_target(vec({1}), 0.0)) == 4);
  CHECK(lb3(LearnerSpec(LossKind::hinge, false, 0.5), inhom_target(vec({1}), 0.0)) == 1);
  CHECK_FALSE(lb3(LearnerSpec(LossKind::hinge, true, 3.0), hom_target(vec({1}))).has_value());
  CHECK_FALSE(lb3(LearnerSpec(LossKind::squared, false, 3.0), inhom_target(vec({1}), 0.0)).has_value());
  CHECK_FALSE(lb3(LearnerSpec(LossKind::hinge, false, 3.0), inhom_target(vec({0}), 1.0)).has_value());
}

TEST_CASE("lb3 on w* equals hom lb2 on the same vector") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lam(0.05, 10.0);
  for (int k = 0; k < 200; ++k) {
    const double l = lam(rng);
    const Vector w = teachdim::testing::random_direction(4, rng) * lam(rng) * 0.3;
    for (auto loss : {LossKind::hinge, LossKind::logistic}) {
      CHECK(*lb3(LearnerSpec(loss, false, l), inhom_target(w, 0.7)) ==
            lb2(LearnerSpec(loss, true, l), hom_target(w)));
    }
  }
}

TEST_CASE("lower_bound") {
  CHECK(lower_bound(LearnerSpec(LossKind::hinge, true, 3.0), hom_target(vec({1, 0}))) == 3);
  CHECK(lower_bound(LearnerSpec(LossKind::squared, false, 3.0), inhom_target(vec({1, 0}), 2.0)) == 2);
  CHECK(lower_bound(LearnerSpec(LossKind::squared, true, 3.0), hom_target(vec({1, 0}))) == 1);
}

TEST_CASE("td_formula") {
  CHECK(td_formula(LearnerSpec(LossKind::logistic, true, 1.0), hom_target(vec({1, 0}))) == TdValue{4, 4});
  CHECK(td_formula(LearnerSpec(LossKind::hinge, false, 3.0), inhom_target(vec({1, 0}), 0.0)) == TdValue{3, 4});
  CHECK(td_formula(LearnerSpec(LossKind::hinge, false, 4.0), inhom_target(vec({1, 0}), 0.0)) == TdValue{4, 4});
  CHECK(td_formula(LearnerSpec(LossKind::hinge, false, 0.5), inhom_target(vec({1, 0}), 0.0)) == TdValue{2, 2});
  CHECK(td_formula(LearnerSpec(LossKind::hinge, true, 3.0), hom_target(vec({1, 0}))) == TdValue{3, 3});
  CHECK(td_formula(LearnerSpec(LossKind::squared, true, 3.0), hom_target(vec({1, 0}))) == TdValue{1, 1});
  CHECK(td_formula(LearnerSpec(LossKind::squared, false, 3.0), inhom_target(vec({1, 0}), 1.0)) == TdValue{2, 2});
  CHECK(td_formula(LearnerSpec(LossKind::squared, false, 3.0), inhom_target(vec({0, 0}), 1.0)) == TdValue{1, 1});

  const TargetModel boundary{vec({1, 0}), std::nullopt, Goal::decision_boundary};
  CHECK(td_formula(LearnerSpec(LossKind::hinge, true, 3.0), boundary) == TdValue{1, 1});
  CHECK(td_formula(LearnerSpec(LossKind::logistic, true, 3.0), boundary) == TdValue{1, 1});
  const TargetModel boundary_inh{vec({1, 0}), 0.5, Goal::decision_boundary};
  CHECK(td_formula(LearnerSpec(LossKind::hinge, false, 3.0), boundary_inh) == TdValue{2, 2});
  CHECK(td_formula(LearnerSpec(LossKind::logistic, false, 3.0), boundary_inh) == TdValue{2, 2});

  Matrix a = Matrix::Identity(2, 2) * 2.0;
  CHECK_THROWS_AS(td_formula(LearnerSpec(LossKind::hinge, true, 1.0, PsdMatrix(a)), hom_target(vec({1, 0}))),
                  Error);
}

TEST_CASE("bound_report") {
  const auto r = bound_report(LearnerSpec(LossKind::hinge, false, 3.0), inhom_target(vec({1, 0}), 0.0));
  CHECK(r.lb1 == 2);
  CHECK(r.lb2 == 0);
  CHECK(r.lb3 == 3);
  CHECK(r.combined == 3);
  REQUIRE(r.td);
  CHECK(*r.td == TdValue{3, 4});

  Matrix a = Matrix::Identity(2, 2) * 2.0;
  const auto general = bound_report(LearnerSpec(LossKind::hinge, true, 1.0, PsdMatrix(a)), hom_target(vec({1, 0})));
  CHECK_FALSE(general.td);
  CHECK(general.lb2 == 2);
}

TEST_CASE("bounds invariants over random specs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lam(1e-3, 10.0);
  std::uniform_real_distribution<double> norm(0.05, 3.0);
  std::uniform_int_distribution<int> dim(1, 20);
  for (int k = 0; k < 2000; ++k) {
    const double l = lam(rng);
    const Vector w = teachdim::testing::random_direction(dim(rng), rng) * norm(rng);
    for (auto loss : {LossKind::squared, LossKind::hinge, LossKind::logistic}) {
      for (bool hom : {true, false}) {
        const LearnerSpec spec(loss, hom, l);
        const TargetModel t = hom ? hom_target(w) : inhom_target(w, 0.4);
        const auto td = td_formula(spec, t);
        CHECK(lower_bound(spec, t) <= td.lo);
        CHECK(td.hi - td.lo <= 1);
        CHECK(td.hi >= td.lo);
        if (loss == LossKind::squared) CHECK(lb2(spec, t) == 0);
        if (!hom && loss != LossKind::squared) {
          const double z = l * w.squaredNorm() / (loss == LossKind::hinge ? 1.0 : tau_max());
          CHECK((td.lo == td.hi) == (std::max(2L, guarded_ceil(z)) == 2 * guarded_ceil(z / 2.0)));
          CHECK(td.lo == std::max(2L, guarded_ceil(z)));
        }
      }
    }
  }
}
