#pragma once

#include <initializer_list>
#include <random>

#include "teachdim/model.hpp"

namespace teachdim::testing {

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Vector random_direction(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(d);
  do {
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
  } while (v.norm() < 1e-3);
  return v / v.norm();
}

inline TargetModel hom_target(Vector w) { return {std::move(w), std::nullopt, Goal::exact_parameter}; }

inline TargetModel inhom_target(Vector w, double b) { return {std::move(w), b, Goal::exact_parameter}; }

}  // namespace teachdim::testing
