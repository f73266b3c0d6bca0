#pragma once

// Shared test instances. All tolerance-bearing expected values in the test
// suites were computed from these exact tables.

#include <vector>

#include "blackwell/objectives.hpp"
#include "blackwell/prob.hpp"

namespace blackwell::testing {

// Two contexts, two groups, gamma = (1/2, 1/2), TV(Q^0, Q^1) = 1/2.
inline JointDistribution two_point_instance() {
  ContextSpace space({"x0", "x1"}, 2);
  return JointDistribution(space, {0.375, 0.125, 0.125, 0.375});
}

// Three contexts with Q^0 = (0.5, 0.3, 0.2), Q^1 = (0, 0.3, 0.7),
// gamma = (1/2, 1/2); TV = 1/2 and the density split is
// x0 -> group 0, x1 -> tie, x2 -> group 1.
inline JointDistribution three_point_instance() {
  ContextSpace space({"x0", "x1", "x2"}, 2);
  return JointDistribution(space, {0.25, 0.0, 0.15, 0.15, 0.10, 0.35});
}

// Same marginals with independent contexts (TV = 0).
inline JointDistribution three_point_independent_instance() {
  ContextSpace space({"x0", "x1", "x2"}, 2);
  return JointDistribution(space, {0.25, 0.25, 0.15, 0.15, 0.10, 0.10});
}

// Single overlapping context, gamma = (1/2, 1/2).
inline JointDistribution one_point_instance() {
  ContextSpace space({"x0"}, 2);
  return JointDistribution(space, {0.5, 0.5});
}

// Two overlapping contexts with TV(Q^0, Q^1) = 0.6.
inline JointDistribution overlap_tv06_instance() {
  ContextSpace space({"x0", "x1"}, 2);
  return JointDistribution(space, {0.40, 0.10, 0.10, 0.40});
}

// r(a, b, x, 0) = a^2, r(a, b, x, 1) = (a - 1)^2 over binary actions.
inline RewardTensor group_flipped_rewards(int n_x) {
  std::vector<double> values;
  values.reserve(2 * 2 * n_x * 2);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int x = 0; x < n_x; ++x) {
        values.push_back(static_cast<double>(a * a));
        values.push_back(static_cast<double>((a - 1) * (a - 1)));
      }
    }
  }
  return RewardTensor(2, 2, n_x, 2, std::move(values));
}

// Binary classification reward 1{a = b}.
inline RewardTensor match_rewards(int n_x, int n_s) {
  std::vector<double> values;
  values.reserve(4 * n_x * n_s);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int x = 0; x < n_x; ++x) {
        for (int s = 0; s < n_s; ++s) values.push_back(a == b ? 1.0 : 0.0);
      }
    }
  }
  return RewardTensor(2, 2, n_x, n_s, std::move(values));
}

}  // namespace blackwell::testing
