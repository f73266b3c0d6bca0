#pragma once

#include <span>
#include <string>
#include <vector>

#include "blackwell/geometry.hpp"
#include "blackwell/prob.hpp"

namespace blackwell {

// Forecast grid over [0,1]: levels (k + 1/2) / N for k = 0..N-1, so every
// p in [0,1] is within 1/(2N) of a level.
struct CalibrationGrid {
  int n_levels = 0;

  explicit CalibrationGrid(int n) : n_levels(n) {
    if (n < 2) throw ValidationError("CalibrationGrid: need at least two levels");
  }
  double level(int k) const { return (k + 0.5) / n_levels; }
  // Nearest grid index; exact midpoints round toward the smaller level.
  int round_to_grid(double p) const;
};

// Dense scalar reward r(a, b, x, s).
struct RewardTensor {
  int n_a = 0, n_b = 0, n_x = 0, n_s = 0;
  std::vector<double> values;  // index ((a*n_b + b)*n_x + x)*n_s + s

  RewardTensor() = default;
  RewardTensor(int na, int nb, int nx, int ns, std::vector<double> v);
  double at(int a, int b, int x, int s) const {
    return values[((a * n_b + b) * static_cast<size_t>(n_x) + x) * n_s + s];
  }
};

// Dense vector-valued payoff m(a, b, x, s) in R^dim with its linear
// extension to mixed actions. The sup-of-norms bound is cached at build
// time and kept finite by construction.
class PayoffTensor {
 public:
  PayoffTensor(int na, int nb, int nx, int ns, int dim);

  int n_actions() const { return n_a_; }
  int n_outcomes() const { return n_b_; }
  int n_x() const { return n_x_; }
  int n_s() const { return n_s_; }
  int dim() const { return dim_; }

  std::span<const double> at(int a, int b, int x, int s) const {
    return {e_.data() + offset(a, b, x, s), static_cast<size_t>(dim_)};
  }
  std::span<double> at_mut(int a, int b, int x, int s) {
    return {e_.data() + offset(a, b, x, s), static_cast<size_t>(dim_)};
  }

  // Recompute the cached bound after entries were filled in.
  void refresh_bound();
  // max over (a,b,x,s) of the Euclidean norm of m(a,b,x,s).
  double inf_two_norm() const { return bound_; }

  // out += scale * m(p, q, x, s) for mixed p over actions, q over outcomes.
  void add_mixed(const MixedAction& p, const MixedAction& q, int x, int s, double scale,
                 std::span<double> out) const;
  // out += scale * m(a, q, x, s).
  void add_row_mixed(int a, const MixedAction& q, int x, int s, double scale,
                     std::span<double> out) const;

 private:
  size_t offset(int a, int b, int x, int s) const {
    return (((static_cast<size_t>(a) * n_b_ + b) * n_x_ + x) * n_s_ + s) * dim_;
  }

  int n_a_, n_b_, n_x_, n_s_, dim_;
  double bound_ = 0.0;
  std::vector<double> e_;
};

// A learning objective or fairness constraint: payoff function plus the
// closed convex set its average should approach. `gamma_dependent` marks
// payoffs that embed 1/gamma_s factors and therefore require a known
// context distribution.
struct ObjectivePair {
  std::string name;
  PayoffTensor payoff;
  TargetSet target;
  bool gamma_dependent = false;
};

// Catalog builders. Calibration-style entries use B = {0,1} and identify
// the action set with the forecast grid.
ObjectivePair build_calibration(const ContextSpace& space, int n_levels);
ObjectivePair build_group_calibration(const ContextSpace& space, int n_levels,
                                      std::span<const double> gammas);
ObjectivePair build_no_regret(const ContextSpace& space, const RewardTensor& r);
ObjectivePair build_group_no_regret(const ContextSpace& space, const RewardTensor& r);
ObjectivePair build_demographic_parity(const ContextSpace& space, int n_levels,
                                       std::span<const double> gammas, double delta);
ObjectivePair build_equalized_payoffs(const ContextSpace& space, const RewardTensor& r,
                                      std::span<const double> gammas, double epsilon);

// Trade-off reformulation with the group frequencies moved into the target:
// payoff is gamma-free, target couples the calibration block (weighted l1
// constraint inside the unit l1 ball) with a weighted parity slab.
PayoffTensor build_tilde_payoff(const ContextSpace& space, int n_levels);
TargetSet build_tilde_calibration_target(int n_levels, double gamma0, double gamma1,
                                         double epsilon);
TargetSet build_tilde_parity_target(double gamma0, double gamma1, double delta);
ObjectivePair build_tilde_tradeoff(const ContextSpace& space, int n_levels,
                                   std::span<const double> gammas, double tv, double tau);

// Coordinate concatenation of payoffs with the product of targets.
ObjectivePair combine(std::vector<ObjectivePair> pairs);

// Constant used by the convergence-rate checks: the worst squared gap
// between a support payoff and the projection of any support payoff.
double payoff_range_constant(const ObjectivePair& pair);

}  // namespace blackwell
