#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "blackwell/estimation.hpp"
#include "blackwell/games.hpp"
#include "blackwell/kahan.hpp"
#include "blackwell/objectives.hpp"
#include "blackwell/prob.hpp"

namespace blackwell {

// What Nature sees before acting. The engine fills `s` only under
// awareness; strategies must not receive the Player's action here.
struct Observation {
  int x = 0;
  std::optional<int> s;
};

// End-of-round feedback. The Player learns the realized payoff and the
// sensitive context after committing; Nature sees everything.
struct RoundFeedback {
  int x = 0, s = 0, a = 0, b = 0;
  std::span<const double> payoff;
};

class Player {
 public:
  virtual ~Player() = default;
  virtual MixedAction act(int x) = 0;
  virtual void observe(const RoundFeedback&) {}
};

class Nature {
 public:
  virtual ~Nature() = default;
  virtual MixedAction act(const Observation& obs) = 0;
  virtual void observe(const RoundFeedback&) {}
};

// One step of the projection-steered strategy: the mixed action at the
// realized context from an argmin family of the steered expected-payoff
// game. The objective decomposes across contexts with weights q_hat(x, .),
// so only the realized context's subproblem is solved. Under unawareness
// the per-context problem is a matrix game on
//   M[a][b] = sum_s q_hat(x,s) <steer, m(a,b,x,s)>;
// under awareness it is a weighted minmax over the group blocks.
// Zero steering or zero q_hat mass at x fall back to the uniform action.
MixedAction steered_action(const PayoffTensor& payoff, const JointDistribution& q_hat,
                           std::span<const double> steering, Monitoring monitoring, int x);

// Full argmin step: steering = m_bar - proj_target(m_bar).
MixedAction blackwell_step(const ObjectivePair& pair, const JointDistribution& q_hat,
                           std::span<const double> m_bar, std::span<const double> c_bar,
                           Monitoring monitoring, int x);

// Projection-steered player. Known mode holds the true distribution;
// otherwise empirical frequencies are plugged in round by round.
class BlackwellPlayer : public Player {
 public:
  BlackwellPlayer(const ObjectivePair& pair, Monitoring monitoring,
                  std::optional<JointDistribution> known_q, ContextSpace space);

  MixedAction act(int x) override;
  void observe(const RoundFeedback& fb) override;

 private:
  const ObjectivePair& pair_;
  Monitoring monitoring_;
  std::optional<JointDistribution> known_q_;
  EmpiricalJoint emp_;
  KahanVector payoff_sum_;
  long t_ = 0;
};

// Unknown-target player: steers toward a data-driven estimate of the tilde
// target, rebuilt at every power-of-two round, with empirical frequencies
// in the per-round game.
class DoublingPlayer : public Player {
 public:
  DoublingPlayer(ContextSpace space, int n_levels, double tau, Monitoring monitoring);

  MixedAction act(int x) override;
  void observe(const RoundFeedback& fb) override;

  int refresh_count() const { return refresh_count_; }
  const TargetSet* hat_target() const { return hat_.has_value() ? &*hat_ : nullptr; }
  // Freeze an externally supplied target; the schedule stops refreshing.
  // Reduces the strategy to the known-target player for comparison runs.
  void freeze_target(TargetSet target);

 private:
  ContextSpace space_;
  int n_levels_;
  double tau_;
  Monitoring monitoring_;
  PayoffTensor payoff_;
  EmpiricalJoint emp_;
  KahanVector payoff_sum_;
  std::optional<TargetSet> hat_;
  bool frozen_ = false;
  int refresh_count_ = 0;
  long t_ = 0;
};

class ConstantForecastPlayer : public Player {
 public:
  ConstantForecastPlayer(int action, int n_actions)
      : action_(MixedAction::dirac(action, n_actions)) {}
  MixedAction act(int) override { return action_; }

 private:
  MixedAction action_;
};

// Oracle trade-off players. Both mix a context-blind anchor forecast with a
// context-driven one at weight tau; they are built from Nature's stationary
// family (oracle knowledge) and the true distribution.
class ParetoOracleAwarePlayer : public Player {
 public:
  ParetoOracleAwarePlayer(double tau, const NatureFamily& family,
                          const JointDistribution& q, int n_levels);
  MixedAction act(int x) override;

 private:
  double tau_;
  int n_levels_;
  int anchor_level_;
  std::vector<int> context_level_;  // rounded conditional label probability
};

class ParetoOracleUnawarePlayer : public Player {
 public:
  ParetoOracleUnawarePlayer(double tau, const NatureFamily& family,
                            const JointDistribution& q, int n_levels);
  MixedAction act(int x) override;

 private:
  double tau_;
  int n_levels_;
  int anchor_level_;                // rounded average label probability under Q^0
  std::vector<int> context_level_;
};

// Nature playing a fixed measurable family.
class StationaryNature : public Nature {
 public:
  explicit StationaryNature(NatureFamily family) : family_(std::move(family)) {}
  MixedAction act(const Observation& obs) override;
  const NatureFamily& family() const { return family_; }

 private:
  NatureFamily family_;
};

// Adversarial Nature: recomputes the Player's equilibrium family from the
// true distribution each round and best-responds at the realized
// observation with a pure outcome (ties to the smallest index).
class BestResponseNature : public Nature {
 public:
  BestResponseNature(const ObjectivePair& pair, JointDistribution q, Monitoring monitoring);
  MixedAction act(const Observation& obs) override;
  void observe(const RoundFeedback& fb) override;

 private:
  const ObjectivePair& pair_;
  JointDistribution q_;
  Monitoring monitoring_;
  KahanVector payoff_sum_;
  long t_ = 0;
};

// Hard stationary families.
//
// The group-regret instance with group-flipped quadratic rewards needs no
// particular outcome distribution; a pure 0 is pinned for reproducibility.
NatureFamily counterexample1_family(int n_x);
// Awareness counter-instance: outcome equals the sensitive context.
NatureFamily counterexample2_family(int n_x);
// Trade-off lower bounds: under awareness label 1 for group 0 and label 0
// for group 1; under unawareness label 1 exactly where group 1's density
// does not lose.
NatureFamily pareto_lower_aware_family(int n_x);
NatureFamily pareto_lower_unaware_family(const JointDistribution& q);
// Equalized-payoffs impossibility family: outcome 0 with probability 1 on
// supp Q^0 and 1/2 + epsilon elsewhere on supp Q^1 (the overlap keeps the
// first rule).
NatureFamily equalized_impossibility_family(const JointDistribution& q, double epsilon);

}  // namespace blackwell
