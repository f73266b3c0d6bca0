#include "blackwell/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace blackwell {

namespace {

constexpr double kSteeringEps = 1e-12;

double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

MixedAction steered_action(const PayoffTensor& payoff, const JointDistribution& q_hat,
                           std::span<const double> steering, Monitoring monitoring, int x) {
  const int na = payoff.n_actions(), nb = payoff.n_outcomes(), ns = payoff.n_s();
  if (static_cast<int>(steering.size()) != payoff.dim()) {
    throw DimensionError("steered_action: steering dim mismatch");
  }
  if (norm(steering) < kSteeringEps) return MixedAction::uniform(na);
  double x_mass = 0.0;
  for (int s = 0; s < ns; ++s) x_mass += q_hat.at(x, s);
  if (x_mass <= 0.0) return MixedAction::uniform(na);

  auto scalarized = [&](int s) {
    MatrixGame m(na, nb);
    for (int a = 0; a < na; ++a) {
      for (int b = 0; b < nb; ++b) {
        const auto cell = payoff.at(a, b, x, s);
        double dot = 0.0;
        for (int i = 0; i < payoff.dim(); ++i) dot += steering[i] * cell[i];
        m.at(a, b) = dot;
      }
    }
    return m;
  };

  if (monitoring == Monitoring::unaware) {
    MatrixGame m(na, nb);
    for (int s = 0; s < ns; ++s) {
      const double w = q_hat.at(x, s);
      if (w == 0.0) continue;
      const MatrixGame part = scalarized(s);
      for (size_t i = 0; i < m.m.size(); ++i) m.m[i] += w * part.m[i];
    }
    return solve_matrix_game(m).row_strategy;
  }
  std::vector<WeightedBlock> blocks;
  blocks.reserve(ns);
  for (int s = 0; s < ns; ++s) {
    const double w = q_hat.at(x, s);
    if (w == 0.0) continue;
    blocks.push_back({w, scalarized(s)});
  }
  return solve_weighted_minmax(blocks).strategy;
}

MixedAction blackwell_step(const ObjectivePair& pair, const JointDistribution& q_hat,
                           std::span<const double> m_bar, std::span<const double> c_bar,
                           Monitoring monitoring, int x) {
  if (m_bar.size() != c_bar.size() ||
      static_cast<int>(m_bar.size()) != pair.payoff.dim()) {
    throw DimensionError("blackwell_step: average payoff dim mismatch");
  }
  std::vector<double> steering(m_bar.size());
  for (size_t i = 0; i < m_bar.size(); ++i) steering[i] = m_bar[i] - c_bar[i];
  return steered_action(pair.payoff, q_hat, steering, monitoring, x);
}

BlackwellPlayer::BlackwellPlayer(const ObjectivePair& pair, Monitoring monitoring,
                                 std::optional<JointDistribution> known_q, ContextSpace space)
    : pair_(pair),
      monitoring_(monitoring),
      known_q_(std::move(known_q)),
      emp_(std::move(space)),
      payoff_sum_(pair.payoff.dim()) {}

MixedAction BlackwellPlayer::act(int x) {
  if (t_ == 0) return MixedAction::uniform(pair_.payoff.n_actions());
  const std::vector<double> m_bar = payoff_sum_.mean(t_);
  const std::vector<double> c_bar = pair_.target.project(m_bar);
  if (known_q_) return blackwell_step(pair_, *known_q_, m_bar, c_bar, monitoring_, x);
  return blackwell_step(pair_, emp_.snapshot(), m_bar, c_bar, monitoring_, x);
}

void BlackwellPlayer::observe(const RoundFeedback& fb) {
  payoff_sum_.add(fb.payoff);
  emp_.add(fb.x, fb.s);
  ++t_;
}

DoublingPlayer::DoublingPlayer(ContextSpace space, int n_levels, double tau,
                               Monitoring monitoring)
    : space_(space),
      n_levels_(n_levels),
      tau_(tau),
      monitoring_(monitoring),
      payoff_(build_tilde_payoff(space, n_levels)),
      emp_(space),
      payoff_sum_(payoff_.dim()) {
  if (tau < 0.0 || tau > 1.0) throw ValidationError("DoublingPlayer: tau outside [0,1]");
}

void DoublingPlayer::freeze_target(TargetSet target) {
  if (target.dim() != payoff_.dim()) throw DimensionError("freeze_target: dim mismatch");
  hat_ = std::move(target);
  frozen_ = true;
}

MixedAction DoublingPlayer::act(int x) {
  if (t_ == 0 || !hat_.has_value()) return MixedAction::uniform(payoff_.n_actions());
  const std::vector<double> m_bar = payoff_sum_.mean(t_);
  const std::vector<double> c_hat = hat_->project(m_bar);
  std::vector<double> steering(m_bar.size());
  for (size_t i = 0; i < m_bar.size(); ++i) steering[i] = m_bar[i] - c_hat[i];
  return steered_action(payoff_, emp_.snapshot(), steering, monitoring_, x);
}

void DoublingPlayer::observe(const RoundFeedback& fb) {
  payoff_sum_.add(fb.payoff);
  emp_.add(fb.x, fb.s);
  ++t_;
  // Refresh the target estimate at the end of rounds t = 2^r.
  if (!frozen_ && (t_ & (t_ - 1)) == 0) {
    hat_ = hat_target_product(estimate_hat_params(emp_, tau_), n_levels_);
    ++refresh_count_;
  }
}

ParetoOracleAwarePlayer::ParetoOracleAwarePlayer(double tau, const NatureFamily& family,
                                                 const JointDistribution& q, int n_levels)
    : tau_(tau), n_levels_(n_levels) {
  if (tau < 0.0 || tau > 1.0) throw ValidationError("ParetoOracleAwarePlayer: tau");
  if (family.mode != Monitoring::aware) {
    throw ValidationError("ParetoOracleAwarePlayer: needs an aware family");
  }
  const CalibrationGrid grid(n_levels);
  anchor_level_ = grid.round_to_grid(0.5);
  const std::vector<int> part = density_partition(q);
  context_level_.resize(q.n_x());
  for (int x = 0; x < q.n_x(); ++x) {
    // Follow the dominating group's conditional label probability: group 0
    // where its density wins, group 1 on ties or where group 1 wins.
    const int s = part[x] == -1 ? 0 : 1;
    context_level_[x] = grid.round_to_grid(family.at(x, s)[1]);
  }
}

MixedAction ParetoOracleAwarePlayer::act(int x) {
  std::vector<double> w(n_levels_, 0.0);
  w[anchor_level_] += 1.0 - tau_;
  w[context_level_[x]] += tau_;
  return MixedAction(std::move(w));
}

ParetoOracleUnawarePlayer::ParetoOracleUnawarePlayer(double tau, const NatureFamily& family,
                                                     const JointDistribution& q, int n_levels)
    : tau_(tau), n_levels_(n_levels) {
  if (tau < 0.0 || tau > 1.0) throw ValidationError("ParetoOracleUnawarePlayer: tau");
  if (family.mode != Monitoring::unaware) {
    throw ValidationError("ParetoOracleUnawarePlayer: needs an unaware family");
  }
  const CalibrationGrid grid(n_levels);
  const MixedAction q0 = q.conditional_given_s(0);
  double q_bar = 0.0;
  for (int x = 0; x < q.n_x(); ++x) q_bar += family.at(x, 0)[1] * q0[x];
  anchor_level_ = grid.round_to_grid(q_bar);
  context_level_.resize(q.n_x());
  for (int x = 0; x < q.n_x(); ++x) context_level_[x] = grid.round_to_grid(family.at(x, 0)[1]);
}

MixedAction ParetoOracleUnawarePlayer::act(int x) {
  std::vector<double> w(n_levels_, 0.0);
  w[anchor_level_] += 1.0 - tau_;
  w[context_level_[x]] += tau_;
  return MixedAction(std::move(w));
}

MixedAction StationaryNature::act(const Observation& obs) {
  if (family_.mode == Monitoring::aware) {
    if (!obs.s.has_value()) {
      throw ValidationError("StationaryNature: aware family under unaware monitoring");
    }
    return family_.at(obs.x, *obs.s);
  }
  return family_.at(obs.x, 0);
}

BestResponseNature::BestResponseNature(const ObjectivePair& pair, JointDistribution q,
                                       Monitoring monitoring)
    : pair_(pair), q_(std::move(q)), monitoring_(monitoring), payoff_sum_(pair.payoff.dim()) {}

MixedAction BestResponseNature::act(const Observation& obs) {
  const PayoffTensor& payoff = pair_.payoff;
  const int nb = payoff.n_outcomes();
  if (t_ == 0) return MixedAction::dirac(0, nb);
  const std::vector<double> m_bar = payoff_sum_.mean(t_);
  const std::vector<double> c_bar = pair_.target.project(m_bar);
  std::vector<double> steering(m_bar.size());
  for (size_t i = 0; i < m_bar.size(); ++i) steering[i] = m_bar[i] - c_bar[i];
  if (norm(steering) < kSteeringEps) return MixedAction::dirac(0, nb);

  // Equilibrium family at the realized context only; the inner objective is
  // linear in each per-observation distribution, so a vertex maximizer over
  // the realized observation suffices.
  const MixedAction p = steered_action(payoff, q_, steering, monitoring_, obs.x);
  std::vector<double> coeff(nb, 0.0);
  std::vector<double> tmp(payoff.dim());
  for (int b = 0; b < nb; ++b) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    const MixedAction dirac_b = MixedAction::dirac(b, nb);
    if (obs.s.has_value()) {
      payoff.add_mixed(p, dirac_b, obs.x, *obs.s, q_.at(obs.x, *obs.s), tmp);
    } else {
      for (int s = 0; s < payoff.n_s(); ++s) {
        const double w = q_.at(obs.x, s);
        if (w > 0.0) payoff.add_mixed(p, dirac_b, obs.x, s, w, tmp);
      }
    }
    for (int i = 0; i < payoff.dim(); ++i) coeff[b] += steering[i] * tmp[i];
  }
  int arg = 0;
  for (int b = 1; b < nb; ++b) {
    if (coeff[b] > coeff[arg] + kSteeringEps) arg = b;
  }
  return MixedAction::dirac(arg, nb);
}

void BestResponseNature::observe(const RoundFeedback& fb) {
  payoff_sum_.add(fb.payoff);
  ++t_;
}

NatureFamily counterexample1_family(int n_x) {
  std::vector<MixedAction> per_x(n_x, MixedAction::dirac(0, 2));
  return make_unaware_family(n_x, 2, std::move(per_x));
}

NatureFamily counterexample2_family(int n_x) {
  std::vector<MixedAction> per_xs;
  per_xs.reserve(2 * n_x);
  for (int x = 0; x < n_x; ++x) {
    for (int s = 0; s < 2; ++s) per_xs.push_back(MixedAction::dirac(s, 2));
  }
  return make_aware_family(n_x, 2, std::move(per_xs));
}

NatureFamily pareto_lower_aware_family(int n_x) {
  std::vector<MixedAction> per_xs;
  per_xs.reserve(2 * n_x);
  for (int x = 0; x < n_x; ++x) {
    per_xs.push_back(MixedAction::dirac(1, 2));  // group 0 sees label 1
    per_xs.push_back(MixedAction::dirac(0, 2));  // group 1 sees label 0
  }
  return make_aware_family(n_x, 2, std::move(per_xs));
}

NatureFamily pareto_lower_unaware_family(const JointDistribution& q) {
  const std::vector<int> part = density_partition(q);
  std::vector<MixedAction> per_x;
  per_x.reserve(q.n_x());
  for (int x = 0; x < q.n_x(); ++x) {
    per_x.push_back(MixedAction::dirac(part[x] >= 0 ? 1 : 0, 2));
  }
  return make_unaware_family(q.n_x(), q.n_s(), std::move(per_x));
}

NatureFamily equalized_impossibility_family(const JointDistribution& q, double epsilon) {
  if (q.n_s() != 2) throw DimensionError("equalized_impossibility_family: two groups");
  if (epsilon < 0.0 || epsilon >= 0.5) {
    throw ValidationError("equalized_impossibility_family: epsilon outside [0, 1/2)");
  }
  std::vector<MixedAction> per_x;
  per_x.reserve(q.n_x());
  for (int x = 0; x < q.n_x(); ++x) {
    if (q.at(x, 0) > 0.0) {
      per_x.push_back(MixedAction::dirac(0, 2));
    } else if (q.at(x, 1) > 0.0) {
      per_x.push_back(MixedAction({0.5 + epsilon, 0.5 - epsilon}));
    } else {
      per_x.push_back(MixedAction::dirac(0, 2));
    }
  }
  return make_unaware_family(q.n_x(), 2, std::move(per_x));
}

}  // namespace blackwell
