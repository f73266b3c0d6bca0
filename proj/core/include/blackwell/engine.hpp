#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blackwell/games.hpp"
#include "blackwell/objectives.hpp"
#include "blackwell/prob.hpp"
#include "blackwell/strategies.hpp"

namespace blackwell {

// One repeated-game run. The engine owns the protocol order: contexts are
// drawn first, both sides commit simultaneously (the Player sees x only,
// Nature sees its monitoring of (x, s)), then the realized payoff and the
// sensitive context are revealed.
struct RunConfig {
  JointDistribution q;
  Monitoring monitoring = Monitoring::unaware;
  long horizon = 0;
  std::uint64_t seed = 0;
  std::vector<long> sample_grid;  // defaults to powers of two plus the horizon
};

std::vector<long> default_sample_grid(long horizon);

struct Trajectory {
  int dim = 0;
  long horizon = 0;
  std::vector<int> xs, ss, as, bs;   // one entry per round
  std::vector<double> payoffs;       // horizon x dim, row-major
  std::vector<double> final_average; // compensated running average at T
  std::vector<long> grid;
  std::vector<std::vector<double>> average_at;  // running average at grid rounds

  std::span<const double> payoff_at(long t) const {  // 0-based round
    return {payoffs.data() + t * dim, static_cast<size_t>(dim)};
  }
  // Plain recomputation of the average over the first t rounds.
  std::vector<double> recompute_average(long t) const;
};

// Runs the protocol for config.horizon rounds. Strategy failures abort with
// a SolverError carrying the round index.
Trajectory run(const RunConfig& config, const ObjectivePair& pair, Player& player,
               Nature& nature);

// Metric value that may be undefined for a prefix (e.g. a group never
// appeared); carries the reason instead of a number.
struct Flagged {
  std::optional<double> value;
  std::string note;
};

// Criterion values over the first `upto` rounds (0 = full horizon). The
// group-weighted variants use the true marginals passed in, never
// estimates.
double metric_calibration(const Trajectory& traj, const CalibrationGrid& grid,
                          long upto = 0);
double metric_group_calibration(const Trajectory& traj, const CalibrationGrid& grid,
                                std::span<const double> gammas, long upto = 0);
Flagged metric_dp(const Trajectory& traj, const CalibrationGrid& grid,
                  std::span<const double> gammas, long upto = 0);
double metric_regret(const Trajectory& traj, const RewardTensor& r, long upto = 0);
double metric_group_regret(const Trajectory& traj, const RewardTensor& r, long upto = 0);
Flagged metric_equalized_payoffs(const Trajectory& traj, const RewardTensor& r,
                                 std::span<const double> gammas, long upto = 0);
std::vector<std::pair<long, double>> metric_distance_series(const Trajectory& traj,
                                                            const TargetSet& set);

// Inputs that decide which criterion columns are defined.
struct MetricSetup {
  std::optional<CalibrationGrid> grid;
  std::optional<RewardTensor> rewards;   // regret criteria
  std::optional<RewardTensor> eq_rewards;  // equalized average payoffs
  std::vector<double> gammas;
  const TargetSet* target = nullptr;
};

// Trajectory CSV with the fixed column set
//   t,d_t,C_t,Cgr_t,D_t,P_t,R_t,Rgr_t
// sampled on the trajectory grid; undefined metrics stay blank.
std::string trajectory_csv(const Trajectory& traj, const MetricSetup& setup);

}  // namespace blackwell
