#include "blackwell/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blackwell/kahan.hpp"

namespace blackwell {

std::vector<long> default_sample_grid(long horizon) {
  std::vector<long> grid;
  for (long t = 1; t < horizon; t *= 2) grid.push_back(t);
  if (horizon >= 1) grid.push_back(horizon);
  return grid;
}

std::vector<double> Trajectory::recompute_average(long t) const {
  std::vector<double> acc(dim, 0.0);
  for (long i = 0; i < t; ++i) {
    const auto row = payoff_at(i);
    for (int j = 0; j < dim; ++j) acc[j] += row[j];
  }
  if (t > 0) {
    for (double& v : acc) v /= static_cast<double>(t);
  }
  return acc;
}

Trajectory run(const RunConfig& config, const ObjectivePair& pair, Player& player,
               Nature& nature) {
  if (config.horizon < 1) throw ValidationError("run: horizon must be >= 1");
  const PayoffTensor& payoff = pair.payoff;
  if (payoff.n_x() != config.q.n_x() || payoff.n_s() != config.q.n_s()) {
    throw DimensionError("run: payoff and distribution shapes differ");
  }
  const long horizon = config.horizon;

  Trajectory traj;
  traj.dim = payoff.dim();
  traj.horizon = horizon;
  traj.xs.reserve(horizon);
  traj.ss.reserve(horizon);
  traj.as.reserve(horizon);
  traj.bs.reserve(horizon);
  traj.payoffs.resize(static_cast<size_t>(horizon) * payoff.dim());
  traj.grid = config.sample_grid.empty() ? default_sample_grid(horizon) : config.sample_grid;
  std::sort(traj.grid.begin(), traj.grid.end());
  traj.grid.erase(std::unique(traj.grid.begin(), traj.grid.end()), traj.grid.end());
  std::erase_if(traj.grid, [&](long t) { return t < 1 || t > horizon; });

  Rng ctx_rng = make_stream(config.seed, Stream::context);
  Rng player_rng = make_stream(config.seed, Stream::player);
  Rng nature_rng = make_stream(config.seed, Stream::nature);

  KahanVector average(payoff.dim());
  size_t next_grid = 0;

  for (long t = 0; t < horizon; ++t) {
    try {
      const auto [x, s] = sample(config.q, ctx_rng);

      Observation obs;
      obs.x = x;
      if (config.monitoring == Monitoring::aware) obs.s = s;

      const MixedAction p = player.act(x);
      const MixedAction qb = nature.act(obs);
      const int a = sample(p, player_rng);
      const int b = sample(qb, nature_rng);

      const auto cell = payoff.at(a, b, x, s);
      std::copy(cell.begin(), cell.end(),
                traj.payoffs.begin() + static_cast<size_t>(t) * payoff.dim());
      average.add(cell);

      traj.xs.push_back(x);
      traj.ss.push_back(s);
      traj.as.push_back(a);
      traj.bs.push_back(b);

      const RoundFeedback fb{x, s, a, b, cell};
      player.observe(fb);
      nature.observe(fb);
    } catch (const std::exception& e) {
      throw SolverError("run: round " + std::to_string(t + 1) + " failed: " + e.what());
    }

    while (next_grid < traj.grid.size() && traj.grid[next_grid] == t + 1) {
      traj.average_at.push_back(average.mean(t + 1));
      ++next_grid;
    }
  }
  traj.final_average = average.mean(horizon);
  return traj;
}

namespace {

long effective_horizon(const Trajectory& traj, long upto) {
  if (upto <= 0 || upto > traj.horizon) return traj.horizon;
  return upto;
}

}  // namespace

double metric_calibration(const Trajectory& traj, const CalibrationGrid& grid, long upto) {
  const long t_end = effective_horizon(traj, upto);
  std::vector<double> bins(grid.n_levels, 0.0);
  for (long t = 0; t < t_end; ++t) {
    const int k = traj.as[t];
    if (k < 0 || k >= grid.n_levels) {
      throw ValidationError("metric_calibration: action outside forecast grid");
    }
    bins[k] += grid.level(k) - traj.bs[t];
  }
  double acc = 0.0;
  for (double v : bins) acc += std::abs(v);
  return acc / static_cast<double>(t_end);
}

double metric_group_calibration(const Trajectory& traj, const CalibrationGrid& grid,
                                std::span<const double> gammas, long upto) {
  const long t_end = effective_horizon(traj, upto);
  const int ns = static_cast<int>(gammas.size());
  std::vector<double> bins(static_cast<size_t>(ns) * grid.n_levels, 0.0);
  for (long t = 0; t < t_end; ++t) {
    const int k = traj.as[t];
    if (k < 0 || k >= grid.n_levels) {
      throw ValidationError("metric_group_calibration: action outside forecast grid");
    }
    bins[traj.ss[t] * grid.n_levels + k] += grid.level(k) - traj.bs[t];
  }
  double acc = 0.0;
  for (int s = 0; s < ns; ++s) {
    if (!(gammas[s] > 0.0)) throw DegenerateGroupError("metric_group_calibration: gamma 0");
    for (int k = 0; k < grid.n_levels; ++k) {
      acc += std::abs(bins[s * grid.n_levels + k]) / (gammas[s] * t_end);
    }
  }
  return acc;
}

Flagged metric_dp(const Trajectory& traj, const CalibrationGrid& grid,
                  std::span<const double> gammas, long upto) {
  if (gammas.size() != 2) throw DimensionError("metric_dp: two groups only");
  const long t_end = effective_horizon(traj, upto);
  double sums[2] = {0.0, 0.0};
  long counts[2] = {0, 0};
  for (long t = 0; t < t_end; ++t) {
    const int s = traj.ss[t];
    sums[s] += grid.level(traj.as[t]);
    ++counts[s];
  }
  for (int s = 0; s < 2; ++s) {
    if (counts[s] == 0) {
      return {std::nullopt, "group " + std::to_string(s) + " never appeared"};
    }
  }
  const double d = sums[0] / (gammas[0] * t_end) - sums[1] / (gammas[1] * t_end);
  return {std::abs(d), ""};
}

double metric_regret(const Trajectory& traj, const RewardTensor& r, long upto) {
  const long t_end = effective_horizon(traj, upto);
  double realized = 0.0;
  std::vector<double> comparator(r.n_a, 0.0);
  for (long t = 0; t < t_end; ++t) {
    const int b = traj.bs[t], x = traj.xs[t], s = traj.ss[t];
    realized += r.at(traj.as[t], b, x, s);
    for (int ap = 0; ap < r.n_a; ++ap) comparator[ap] += r.at(ap, b, x, s);
  }
  double worst = std::numeric_limits<double>::infinity();
  for (int ap = 0; ap < r.n_a; ++ap) {
    worst = std::min(worst, (realized - comparator[ap]) / static_cast<double>(t_end));
  }
  return worst;
}

double metric_group_regret(const Trajectory& traj, const RewardTensor& r, long upto) {
  const long t_end = effective_horizon(traj, upto);
  std::vector<double> realized(r.n_s, 0.0);
  std::vector<double> comparator(static_cast<size_t>(r.n_s) * r.n_a, 0.0);
  for (long t = 0; t < t_end; ++t) {
    const int b = traj.bs[t], x = traj.xs[t], s = traj.ss[t];
    realized[s] += r.at(traj.as[t], b, x, s);
    for (int ap = 0; ap < r.n_a; ++ap) {
      comparator[s * r.n_a + ap] += r.at(ap, b, x, s);
    }
  }
  double worst = std::numeric_limits<double>::infinity();
  for (int s = 0; s < r.n_s; ++s) {
    for (int ap = 0; ap < r.n_a; ++ap) {
      worst = std::min(worst,
                       (realized[s] - comparator[s * r.n_a + ap]) / static_cast<double>(t_end));
    }
  }
  return worst;
}

Flagged metric_equalized_payoffs(const Trajectory& traj, const RewardTensor& r,
                                 std::span<const double> gammas, long upto) {
  if (gammas.size() != 2 || r.n_s != 2) throw DimensionError("metric_equalized_payoffs");
  const long t_end = effective_horizon(traj, upto);
  double sums[2] = {0.0, 0.0};
  long counts[2] = {0, 0};
  for (long t = 0; t < t_end; ++t) {
    const int s = traj.ss[t];
    sums[s] += r.at(traj.as[t], traj.bs[t], traj.xs[t], s);
    ++counts[s];
  }
  for (int s = 0; s < 2; ++s) {
    if (counts[s] == 0) {
      return {std::nullopt, "group " + std::to_string(s) + " never appeared"};
    }
  }
  const double d = sums[0] / (gammas[0] * t_end) - sums[1] / (gammas[1] * t_end);
  return {std::abs(d), ""};
}

std::vector<std::pair<long, double>> metric_distance_series(const Trajectory& traj,
                                                            const TargetSet& set) {
  if (set.dim() != traj.dim) throw DimensionError("metric_distance_series: dim mismatch");
  std::vector<std::pair<long, double>> out;
  out.reserve(traj.grid.size());
  for (size_t i = 0; i < traj.grid.size(); ++i) {
    out.emplace_back(traj.grid[i], set.distance(traj.average_at[i]));
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj, const MetricSetup& setup) {
  std::string out = "t,d_t,C_t,Cgr_t,D_t,P_t,R_t,Rgr_t\n";
  auto cell = [](std::optional<double> v) { return v ? format_decimal(*v) : std::string(); };
  for (size_t i = 0; i < traj.grid.size(); ++i) {
    const long t = traj.grid[i];
    std::optional<double> d_t, c_t, cgr_t, dp_t, p_t, r_t, rgr_t;
    if (setup.target != nullptr) d_t = setup.target->distance(traj.average_at[i]);
    if (setup.grid) {
      c_t = metric_calibration(traj, *setup.grid, t);
      if (!setup.gammas.empty()) {
        cgr_t = metric_group_calibration(traj, *setup.grid, setup.gammas, t);
        if (setup.gammas.size() == 2) {
          dp_t = metric_dp(traj, *setup.grid, setup.gammas, t).value;
        }
      }
    }
    if (setup.rewards) {
      r_t = metric_regret(traj, *setup.rewards, t);
      rgr_t = metric_group_regret(traj, *setup.rewards, t);
    }
    if (setup.eq_rewards && setup.gammas.size() == 2) {
      p_t = metric_equalized_payoffs(traj, *setup.eq_rewards, setup.gammas, t).value;
    }
    out += std::to_string(t) + "," + cell(d_t) + "," + cell(c_t) + "," + cell(cgr_t) + "," +
           cell(dp_t) + "," + cell(p_t) + "," + cell(r_t) + "," + cell(rgr_t) + "\n";
  }
  return out;
}

}  // namespace blackwell
