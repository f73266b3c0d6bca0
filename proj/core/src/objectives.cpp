#include "blackwell/objectives.hpp"

#include <algorithm>
#include <cmath>

namespace blackwell {

int CalibrationGrid::round_to_grid(double p) const {
  // level(k) = (k + 1/2)/N; the nearest k is round(p*N - 1/2) with the
  // midpoint case resolved toward the smaller index.
  const double target = p * n_levels - 0.5;
  int k = static_cast<int>(std::floor(target));
  k = std::clamp(k, 0, n_levels - 1);
  const int k2 = std::min(k + 1, n_levels - 1);
  const double d1 = std::abs(p - level(k));
  const double d2 = std::abs(p - level(k2));
  return d2 < d1 ? k2 : k;
}

RewardTensor::RewardTensor(int na, int nb, int nx, int ns, std::vector<double> v)
    : n_a(na), n_b(nb), n_x(nx), n_s(ns), values(std::move(v)) {
  if (na < 1 || nb < 1 || nx < 1 || ns < 1) throw ValidationError("RewardTensor: empty axis");
  if (values.size() != static_cast<size_t>(na) * nb * nx * ns) {
    throw DimensionError("RewardTensor: values size mismatch");
  }
  for (double r : values) {
    if (!std::isfinite(r)) throw ValidationError("RewardTensor: non-finite reward");
  }
}

PayoffTensor::PayoffTensor(int na, int nb, int nx, int ns, int dim)
    : n_a_(na), n_b_(nb), n_x_(nx), n_s_(ns), dim_(dim) {
  if (na < 1 || nb < 1 || nx < 1 || ns < 1 || dim < 1) {
    throw ValidationError("PayoffTensor: empty axis");
  }
  e_.assign(static_cast<size_t>(na) * nb * nx * ns * dim, 0.0);
}

void PayoffTensor::refresh_bound() {
  double worst = 0.0;
  const size_t cells = e_.size() / dim_;
  for (size_t c = 0; c < cells; ++c) {
    double nrm2 = 0.0;
    for (int i = 0; i < dim_; ++i) {
      const double v = e_[c * dim_ + i];
      if (!std::isfinite(v)) throw ValidationError("PayoffTensor: non-finite entry");
      nrm2 += v * v;
    }
    worst = std::max(worst, nrm2);
  }
  bound_ = std::sqrt(worst);
}

void PayoffTensor::add_mixed(const MixedAction& p, const MixedAction& q, int x, int s,
                             double scale, std::span<double> out) const {
  if (p.size() != n_a_ || q.size() != n_b_) throw DimensionError("add_mixed: action mismatch");
  for (int a = 0; a < n_a_; ++a) {
    const double pa = p[a];
    if (pa == 0.0) continue;
    add_row_mixed(a, q, x, s, scale * pa, out);
  }
}

void PayoffTensor::add_row_mixed(int a, const MixedAction& q, int x, int s, double scale,
                                 std::span<double> out) const {
  for (int b = 0; b < n_b_; ++b) {
    const double w = scale * q[b];
    if (w == 0.0) continue;
    const std::span<const double> cell = at(a, b, x, s);
    for (int i = 0; i < dim_; ++i) out[i] += w * cell[i];
  }
}

namespace {

void check_two_groups(const ContextSpace& space, const char* what) {
  if (space.n_s() != 2) {
    throw ValidationError(std::string(what) + ": supported only for two groups");
  }
}

void check_gammas(std::span<const double> gammas, int ns, const char* what) {
  if (static_cast<int>(gammas.size()) != ns) {
    throw DimensionError(std::string(what) + ": gamma size mismatch");
  }
  for (double g : gammas) {
    if (!(g > 0.0)) throw DegenerateGroupError(std::string(what) + ": group with zero mass");
  }
}

}  // namespace

ObjectivePair build_calibration(const ContextSpace& space, int n_levels) {
  const CalibrationGrid grid(n_levels);
  const int nx = space.n_x(), ns = space.n_s();
  PayoffTensor m(n_levels, 2, nx, ns, n_levels);
  for (int k = 0; k < n_levels; ++k) {
    for (int b = 0; b < 2; ++b) {
      for (int x = 0; x < nx; ++x) {
        for (int s = 0; s < ns; ++s) m.at_mut(k, b, x, s)[k] = grid.level(k) - b;
      }
    }
  }
  m.refresh_bound();
  return {"calibration", std::move(m), TargetSet::l1_ball(n_levels, 1.0 / n_levels), false};
}

ObjectivePair build_group_calibration(const ContextSpace& space, int n_levels,
                                      std::span<const double> gammas) {
  const CalibrationGrid grid(n_levels);
  const int nx = space.n_x(), ns = space.n_s();
  check_gammas(gammas, ns, "build_group_calibration");
  PayoffTensor m(n_levels, 2, nx, ns, n_levels * ns);
  for (int k = 0; k < n_levels; ++k) {
    for (int b = 0; b < 2; ++b) {
      for (int x = 0; x < nx; ++x) {
        for (int s = 0; s < ns; ++s) {
          m.at_mut(k, b, x, s)[s * n_levels + k] = (grid.level(k) - b) / gammas[s];
        }
      }
    }
  }
  m.refresh_bound();
  return {"group_calibration", std::move(m),
          TargetSet::l1_ball(n_levels * ns, 1.0 / n_levels), true};
}

ObjectivePair build_no_regret(const ContextSpace& space, const RewardTensor& r) {
  const int na = r.n_a, nb = r.n_b, nx = space.n_x(), ns = space.n_s();
  if (r.n_x != nx || r.n_s != ns) throw DimensionError("build_no_regret: reward shape");
  PayoffTensor m(na, nb, nx, ns, na);
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < nb; ++b) {
      for (int x = 0; x < nx; ++x) {
        for (int s = 0; s < ns; ++s) {
          auto cell = m.at_mut(a, b, x, s);
          for (int ap = 0; ap < na; ++ap) cell[ap] = r.at(a, b, x, s) - r.at(ap, b, x, s);
        }
      }
    }
  }
  m.refresh_bound();
  return {"no_regret", std::move(m), TargetSet::orthant(na), false};
}

ObjectivePair build_group_no_regret(const ContextSpace& space, const RewardTensor& r) {
  const int na = r.n_a, nb = r.n_b, nx = space.n_x(), ns = space.n_s();
  if (r.n_x != nx || r.n_s != ns) throw DimensionError("build_group_no_regret: reward shape");
  PayoffTensor m(na, nb, nx, ns, na * ns);
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < nb; ++b) {
      for (int x = 0; x < nx; ++x) {
        for (int s = 0; s < ns; ++s) {
          auto cell = m.at_mut(a, b, x, s);
          for (int ap = 0; ap < na; ++ap) {
            cell[s * na + ap] = r.at(a, b, x, s) - r.at(ap, b, x, s);
          }
        }
      }
    }
  }
  m.refresh_bound();
  return {"group_no_regret", std::move(m), TargetSet::orthant(na * ns), false};
}

ObjectivePair build_demographic_parity(const ContextSpace& space, int n_levels,
                                       std::span<const double> gammas, double delta) {
  check_two_groups(space, "build_demographic_parity");
  const CalibrationGrid grid(n_levels);
  check_gammas(gammas, 2, "build_demographic_parity");
  if (delta < 0.0) throw ValidationError("build_demographic_parity: negative delta");
  const int nx = space.n_x();
  PayoffTensor m(n_levels, 2, nx, 2, 2);
  for (int k = 0; k < n_levels; ++k) {
    for (int b = 0; b < 2; ++b) {
      for (int x = 0; x < nx; ++x) {
        for (int s = 0; s < 2; ++s) m.at_mut(k, b, x, s)[s] = grid.level(k) / gammas[s];
      }
    }
  }
  m.refresh_bound();
  return {"demographic_parity", std::move(m), TargetSet::weighted_slab({1.0, -1.0}, delta),
          true};
}

ObjectivePair build_equalized_payoffs(const ContextSpace& space, const RewardTensor& r,
                                      std::span<const double> gammas, double epsilon) {
  check_two_groups(space, "build_equalized_payoffs");
  check_gammas(gammas, 2, "build_equalized_payoffs");
  if (epsilon < 0.0) throw ValidationError("build_equalized_payoffs: negative epsilon");
  const int na = r.n_a, nb = r.n_b, nx = space.n_x();
  if (r.n_x != nx || r.n_s != 2) throw DimensionError("build_equalized_payoffs: reward shape");
  PayoffTensor m(na, nb, nx, 2, 2);
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < nb; ++b) {
      for (int x = 0; x < nx; ++x) {
        for (int s = 0; s < 2; ++s) m.at_mut(a, b, x, s)[s] = r.at(a, b, x, s) / gammas[s];
      }
    }
  }
  m.refresh_bound();
  return {"equalized_payoffs", std::move(m), TargetSet::weighted_slab({1.0, -1.0}, epsilon),
          true};
}

PayoffTensor build_tilde_payoff(const ContextSpace& space, int n_levels) {
  check_two_groups(space, "build_tilde_payoff");
  const CalibrationGrid grid(n_levels);
  const int nx = space.n_x();
  PayoffTensor m(n_levels, 2, nx, 2, 2 * n_levels + 2);
  for (int k = 0; k < n_levels; ++k) {
    for (int b = 0; b < 2; ++b) {
      for (int x = 0; x < nx; ++x) {
        for (int s = 0; s < 2; ++s) {
          auto cell = m.at_mut(k, b, x, s);
          cell[s * n_levels + k] = grid.level(k) - b;
          cell[2 * n_levels + s] = grid.level(k);
        }
      }
    }
  }
  m.refresh_bound();
  return m;
}

TargetSet build_tilde_calibration_target(int n_levels, double gamma0, double gamma1,
                                         double epsilon) {
  if (!(gamma0 > 0.0) || !(gamma1 > 0.0)) {
    throw DegenerateGroupError("tilde calibration target: zero group mass");
  }
  if (epsilon < 0.0) throw ValidationError("tilde calibration target: negative epsilon");
  const int d = 2 * n_levels;
  std::vector<double> w(d);
  for (int i = 0; i < n_levels; ++i) w[i] = 1.0 / gamma0;
  for (int i = n_levels; i < d; ++i) w[i] = 1.0 / gamma1;
  std::vector<TargetSet> members;
  members.push_back(TargetSet::l1_ball(d, 1.0));
  members.push_back(TargetSet::weighted_l1_ball(std::move(w), epsilon));
  return TargetSet::intersection(std::move(members));
}

TargetSet build_tilde_parity_target(double gamma0, double gamma1, double delta) {
  if (!(gamma0 > 0.0) || !(gamma1 > 0.0)) {
    throw DegenerateGroupError("tilde parity target: zero group mass");
  }
  if (delta < 0.0) throw ValidationError("tilde parity target: negative delta");
  return TargetSet::weighted_slab({1.0 / gamma0, -1.0 / gamma1}, delta);
}

ObjectivePair build_tilde_tradeoff(const ContextSpace& space, int n_levels,
                                   std::span<const double> gammas, double tv, double tau) {
  check_two_groups(space, "build_tilde_tradeoff");
  check_gammas(gammas, 2, "build_tilde_tradeoff");
  if (tau < 0.0 || tau > 1.0) throw ValidationError("build_tilde_tradeoff: tau outside [0,1]");
  if (tv < 0.0 || tv > 1.0) throw ValidationError("build_tilde_tradeoff: tv outside [0,1]");
  PayoffTensor m = build_tilde_payoff(space, n_levels);
  std::vector<TargetSet> factors;
  factors.push_back(
      build_tilde_calibration_target(n_levels, gammas[0], gammas[1], (1.0 - tau) * tv));
  factors.push_back(build_tilde_parity_target(gammas[0], gammas[1], tau * tv));
  return {"tilde_tradeoff", std::move(m), TargetSet::product(std::move(factors)), false};
}

ObjectivePair combine(std::vector<ObjectivePair> pairs) {
  if (pairs.empty()) throw ValidationError("combine: empty objective list");
  if (pairs.size() == 1) return std::move(pairs.front());
  const PayoffTensor& head = pairs.front().payoff;
  int total_dim = 0;
  for (const auto& p : pairs) {
    if (p.payoff.n_actions() != head.n_actions() || p.payoff.n_outcomes() != head.n_outcomes() ||
        p.payoff.n_x() != head.n_x() || p.payoff.n_s() != head.n_s()) {
      throw DimensionError("combine: incompatible action or context spaces");
    }
    total_dim += p.payoff.dim();
  }
  PayoffTensor m(head.n_actions(), head.n_outcomes(), head.n_x(), head.n_s(), total_dim);
  for (int a = 0; a < head.n_actions(); ++a) {
    for (int b = 0; b < head.n_outcomes(); ++b) {
      for (int x = 0; x < head.n_x(); ++x) {
        for (int s = 0; s < head.n_s(); ++s) {
          auto cell = m.at_mut(a, b, x, s);
          int off = 0;
          for (const auto& p : pairs) {
            auto src = p.payoff.at(a, b, x, s);
            std::copy(src.begin(), src.end(), cell.begin() + off);
            off += p.payoff.dim();
          }
        }
      }
    }
  }
  m.refresh_bound();
  std::vector<TargetSet> targets;
  std::string name;
  bool gamma_dep = false;
  for (auto& p : pairs) {
    targets.push_back(std::move(p.target));
    if (!name.empty()) name += "+";
    name += p.name;
    gamma_dep = gamma_dep || p.gamma_dependent;
  }
  return {std::move(name), std::move(m), TargetSet::product(std::move(targets)), gamma_dep};
}

double payoff_range_constant(const ObjectivePair& pair) {
  const PayoffTensor& m = pair.payoff;
  const int na = m.n_actions(), nb = m.n_outcomes(), nx = m.n_x(), ns = m.n_s();
  const int d = m.dim();
  std::vector<std::span<const double>> cells;
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b)
      for (int x = 0; x < nx; ++x)
        for (int s = 0; s < ns; ++s) cells.push_back(m.at(a, b, x, s));
  std::vector<std::vector<double>> projections;
  projections.reserve(cells.size());
  for (const auto& c : cells) projections.push_back(pair.target.project(c));
  double worst = 0.0;
  for (const auto& c : cells) {
    for (const auto& p : projections) {
      double acc = 0.0;
      for (int i = 0; i < d; ++i) {
        const double diff = c[i] - p[i];
        acc += diff * diff;
      }
      worst = std::max(worst, acc);
    }
  }
  return worst;
}

}  // namespace blackwell
