#include "blackwell/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "blackwell/lp.hpp"

namespace blackwell {

namespace {

constexpr double kValueTol = 1e-9;

std::string dump_matrix(const MatrixGame& g) {
  std::string out = "[";
  for (int r = 0; r < g.rows; ++r) {
    out += r == 0 ? "[" : " [";
    for (int c = 0; c < g.cols; ++c) {
      out += format_decimal(g.at(r, c));
      if (c + 1 < g.cols) out += ", ";
    }
    out += "]";
  }
  return out + "]";
}

void validate_game(const MatrixGame& g) {
  if (g.rows < 1 || g.cols < 1) throw ValidationError("MatrixGame: empty matrix");
  if (g.m.size() != static_cast<size_t>(g.rows) * g.cols) {
    throw DimensionError("MatrixGame: storage size mismatch");
  }
  for (double v : g.m) {
    if (!std::isfinite(v)) throw ValidationError("MatrixGame: non-finite entry");
  }
}

// Worst-case value of a fixed row strategy: max_b (p'M)_b.
double row_guarantee(const MatrixGame& g, const MixedAction& p) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < g.cols; ++c) {
    double v = 0.0;
    for (int r = 0; r < g.rows; ++r) v += p[r] * g.at(r, c);
    worst = std::max(worst, v);
  }
  return worst;
}

MixedAction normalize_or_throw(std::vector<double> w, const MatrixGame& g, const char* side) {
  double sum = 0.0;
  for (double& v : w) {
    v = std::max(v, 0.0);
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw SolverError(std::string("solve_matrix_game: ") + side +
                          " strategy mass " + format_decimal(sum) + " for matrix " +
                          dump_matrix(g),
                      std::abs(sum - 1.0));
  }
  for (double& v : w) v /= sum;
  return MixedAction(std::move(w));
}

}  // namespace

GameSolution solve_matrix_game(const MatrixGame& g) {
  validate_game(g);
  const int na = g.rows, nb = g.cols;
  const double shift = 1.0 - *std::min_element(g.m.begin(), g.m.end());

  // Variables (p_0..p_{na-1}, u): minimize u subject to
  //   sum_a (M[a][b] + shift) p_a - u <= 0 for each b, sum_a p_a = 1.
  // Shifting makes the optimal u positive, so u >= 0 is harmless.
  LpProblem lp;
  lp.n = na + 1;
  lp.c.assign(lp.n, 0.0);
  lp.c[na] = 1.0;
  for (int b = 0; b < nb; ++b) {
    std::vector<double> row(lp.n, 0.0);
    for (int a = 0; a < na; ++a) row[a] = g.at(a, b) + shift;
    row[na] = -1.0;
    lp.a_ub.push_back(std::move(row));
    lp.b_ub.push_back(0.0);
  }
  {
    std::vector<double> row(lp.n, 0.0);
    for (int a = 0; a < na; ++a) row[a] = 1.0;
    lp.a_eq.push_back(std::move(row));
    lp.b_eq.push_back(1.0);
  }
  LpSolution sol = solve_lp(lp);

  std::vector<double> pw(sol.x.begin(), sol.x.begin() + na);
  MixedAction p = normalize_or_throw(std::move(pw), g, "row");
  MixedAction q = normalize_or_throw(sol.mult_ub, g, "column");
  const double value = sol.objective - shift;

  // Canonical representative when the optimum is not unique.
  const MixedAction uniform = MixedAction::uniform(na);
  if (row_guarantee(g, uniform) <= value + kValueTol) p = uniform;

  return {value, std::move(p), std::move(q)};
}

WeightedMinmaxSolution solve_weighted_minmax(std::span<const WeightedBlock> blocks) {
  if (blocks.empty()) throw ValidationError("solve_weighted_minmax: no blocks");
  const int na = blocks.front().matrix.rows;
  double min_entry = std::numeric_limits<double>::infinity();
  std::vector<int> active;
  for (int s = 0; s < static_cast<int>(blocks.size()); ++s) {
    const auto& blk = blocks[s];
    validate_game(blk.matrix);
    if (blk.matrix.rows != na) {
      throw DimensionError("solve_weighted_minmax: blocks differ in row dimension");
    }
    if (!(blk.weight >= 0.0)) throw ValidationError("solve_weighted_minmax: negative weight");
    if (blk.weight > 0.0) {
      active.push_back(s);
      min_entry = std::min(min_entry, *std::min_element(blk.matrix.m.begin(), blk.matrix.m.end()));
    }
  }
  if (active.empty()) return {MixedAction::uniform(na), 0.0};

  const double shift = 1.0 - min_entry;
  double weight_sum = 0.0;

  // Variables (p, v_s for active s): minimize sum_s w_s v_s subject to
  //   sum_a (M_s[a][b] + shift) p_a - v_s <= 0, sum p = 1.
  LpProblem lp;
  const int nv = static_cast<int>(active.size());
  lp.n = na + nv;
  lp.c.assign(lp.n, 0.0);
  for (int i = 0; i < nv; ++i) {
    lp.c[na + i] = blocks[active[i]].weight;
    weight_sum += blocks[active[i]].weight;
  }
  for (int i = 0; i < nv; ++i) {
    const MatrixGame& m = blocks[active[i]].matrix;
    for (int b = 0; b < m.cols; ++b) {
      std::vector<double> row(lp.n, 0.0);
      for (int a = 0; a < na; ++a) row[a] = m.at(a, b) + shift;
      row[na + i] = -1.0;
      lp.a_ub.push_back(std::move(row));
      lp.b_ub.push_back(0.0);
    }
  }
  {
    std::vector<double> row(lp.n, 0.0);
    for (int a = 0; a < na; ++a) row[a] = 1.0;
    lp.a_eq.push_back(std::move(row));
    lp.b_eq.push_back(1.0);
  }
  LpSolution sol = solve_lp(lp);

  std::vector<double> pw(sol.x.begin(), sol.x.begin() + na);
  double mass = 0.0;
  for (double& w : pw) {
    w = std::max(w, 0.0);
    mass += w;
  }
  if (std::abs(mass - 1.0) > 1e-6) {
    throw SolverError("solve_weighted_minmax: strategy mass " + format_decimal(mass),
                      std::abs(mass - 1.0));
  }
  for (double& w : pw) w /= mass;
  MixedAction p(std::move(pw));
  const double value = sol.objective - shift * weight_sum;

  auto objective_of = [&](const MixedAction& cand) {
    double acc = 0.0;
    for (const auto& blk : blocks) {
      if (blk.weight == 0.0) continue;
      acc += blk.weight * row_guarantee(blk.matrix, cand);
    }
    return acc;
  };
  const MixedAction uniform = MixedAction::uniform(na);
  if (objective_of(uniform) <= value + kValueTol) return {uniform, value};
  return {std::move(p), value};
}

NatureFamily make_unaware_family(int n_x, int n_s, std::vector<MixedAction> per_x) {
  if (static_cast<int>(per_x.size()) != n_x) {
    throw DimensionError("make_unaware_family: need one action per context");
  }
  return {Monitoring::unaware, n_x, n_s, std::move(per_x)};
}

NatureFamily make_aware_family(int n_x, int n_s, std::vector<MixedAction> per_xs) {
  if (static_cast<int>(per_xs.size()) != n_x * n_s) {
    throw DimensionError("make_aware_family: need one action per (context, group)");
  }
  return {Monitoring::aware, n_x, n_s, std::move(per_xs)};
}

std::vector<double> expected_payoff(const PayoffTensor& payoff, const JointDistribution& q,
                                    std::span<const MixedAction> player_family,
                                    const NatureFamily& nature) {
  if (static_cast<int>(player_family.size()) != payoff.n_x()) {
    throw DimensionError("expected_payoff: family size mismatch");
  }
  std::vector<double> out(payoff.dim(), 0.0);
  for (int x = 0; x < payoff.n_x(); ++x) {
    for (int s = 0; s < payoff.n_s(); ++s) {
      const double w = q.at(x, s);
      if (w == 0.0) continue;
      payoff.add_mixed(player_family[x], nature.at(x, s), x, s, w, out);
    }
  }
  return out;
}

FrankWolfeResult frank_wolfe_min_distance(const PayoffTensor& payoff,
                                          const JointDistribution& q,
                                          const NatureFamily& nature, const TargetSet& set,
                                          int max_iter, double gap_tol,
                                          double early_exit_distance) {
  const int nx = payoff.n_x(), na = payoff.n_actions(), d = payoff.dim();
  if (set.dim() != d) throw DimensionError("frank_wolfe_min_distance: set dim mismatch");
  if (nature.n_x != nx) throw DimensionError("frank_wolfe_min_distance: nature family shape");

  // g[x][a] = sum_s Q(x,s) m(a, q^{G(x,s)}, x, s); the expected payoff is
  // linear in the per-context action weights with these coefficients.
  std::vector<std::vector<double>> g(static_cast<size_t>(nx) * na, std::vector<double>(d, 0.0));
  for (int x = 0; x < nx; ++x) {
    for (int a = 0; a < na; ++a) {
      auto& cell = g[static_cast<size_t>(x) * na + a];
      for (int s = 0; s < payoff.n_s(); ++s) {
        const double w = q.at(x, s);
        if (w == 0.0) continue;
        payoff.add_row_mixed(a, nature.at(x, s), x, s, w, cell);
      }
    }
  }

  std::vector<std::vector<double>> weights(nx, std::vector<double>(na, 1.0 / na));
  std::vector<double> z(d, 0.0);
  for (int x = 0; x < nx; ++x) {
    for (int a = 0; a < na; ++a) {
      for (int i = 0; i < d; ++i) z[i] += weights[x][a] * g[static_cast<size_t>(x) * na + a][i];
    }
  }

  FrankWolfeResult result;
  std::vector<double> zs(d), resid(d);
  std::vector<int> pick(nx);
  double best = std::numeric_limits<double>::infinity();
  double lb2 = 0.0;  // certified lower bound on the minimal squared distance
  std::vector<std::vector<double>> best_weights = weights;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    const std::vector<double> c = set.project(z);
    double dist2 = 0.0;
    for (int i = 0; i < d; ++i) {
      resid[i] = z[i] - c[i];
      dist2 += resid[i] * resid[i];
    }
    if (dist2 < best) {
      best = dist2;
      best_weights = weights;
    }
    if (dist2 == 0.0 ||
        (early_exit_distance > 0.0 && best <= early_exit_distance * early_exit_distance)) {
      result.converged = true;
      break;
    }
    // Linear subproblem: per context, the vertex minimizing <resid, g[x][a]>.
    std::fill(zs.begin(), zs.end(), 0.0);
    for (int x = 0; x < nx; ++x) {
      int arg = 0;
      double bestdot = std::numeric_limits<double>::infinity();
      for (int a = 0; a < na; ++a) {
        double dot = 0.0;
        const auto& cell = g[static_cast<size_t>(x) * na + a];
        for (int i = 0; i < d; ++i) dot += resid[i] * cell[i];
        if (dot < bestdot - kProbTol) {
          bestdot = dot;
          arg = a;
        }
      }
      pick[x] = arg;
      const auto& cell = g[static_cast<size_t>(x) * na + arg];
      for (int i = 0; i < d; ++i) zs[i] += cell[i];
    }
    double gap = 0.0, seg2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double dir = zs[i] - z[i];
      gap -= 2.0 * resid[i] * dir;
      seg2 += dir * dir;
    }
    lb2 = std::max(lb2, dist2 - gap);
    if (gap <= gap_tol || seg2 <= 0.0) {
      result.converged = true;
      break;
    }
    const double eta = std::clamp(0.5 * gap / seg2, 0.0, 1.0);
    for (int x = 0; x < nx; ++x) {
      for (int a = 0; a < na; ++a) weights[x][a] *= (1.0 - eta);
      weights[x][pick[x]] += eta;
    }
    for (int i = 0; i < d; ++i) z[i] += eta * (zs[i] - z[i]);
  }
  result.iterations = iter;
  result.distance = std::sqrt(best);
  result.lower_bound = std::sqrt(std::max(std::min(lb2, best), 0.0));
  result.family.reserve(nx);
  for (int x = 0; x < nx; ++x) result.family.emplace_back(best_weights[x]);
  return result;
}

std::vector<std::vector<double>> simplex_grid(int dim, int resolution) {
  if (dim < 1 || resolution < 1) throw ValidationError("simplex_grid: bad arguments");
  std::vector<std::vector<double>> out;
  std::vector<int> counts(dim, 0);
  // Lexicographic enumeration of compositions of `resolution` into dim parts.
  auto rec = [&](auto&& self, int coord, int remaining) -> void {
    if (coord == dim - 1) {
      counts[coord] = remaining;
      std::vector<double> pt(dim);
      for (int i = 0; i < dim; ++i) pt[i] = static_cast<double>(counts[i]) / resolution;
      out.push_back(std::move(pt));
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      counts[coord] = k;
      self(self, coord + 1, remaining - k);
    }
  };
  rec(rec, 0, resolution);
  return out;
}

ConditionCheckResult check_condition_bruteforce(const PayoffTensor& payoff,
                                                const JointDistribution& q,
                                                const TargetSet& set, Monitoring monitoring,
                                                int grid_resolution, double distance_tol,
                                                int n_threads) {
  const int nx = payoff.n_x(), ns = payoff.n_s(), nb = payoff.n_outcomes();

  // Only observations Nature can actually receive matter; zero-mass
  // observations keep a uniform placeholder in the certificate.
  std::vector<std::pair<int, int>> obs;  // (x, s); s = -1 under unawareness
  for (int x = 0; x < nx; ++x) {
    if (monitoring == Monitoring::unaware) {
      double mass = 0.0;
      for (int s = 0; s < ns; ++s) mass += q.at(x, s);
      if (mass > 0.0) obs.emplace_back(x, -1);
    } else {
      for (int s = 0; s < ns; ++s) {
        if (q.at(x, s) > 0.0) obs.emplace_back(x, s);
      }
    }
  }

  const std::vector<std::vector<double>> grid = simplex_grid(nb, grid_resolution);
  const double n_pts = static_cast<double>(grid.size());
  double total = 1.0;
  for (size_t i = 0; i < obs.size(); ++i) total *= n_pts;
  if (total > kConditionGridGuard) {
    throw GuardError("check_condition_bruteforce: family grid of about " +
                         format_decimal(total) + " points exceeds the guard of " +
                         format_decimal(kConditionGridGuard),
                     total);
  }
  const long long n_families = static_cast<long long>(total);

  auto family_for = [&](long long index) {
    std::vector<MixedAction> actions(
        monitoring == Monitoring::unaware ? nx : nx * ns,
        MixedAction::uniform(nb));
    long long rest = index;
    for (size_t o = 0; o < obs.size(); ++o) {
      const long long digit = rest % grid.size();
      rest /= grid.size();
      const auto [x, s] = obs[o];
      const int slot = monitoring == Monitoring::unaware ? x : x * ns + s;
      actions[slot] = MixedAction(grid[digit]);
    }
    NatureFamily fam;
    fam.mode = monitoring;
    fam.n_x = nx;
    fam.n_s = ns;
    fam.actions = std::move(actions);
    return fam;
  };

  struct Local {
    double worst = -1.0;
    double worst_lb = 0.0;
    long long worst_index = -1;
  };
  const int workers = std::max(1, n_threads);
  std::vector<Local> locals(workers);
  auto scan = [&](int w) {
    const long long lo = n_families * w / workers;
    const long long hi = n_families * (w + 1) / workers;
    for (long long idx = lo; idx < hi; ++idx) {
      const NatureFamily fam = family_for(idx);
      const FrankWolfeResult inner =
          frank_wolfe_min_distance(payoff, q, fam, set, 20000, 1e-10, distance_tol);
      if (inner.distance > locals[w].worst) {
        locals[w].worst = inner.distance;
        locals[w].worst_lb = inner.lower_bound;
        locals[w].worst_index = idx;
      }
    }
  };
  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(scan, w);
    for (auto& th : pool) th.join();
  }
  // Deterministic reduction: max distance, ties to the smallest family index.
  Local merged;
  for (const Local& l : locals) {
    if (l.worst_index < 0) continue;
    if (l.worst > merged.worst ||
        (l.worst == merged.worst && (merged.worst_index < 0 || l.worst_index < merged.worst_index))) {
      merged = l;
    }
  }

  ConditionCheckResult result;
  result.families_checked = n_families;
  result.inner_distance = merged.worst;
  result.certified_lower_bound = merged.worst_lb;
  result.worst_family = family_for(merged.worst_index);
  result.satisfied = merged.worst <= distance_tol;
  return result;
}

}  // namespace blackwell
