#include "blackwell/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace blackwell {

EmpiricalJoint::EmpiricalJoint(ContextSpace space)
    : space_(std::move(space)),
      counts_(static_cast<size_t>(space_.n_x()) * space_.n_s(), 0),
      group_counts_(space_.n_s(), 0) {}

void EmpiricalJoint::add(int x, int s) {
  if (x < 0 || x >= space_.n_x() || s < 0 || s >= space_.n_s()) {
    throw DimensionError("EmpiricalJoint::add: index out of range");
  }
  ++counts_[x * space_.n_s() + s];
  ++group_counts_[s];
  ++total_;
}

double EmpiricalJoint::gamma_hat(int s) const {
  if (total_ < 1) throw ValidationError("EmpiricalJoint: no samples yet");
  return static_cast<double>(group_counts_[s]) / total_;
}

JointDistribution EmpiricalJoint::snapshot() const {
  if (total_ < 1) throw ValidationError("EmpiricalJoint: no samples yet");
  std::vector<double> table(counts_.size());
  for (size_t i = 0; i < counts_.size(); ++i) {
    table[i] = static_cast<double>(counts_[i]) / total_;
  }
  return JointDistribution(space_, std::move(table));
}

MixedAction EmpiricalJoint::conditional_hat(int s) const {
  if (group_counts_[s] == 0) return MixedAction::uniform(space_.n_x());
  std::vector<double> w(space_.n_x());
  for (int x = 0; x < space_.n_x(); ++x) {
    w[x] = static_cast<double>(count(x, s)) / group_counts_[s];
  }
  return MixedAction(std::move(w));
}

double tv_plugin(const EmpiricalJoint& emp) {
  if (emp.space().n_s() != 2) throw DimensionError("tv_plugin: needs exactly two groups");
  return tv_distance(emp.conditional_hat(0), emp.conditional_hat(1));
}

ConfidenceWidths plugin_widths(long t, long n0, long n1, int x_card) {
  if (t < 1) throw ValidationError("plugin_widths: t must be >= 1");
  if (n0 < 0 || n1 < 0 || n0 + n1 != t) throw ValidationError("plugin_widths: bad counts");
  const double log8t = std::log(8.0 * static_cast<double>(t));
  auto theta = [&](long n) {
    if (n == 0) return 1.0;
    return std::sqrt((x_card + log8t) / (2.0 * static_cast<double>(n)));
  };
  ConfidenceWidths w;
  w.t = t;
  w.alpha2 = std::min(1.0, std::sqrt(log8t / (2.0 * static_cast<double>(t))));
  w.alpha1 = std::min(1.0, theta(n0) + theta(n1));
  return w;
}

HatSetParams estimate_hat_params(const EmpiricalJoint& emp, double tau) {
  if (emp.space().n_s() != 2) throw DimensionError("estimate_hat_params: two groups only");
  if (tau < 0.0 || tau > 1.0) throw ValidationError("estimate_hat_params: tau outside [0,1]");
  HatSetParams hat;
  hat.gamma0_hat = emp.gamma_hat(0);
  hat.gamma1_hat = emp.gamma_hat(1);
  hat.tv_hat = tv_plugin(emp);
  hat.tau = tau;
  hat.widths =
      plugin_widths(emp.total(), emp.group_count(0), emp.group_count(1), emp.space().n_x());
  return hat;
}

std::pair<TargetSet, TargetSet> build_hat_sets(const HatSetParams& hat, int n_levels) {
  const double g0 = hat.gamma0_hat, g1 = hat.gamma1_hat;
  const double inflation = hat.widths.alpha1 + 4.0 * hat.widths.alpha2;
  const int d = 2 * n_levels;

  const double cal_rhs = g0 * g1 * hat.epsilon_hat() + inflation;
  TargetSet cal = TargetSet::l1_ball(d, 1.0);
  // sup of g1||v0||_1 + g0||v1||_1 over the unit l1 ball is max(g0, g1);
  // beyond that the data constraint is vacuous.
  if (cal_rhs < std::max(g0, g1)) {
    std::vector<double> w(d);
    for (int i = 0; i < n_levels; ++i) w[i] = g1;
    for (int i = n_levels; i < d; ++i) w[i] = g0;
    std::vector<TargetSet> members;
    members.push_back(std::move(cal));
    members.push_back(TargetSet::weighted_l1_ball(std::move(w), cal_rhs));
    cal = TargetSet::intersection(std::move(members));
  }

  const double dp_rhs = g0 * g1 * hat.delta_hat() + inflation;
  TargetSet dp = TargetSet::unit_box(2);
  if (dp_rhs < std::max(g0, g1)) {
    std::vector<TargetSet> members;
    members.push_back(std::move(dp));
    members.push_back(TargetSet::weighted_slab({g1, -g0}, dp_rhs));
    dp = TargetSet::intersection(std::move(members));
  }
  return {std::move(cal), std::move(dp)};
}

TargetSet hat_target_product(const HatSetParams& hat, int n_levels) {
  auto [cal, dp] = build_hat_sets(hat, n_levels);
  std::vector<TargetSet> factors;
  factors.push_back(std::move(cal));
  factors.push_back(std::move(dp));
  return TargetSet::product(std::move(factors));
}

namespace {

// Vertices of { u >= 0, u0 + u1 <= 1, c1 u0 + c0 u1 <= rhs } in the plane of
// block l1-norms (u_s = ||v_s||_1).
std::vector<std::pair<double, double>> norm_polytope_vertices(double c0, double c1,
                                                              double rhs) {
  std::vector<std::pair<double, double>> v;
  v.emplace_back(0.0, 0.0);
  v.emplace_back(std::min(1.0, c1 > 0.0 ? rhs / c1 : 1.0), 0.0);
  v.emplace_back(0.0, std::min(1.0, c0 > 0.0 ? rhs / c0 : 1.0));
  // Crossing of u0 + u1 = 1 with c1 u0 + c0 u1 = rhs.
  const double det = c1 - c0;
  if (std::abs(det) > 1e-15) {
    const double u0 = (rhs - c0) / det;
    const double u1 = 1.0 - u0;
    if (u0 >= -1e-12 && u1 >= -1e-12) v.emplace_back(std::max(u0, 0.0), std::max(u1, 0.0));
  }
  return v;
}

}  // namespace

bool hat_sets_cover_tilde(const HatSetParams& hat, int n_levels, double gamma0,
                          double gamma1, double tv, double tau) {
  const double eps = (1.0 - tau) * tv;
  const double dlt = tau * tv;
  const double inflation = hat.widths.alpha1 + 4.0 * hat.widths.alpha2;
  const double tol = 1e-12;

  // Calibration block. Both sets constrain only the two block norms, so the
  // containment reduces to a 2-D polytope check.
  {
    const double hat_rhs = hat.gamma0_hat * hat.gamma1_hat * hat.epsilon_hat() + inflation;
    for (const auto& [u0, u1] :
         norm_polytope_vertices(gamma0, gamma1, gamma0 * gamma1 * eps)) {
      if (hat.gamma1_hat * u0 + hat.gamma0_hat * u1 > hat_rhs + tol) return false;
    }
  }

  // Parity block: true set is the box-clipped slab |g1 u - g0 v| <= g0 g1 dlt.
  {
    const double true_rhs = gamma0 * gamma1 * dlt;
    const double hat_rhs = hat.gamma0_hat * hat.gamma1_hat * hat.delta_hat() + inflation;
    std::vector<std::pair<double, double>> vertices;
    for (double u : {0.0, 1.0}) {
      for (double v : {0.0, 1.0}) {
        if (std::abs(gamma1 * u - gamma0 * v) <= true_rhs + tol) vertices.emplace_back(u, v);
      }
    }
    // Slab boundary crossing the box edges.
    for (double sgn : {1.0, -1.0}) {
      const double c = sgn * true_rhs;  // gamma1 u - gamma0 v = c
      for (double u : {0.0, 1.0}) {
        if (gamma0 > 0.0) {
          const double v = (gamma1 * u - c) / gamma0;
          if (v >= -tol && v <= 1.0 + tol) vertices.emplace_back(u, std::clamp(v, 0.0, 1.0));
        }
      }
      for (double v : {0.0, 1.0}) {
        if (gamma1 > 0.0) {
          const double u = (c + gamma0 * v) / gamma1;
          if (u >= -tol && u <= 1.0 + tol) vertices.emplace_back(std::clamp(u, 0.0, 1.0), v);
        }
      }
    }
    for (const auto& [u, v] : vertices) {
      if (std::abs(hat.gamma1_hat * u - hat.gamma0_hat * v) > hat_rhs + tol) return false;
    }
  }
  return true;
}

long phase_start(int r) {
  if (r < 0) throw ValidationError("phase_start: negative phase");
  return 1L << r;
}

int phase_index(long t) {
  if (t < 1) throw ValidationError("phase_index: t must be >= 1");
  int r = 0;
  while ((2L << r) <= t) ++r;
  return r;
}

std::vector<DiagnosticRow> assumption1_diagnostic(const JointDistribution& q,
                                                  const std::vector<long>& t_grid,
                                                  int n_reps, std::uint64_t seed) {
  if (n_reps < 2) throw ValidationError("assumption1_diagnostic: need at least two reps");
  std::vector<DiagnosticRow> rows;
  rows.reserve(t_grid.size());
  for (size_t gi = 0; gi < t_grid.size(); ++gi) {
    const long t = t_grid[gi];
    if (t < 1) throw ValidationError("assumption1_diagnostic: bad grid entry");
    double sum = 0.0, sum2 = 0.0;
    for (int rep = 0; rep < n_reps; ++rep) {
      Rng rng = make_stream(seed, kFirstReplica + gi * static_cast<size_t>(n_reps) + rep);
      EmpiricalJoint emp(q.space());
      for (long i = 0; i < t; ++i) {
        auto [x, s] = sample(q, rng);
        emp.add(x, s);
      }
      const double tv = tv_distance(emp.snapshot(), q);
      sum += tv * tv;
      sum2 += tv * tv * tv * tv;
    }
    DiagnosticRow row;
    row.t = t;
    row.mean_tv2 = sum / n_reps;
    row.t_times_mean = row.mean_tv2 * t;
    const double var = std::max(0.0, (sum2 - sum * sum / n_reps) / (n_reps - 1));
    row.std_error = std::sqrt(var / n_reps);
    rows.push_back(row);
  }
  return rows;
}

std::string diagnostic_csv(const std::vector<DiagnosticRow>& rows) {
  std::string out = "t,mean_tv2,t_times_mean_tv2,stderr\n";
  for (const auto& r : rows) {
    out += std::to_string(r.t) + "," + format_decimal(r.mean_tv2) + "," +
           format_decimal(r.t_times_mean) + "," + format_decimal(r.std_error) + "\n";
  }
  return out;
}

}  // namespace blackwell
