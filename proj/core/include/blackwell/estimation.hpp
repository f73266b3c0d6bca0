#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "blackwell/geometry.hpp"
#include "blackwell/objectives.hpp"
#include "blackwell/prob.hpp"

namespace blackwell {

// Running empirical joint over X x S. Mutable, single-owner per trajectory.
class EmpiricalJoint {
 public:
  explicit EmpiricalJoint(ContextSpace space);

  void add(int x, int s);
  long total() const { return total_; }
  long count(int x, int s) const { return counts_[x * space_.n_s() + s]; }
  long group_count(int s) const { return group_counts_[s]; }
  const ContextSpace& space() const { return space_; }

  double gamma_hat(int s) const;  // group_count / total, total >= 1
  // Empirical frequencies as a distribution; requires at least one sample.
  JointDistribution snapshot() const;
  // Empirical conditional of x given s; uniform when the group is empty.
  MixedAction conditional_hat(int s) const;

 private:
  ContextSpace space_;
  std::vector<long> counts_;
  std::vector<long> group_counts_;
  long total_ = 0;
};

// Plug-in total variation between the two empirical group conditionals.
double tv_plugin(const EmpiricalJoint& emp);

// Confidence widths after t rounds with group counts (n0, n1) over a
// context set of size x_card:
//   alpha2 = 1 ^ sqrt(log(8t) / (2t))
//   alpha1 = 1 ^ (theta(n0) + theta(n1)),
//     theta(0) = 1, theta(n) = sqrt((x_card + log(8t)) / (2n)).
// Natural logarithm throughout.
struct ConfidenceWidths {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  long t = 0;
};
ConfidenceWidths plugin_widths(long t, long n0, long n1, int x_card);

// Everything needed to instantiate the data-driven target sets at a phase
// boundary.
struct HatSetParams {
  double gamma0_hat = 0.0;
  double gamma1_hat = 0.0;
  double tv_hat = 0.0;
  double tau = 0.0;
  ConfidenceWidths widths;

  double epsilon_hat() const { return (1.0 - tau) * tv_hat; }
  double delta_hat() const { return tau * tv_hat; }
};

HatSetParams estimate_hat_params(const EmpiricalJoint& emp, double tau);

// Data-driven supersets of the two tilde targets:
//   calibration:  { v in unit l1 ball :
//                   g1^ ||v_0||_1 + g0^ ||v_1||_1 <= g0^ g1^ eps^ + a1 + 4 a2 }
//   parity:       { (u,v) in [0,1]^2 : |g1^ u - g0^ v| <= g0^ g1^ dlt^ + a1 + 4 a2 }
// When the inflated budget exceeds anything attainable inside the base set
// the constraint is dropped, leaving the unit l1 ball / unit box.
std::pair<TargetSet, TargetSet> build_hat_sets(const HatSetParams& hat, int n_levels);
TargetSet hat_target_product(const HatSetParams& hat, int n_levels);

// Exact containment of the true tilde target in the hat sets, via the
// vertices of the low-dimensional polytopes involved.
bool hat_sets_cover_tilde(const HatSetParams& hat, int n_levels, double gamma0,
                          double gamma1, double tv, double tau);

// Doubling schedule T_r = 2^r.
long phase_start(int r);
int phase_index(long t);  // floor(log2 t), t >= 1

// Monte-Carlo table of t -> estimate of E[TV^2(empirical joint after t
// samples, q)], with one child stream per (grid point, replication).
struct DiagnosticRow {
  long t = 0;
  double mean_tv2 = 0.0;
  double t_times_mean = 0.0;
  double std_error = 0.0;
};
std::vector<DiagnosticRow> assumption1_diagnostic(const JointDistribution& q,
                                                  const std::vector<long>& t_grid,
                                                  int n_reps, std::uint64_t seed);
std::string diagnostic_csv(const std::vector<DiagnosticRow>& rows);

}  // namespace blackwell
