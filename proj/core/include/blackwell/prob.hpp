#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blackwell/errors.hpp"
#include "blackwell/rng.hpp"

namespace blackwell {

// Validation tolerances for probability data. A vector is accepted when its
// mass is within kMassSlack of 1 and is then renormalized exactly; entries
// must be nonnegative. Downstream exact checks use kProbTol.
inline constexpr double kProbTol = 1e-12;
inline constexpr double kMassSlack = 1e-9;

// Probability vector over a finite index set.
class MixedAction {
 public:
  explicit MixedAction(std::vector<double> weights);

  static MixedAction dirac(int index, int size);
  static MixedAction uniform(int size);

  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }

  bool operator==(const MixedAction& other) const { return w_ == other.w_; }

 private:
  std::vector<double> w_;
};

// Finite context space: labelled non-sensitive contexts and |S| groups.
struct ContextSpace {
  std::vector<std::string> x_labels;
  int n_sensitive = 0;

  ContextSpace() = default;
  ContextSpace(std::vector<std::string> labels, int n_groups);

  int n_x() const { return static_cast<int>(x_labels.size()); }
  int n_s() const { return n_sensitive; }

  bool operator==(const ContextSpace& o) const {
    return x_labels == o.x_labels && n_sensitive == o.n_sensitive;
  }
};

// Joint distribution over X x S, stored row-major by x.
class JointDistribution {
 public:
  JointDistribution(ContextSpace space, std::vector<double> table);

  const ContextSpace& space() const { return space_; }
  int n_x() const { return space_.n_x(); }
  int n_s() const { return space_.n_s(); }
  double at(int x, int s) const { return q_[x * space_.n_s() + s]; }
  const std::vector<double>& table() const { return q_; }

  // Group marginals gamma_s.
  std::vector<double> marginal_gamma() const;

  // Conditional of x given s; requires gamma_s > 0.
  MixedAction conditional_given_s(int s) const;

  bool operator==(const JointDistribution& o) const {
    return space_ == o.space_ && q_ == o.q_;
  }

 private:
  ContextSpace space_;
  std::vector<double> q_;
};

// Total variation = half the l1 distance; shapes must agree.
double tv_distance(const MixedAction& p, const MixedAction& q);
double tv_distance(const JointDistribution& p, const JointDistribution& q);

// Seeded draws by inverse CDF over the stored weights. Deterministic for a
// fixed engine state and call sequence.
int sample(const MixedAction& p, Rng& rng);
std::pair<int, int> sample(const JointDistribution& q, Rng& rng);

// Density comparison classes of x under the two group conditionals:
// -1 where Q^0 dominates, +1 where Q^1 dominates, 0 where they tie.
// Requires two groups with positive mass.
std::vector<int> density_partition(const JointDistribution& q);

// Config block round-trip: a list of (x_label, s_index, probability) triples
// with probabilities as decimal strings. `config_triples` emits every entry,
// including zeros, in (x, s) order; shortest round-trip formatting.
struct JointTriple {
  std::string x_label;
  int s_index = 0;
  std::string probability;
};
std::vector<JointTriple> config_triples(const JointDistribution& q);
JointDistribution joint_from_triples(const ContextSpace& space,
                                     const std::vector<JointTriple>& triples);

// Locale-independent decimal string conversions used by every config path.
double parse_decimal(const std::string& text);
std::string format_decimal(double value);

}  // namespace blackwell
