#include "blackwell/prob.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace blackwell {

namespace {

void validate_and_renormalize(std::vector<double>& w, const char* what) {
  if (w.empty()) throw ValidationError(std::string(what) + ": empty weight vector");
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string(what) + ": negative or non-finite weight");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kMassSlack) {
    throw ValidationError(std::string(what) + ": total mass " + std::to_string(sum) +
                          " not within 1e-9 of 1");
  }
  for (double& v : w) v /= sum;
}

int draw_index(std::span<const double> w, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  const int n = static_cast<int>(w.size());
  for (int i = 0; i < n; ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  // u landed in the rounding slack past the last positive weight.
  for (int i = n - 1; i >= 0; --i) {
    if (w[i] > 0.0) return i;
  }
  return n - 1;
}

}  // namespace

MixedAction::MixedAction(std::vector<double> weights) : w_(std::move(weights)) {
  validate_and_renormalize(w_, "MixedAction");
}

MixedAction MixedAction::dirac(int index, int size) {
  if (index < 0 || index >= size) throw ValidationError("dirac: index out of range");
  std::vector<double> w(size, 0.0);
  w[index] = 1.0;
  return MixedAction(std::move(w));
}

MixedAction MixedAction::uniform(int size) {
  if (size < 1) throw ValidationError("uniform: empty support");
  return MixedAction(std::vector<double>(size, 1.0 / size));
}

ContextSpace::ContextSpace(std::vector<std::string> labels, int n_groups)
    : x_labels(std::move(labels)), n_sensitive(n_groups) {
  if (x_labels.empty()) throw ValidationError("ContextSpace: no x labels");
  if (n_sensitive < 1) throw ValidationError("ContextSpace: need at least one group");
  std::set<std::string> uniq(x_labels.begin(), x_labels.end());
  if (uniq.size() != x_labels.size()) {
    throw ValidationError("ContextSpace: duplicate x labels");
  }
}

JointDistribution::JointDistribution(ContextSpace space, std::vector<double> table)
    : space_(std::move(space)), q_(std::move(table)) {
  if (static_cast<int>(q_.size()) != space_.n_x() * space_.n_s()) {
    throw DimensionError("JointDistribution: table size != |X|*|S|");
  }
  validate_and_renormalize(q_, "JointDistribution");
}

std::vector<double> JointDistribution::marginal_gamma() const {
  std::vector<double> g(space_.n_s(), 0.0);
  for (int x = 0; x < space_.n_x(); ++x) {
    for (int s = 0; s < space_.n_s(); ++s) g[s] += at(x, s);
  }
  return g;
}

MixedAction JointDistribution::conditional_given_s(int s) const {
  if (s < 0 || s >= space_.n_s()) throw DimensionError("conditional_given_s: bad group");
  double gamma = 0.0;
  for (int x = 0; x < space_.n_x(); ++x) gamma += at(x, s);
  if (gamma <= 0.0) {
    throw DegenerateGroupError("conditional_given_s: group has zero mass");
  }
  std::vector<double> w(space_.n_x());
  for (int x = 0; x < space_.n_x(); ++x) w[x] = at(x, s) / gamma;
  return MixedAction(std::move(w));
}

namespace {
double half_l1(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return 0.5 * acc;
}
}  // namespace

double tv_distance(const MixedAction& p, const MixedAction& q) {
  if (p.size() != q.size()) throw DimensionError("tv_distance: size mismatch");
  return half_l1(p.weights(), q.weights());
}

double tv_distance(const JointDistribution& p, const JointDistribution& q) {
  if (!(p.space() == q.space())) throw DimensionError("tv_distance: space mismatch");
  return half_l1(p.table(), q.table());
}

int sample(const MixedAction& p, Rng& rng) { return draw_index(p.weights(), rng); }

std::pair<int, int> sample(const JointDistribution& q, Rng& rng) {
  const int flat = draw_index(q.table(), rng);
  return {flat / q.n_s(), flat % q.n_s()};
}

std::vector<int> density_partition(const JointDistribution& q) {
  if (q.n_s() != 2) throw DimensionError("density_partition: needs exactly two groups");
  const MixedAction q0 = q.conditional_given_s(0);
  const MixedAction q1 = q.conditional_given_s(1);
  std::vector<int> part(q.n_x(), 0);
  for (int x = 0; x < q.n_x(); ++x) {
    if (q0[x] > q1[x]) part[x] = -1;
    else if (q1[x] > q0[x]) part[x] = 1;
  }
  return part;
}

std::vector<JointTriple> config_triples(const JointDistribution& q) {
  std::vector<JointTriple> out;
  out.reserve(q.n_x() * q.n_s());
  for (int x = 0; x < q.n_x(); ++x) {
    for (int s = 0; s < q.n_s(); ++s) {
      out.push_back({q.space().x_labels[x], s, format_decimal(q.at(x, s))});
    }
  }
  return out;
}

JointDistribution joint_from_triples(const ContextSpace& space,
                                     const std::vector<JointTriple>& triples) {
  std::vector<double> table(space.n_x() * space.n_s(), 0.0);
  for (const auto& t : triples) {
    auto it = std::find(space.x_labels.begin(), space.x_labels.end(), t.x_label);
    if (it == space.x_labels.end()) {
      throw ValidationError("joint_from_triples: unknown x label '" + t.x_label + "'");
    }
    if (t.s_index < 0 || t.s_index >= space.n_s()) {
      throw ValidationError("joint_from_triples: group index out of range");
    }
    const int x = static_cast<int>(it - space.x_labels.begin());
    table[x * space.n_s() + t.s_index] += parse_decimal(t.probability);
  }
  return JointDistribution(space, std::move(table));
}

double parse_decimal(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ValidationError("parse_decimal: bad number '" + text + "'");
  }
  return value;
}

std::string format_decimal(double value) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw ValidationError("format_decimal failed");
  return std::string(buf, ptr);
}

}  // namespace blackwell
