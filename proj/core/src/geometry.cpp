#include "blackwell/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "blackwell/stats.hpp"

namespace blackwell {

SolverStats& solver_stats() {
  thread_local SolverStats stats;
  return stats;
}

SolverStats drain_solver_stats() {
  SolverStats out = solver_stats();
  solver_stats() = SolverStats{};
  return out;
}

namespace {

int variant_dim(const TargetSet::Variant& v) {
  struct Visitor {
    int operator()(const Orthant& s) const { return s.dim; }
    int operator()(const WeightedL1Ball& s) const { return static_cast<int>(s.weights.size()); }
    int operator()(const WeightedSlab& s) const { return static_cast<int>(s.normal.size()); }
    int operator()(const Box& s) const { return static_cast<int>(s.lower.size()); }
    int operator()(const ProductSet& s) const {
      int d = 0;
      for (const auto& f : s.factors) d += f.dim();
      return d;
    }
    int operator()(const IntersectionSet& s) const { return s.members.front().dim(); }
  };
  return std::visit(Visitor{}, v);
}

void validate(const TargetSet::Variant& v) {
  struct Visitor {
    void operator()(const Orthant& s) const {
      if (s.dim < 1) throw ValidationError("Orthant: dim must be >= 1");
    }
    void operator()(const WeightedL1Ball& s) const {
      if (s.weights.empty()) throw ValidationError("WeightedL1Ball: empty");
      if (!(s.radius >= 0.0)) throw ValidationError("WeightedL1Ball: negative radius");
      for (double w : s.weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
          throw ValidationError("WeightedL1Ball: weights must be strictly positive");
        }
      }
    }
    void operator()(const WeightedSlab& s) const {
      if (s.normal.empty()) throw ValidationError("WeightedSlab: empty normal");
      if (!(s.half_width >= 0.0)) throw ValidationError("WeightedSlab: negative half-width");
    }
    void operator()(const Box& s) const {
      if (s.lower.empty() || s.lower.size() != s.upper.size()) {
        throw ValidationError("Box: bad bounds");
      }
      for (size_t i = 0; i < s.lower.size(); ++i) {
        if (!(s.lower[i] <= s.upper[i])) throw ValidationError("Box: lower > upper");
      }
    }
    void operator()(const ProductSet& s) const {
      if (s.factors.empty()) throw ValidationError("Product: no factors");
    }
    void operator()(const IntersectionSet& s) const {
      if (s.members.empty()) throw ValidationError("Intersection: no members");
      const int d = s.members.front().dim();
      for (const auto& m : s.members) {
        if (m.dim() != d) throw ValidationError("Intersection: members differ in dimension");
      }
    }
  };
  std::visit(Visitor{}, v);
}

void project_orthant(std::span<const double> v, std::span<double> out) {
  for (size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i], 0.0);
}

void project_box(const Box& s, std::span<const double> v, std::span<double> out) {
  for (size_t i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i], s.lower[i], s.upper[i]);
}

void project_slab(const WeightedSlab& s, std::span<const double> v, std::span<double> out) {
  double dot = 0.0, nrm2 = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    dot += s.normal[i] * v[i];
    nrm2 += s.normal[i] * s.normal[i];
  }
  std::copy(v.begin(), v.end(), out.begin());
  if (nrm2 == 0.0 || std::abs(dot) <= s.half_width) return;
  const double target = dot > 0.0 ? s.half_width : -s.half_width;
  const double step = (dot - target) / nrm2;
  for (size_t i = 0; i < v.size(); ++i) out[i] -= step * s.normal[i];
}

// Exact projection via sorted-breakpoint search on the soft-threshold
// parameter: u_i = sign(v_i) * max(|v_i| - lambda * w_i, 0), with lambda
// chosen so that sum_i w_i |u_i| = r.
void project_weighted_l1(const WeightedL1Ball& s, std::span<const double> v,
                         std::span<double> out) {
  const size_t d = v.size();
  double lhs = 0.0;
  for (size_t i = 0; i < d; ++i) lhs += s.weights[i] * std::abs(v[i]);
  if (lhs <= s.radius) {
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  // Breakpoints |v_i| / w_i in increasing order; walk until the residual
  // mass at the candidate lambda matches the radius.
  std::vector<std::pair<double, size_t>> bp(d);
  for (size_t i = 0; i < d; ++i) bp[i] = {std::abs(v[i]) / s.weights[i], i};
  std::sort(bp.begin(), bp.end());
  double wv = 0.0, w2 = 0.0;  // sums over the active set {i : lambda < |v_i|/w_i}
  for (size_t i = 0; i < d; ++i) {
    wv += s.weights[i] * std::abs(v[i]);
    w2 += s.weights[i] * s.weights[i];
  }
  double lambda = bp.back().first;  // fallback: everything clipped
  for (size_t k = 0; k < d; ++k) {
    const double cand = (wv - s.radius) / w2;
    if (cand <= bp[k].first) {
      lambda = cand;
      break;
    }
    const size_t i = bp[k].second;
    wv -= s.weights[i] * std::abs(v[i]);
    w2 -= s.weights[i] * s.weights[i];
    if (w2 <= 0.0) break;
  }
  lambda = std::max(lambda, 0.0);
  for (size_t i = 0; i < d; ++i) {
    const double mag = std::abs(v[i]) - lambda * s.weights[i];
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
}

void project_dykstra(const IntersectionSet& s, std::span<const double> v,
                     std::span<double> out) {
  const size_t d = v.size();
  const size_t m = s.members.size();
  std::vector<double> x(v.begin(), v.end());
  std::vector<std::vector<double>> corr(m, std::vector<double>(d, 0.0));
  std::vector<double> y(d), prev(d);
  double move = 0.0;
  for (int sweep = 0; sweep < kDykstraMaxSweeps; ++sweep) {
    ++solver_stats().dykstra_sweeps;
    prev = x;
    for (size_t k = 0; k < m; ++k) {
      for (size_t i = 0; i < d; ++i) y[i] = x[i] + corr[k][i];
      std::vector<double> proj = s.members[k].project(y);
      for (size_t i = 0; i < d; ++i) corr[k][i] = y[i] - proj[i];
      x = std::move(proj);
    }
    move = 0.0;
    for (size_t i = 0; i < d; ++i) move = std::max(move, std::abs(x[i] - prev[i]));
    if (move < kDykstraMoveTol) {
      std::copy(x.begin(), x.end(), out.begin());
      return;
    }
  }
  throw SolverError("Dykstra projection did not converge within " +
                        std::to_string(kDykstraMaxSweeps) + " sweeps",
                    move);
}

}  // namespace

TargetSet::TargetSet(Variant v) : v_(std::move(v)) {
  validate(v_);
  dim_ = variant_dim(v_);
}

TargetSet TargetSet::orthant(int dim) { return TargetSet(Orthant{dim}); }

TargetSet TargetSet::l1_ball(int dim, double radius) {
  return TargetSet(WeightedL1Ball{std::vector<double>(dim, 1.0), radius});
}

TargetSet TargetSet::weighted_l1_ball(std::vector<double> weights, double radius) {
  return TargetSet(WeightedL1Ball{std::move(weights), radius});
}

TargetSet TargetSet::weighted_slab(std::vector<double> normal, double half_width) {
  return TargetSet(WeightedSlab{std::move(normal), half_width});
}

TargetSet TargetSet::box(std::vector<double> lower, std::vector<double> upper) {
  return TargetSet(Box{std::move(lower), std::move(upper)});
}

TargetSet TargetSet::unit_box(int dim) {
  return TargetSet(Box{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)});
}

TargetSet TargetSet::product(std::vector<TargetSet> factors) {
  return TargetSet(ProductSet{std::move(factors)});
}

TargetSet TargetSet::intersection(std::vector<TargetSet> members) {
  return TargetSet(IntersectionSet{std::move(members)});
}

void TargetSet::project_into(std::span<const double> v, std::span<double> out) const {
  struct Visitor {
    std::span<const double> v;
    std::span<double> out;
    const TargetSet* self;
    void operator()(const Orthant&) const { project_orthant(v, out); }
    void operator()(const WeightedL1Ball& s) const { project_weighted_l1(s, v, out); }
    void operator()(const WeightedSlab& s) const { project_slab(s, v, out); }
    void operator()(const Box& s) const { project_box(s, v, out); }
    void operator()(const ProductSet& s) const {
      size_t offset = 0;
      for (const auto& f : s.factors) {
        const size_t fd = static_cast<size_t>(f.dim());
        f.project_into(v.subspan(offset, fd), out.subspan(offset, fd));
        offset += fd;
      }
    }
    void operator()(const IntersectionSet& s) const { project_dykstra(s, v, out); }
  };
  std::visit(Visitor{v, out, this}, v_);
}

std::vector<double> TargetSet::project(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != dim_) {
    throw DimensionError("project: vector dim " + std::to_string(v.size()) +
                         " != set dim " + std::to_string(dim_));
  }
  std::vector<double> out(v.size());
  project_into(v, out);
  return out;
}

double TargetSet::squared_distance(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != dim_) {
    throw DimensionError("distance: vector dim mismatch");
  }
  // Products decompose exactly on squared distances; one square root at the top.
  if (const auto* prod = std::get_if<ProductSet>(&v_)) {
    double acc = 0.0;
    size_t offset = 0;
    for (const auto& f : prod->factors) {
      const size_t fd = static_cast<size_t>(f.dim());
      acc += f.squared_distance(v.subspan(offset, fd));
      offset += fd;
    }
    return acc;
  }
  std::vector<double> p(v.size());
  project_into(v, p);
  double acc = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    const double diff = v[i] - p[i];
    acc += diff * diff;
  }
  return acc;
}

double TargetSet::distance(std::span<const double> v) const {
  return std::sqrt(squared_distance(v));
}

bool TargetSet::contains(std::span<const double> v, double tol) const {
  if (tol < 0.0) throw ValidationError("contains: negative tolerance");
  return distance(v) <= tol;
}

std::optional<Box> TargetSet::bounding_box() const {
  struct Visitor {
    const TargetSet* self;
    std::optional<Box> operator()(const Orthant&) const { return std::nullopt; }
    std::optional<Box> operator()(const WeightedL1Ball& s) const {
      Box b;
      for (double w : s.weights) {
        b.lower.push_back(-s.radius / w);
        b.upper.push_back(s.radius / w);
      }
      return b;
    }
    std::optional<Box> operator()(const WeightedSlab& s) const {
      if (s.normal.size() == 1 && s.normal[0] != 0.0) {
        const double r = s.half_width / std::abs(s.normal[0]);
        return Box{{-r}, {r}};
      }
      return std::nullopt;
    }
    std::optional<Box> operator()(const Box& s) const { return s; }
    std::optional<Box> operator()(const ProductSet& s) const {
      Box b;
      for (const auto& f : s.factors) {
        auto fb = f.bounding_box();
        if (!fb) return std::nullopt;
        b.lower.insert(b.lower.end(), fb->lower.begin(), fb->lower.end());
        b.upper.insert(b.upper.end(), fb->upper.begin(), fb->upper.end());
      }
      return b;
    }
    std::optional<Box> operator()(const IntersectionSet& s) const {
      std::optional<Box> acc;
      for (const auto& m : s.members) {
        auto mb = m.bounding_box();
        if (!mb) continue;
        if (!acc) {
          acc = *mb;
        } else {
          for (size_t i = 0; i < acc->lower.size(); ++i) {
            acc->lower[i] = std::max(acc->lower[i], mb->lower[i]);
            acc->upper[i] = std::min(acc->upper[i], mb->upper[i]);
          }
        }
      }
      return acc;
    }
  };
  return std::visit(Visitor{this}, v_);
}

double hausdorff_onesided(const TargetSet& a, const TargetSet& b, int n_samples, Rng& rng,
                          const std::optional<Box>& sampling_box) {
  if (a.dim() != b.dim()) throw DimensionError("hausdorff_onesided: dim mismatch");
  if (n_samples < 1) throw ValidationError("hausdorff_onesided: n_samples < 1");
  std::optional<Box> box = sampling_box ? sampling_box : a.bounding_box();
  if (!box) {
    throw ValidationError("hausdorff_onesided: unbounded set and no sampling box given");
  }
  const int d = a.dim();
  std::vector<double> u(d);
  double worst = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    for (int i = 0; i < d; ++i) {
      u[i] = box->lower[i] + uniform01(rng) * (box->upper[i] - box->lower[i]);
    }
    const std::vector<double> on_a = a.project(u);
    worst = std::max(worst, b.distance(on_a));
  }
  return worst;
}

}  // namespace blackwell
