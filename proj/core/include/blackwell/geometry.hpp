#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "blackwell/errors.hpp"
#include "blackwell/rng.hpp"

namespace blackwell {

class TargetSet;

// ([0, inf))^dim
struct Orthant {
  int dim = 0;
};

// { v : sum_i w_i |v_i| <= r }, all w_i > 0. r = 0 degenerates to {0}.
struct WeightedL1Ball {
  std::vector<double> weights;
  double radius = 0.0;
};

// { v : |<w, v>| <= delta }. delta = 0 degenerates to the hyperplane
// <w, v> = 0; a zero normal makes the whole space.
struct WeightedSlab {
  std::vector<double> normal;
  double half_width = 0.0;
};

// Axis-aligned box, lower <= upper per coordinate.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};

// Cartesian product; coordinates split consecutively across the factors.
struct ProductSet {
  std::vector<TargetSet> factors;
};

// Intersection of same-dimension sets; must be nonempty.
struct IntersectionSet {
  std::vector<TargetSet> members;
};

// Closed convex target set with exact Euclidean projection. Immutable after
// construction and shareable across threads; project/distance are pure.
class TargetSet {
 public:
  using Variant =
      std::variant<Orthant, WeightedL1Ball, WeightedSlab, Box, ProductSet, IntersectionSet>;

  explicit TargetSet(Variant v);

  static TargetSet orthant(int dim);
  static TargetSet l1_ball(int dim, double radius);
  static TargetSet weighted_l1_ball(std::vector<double> weights, double radius);
  static TargetSet weighted_slab(std::vector<double> normal, double half_width);
  static TargetSet box(std::vector<double> lower, std::vector<double> upper);
  static TargetSet unit_box(int dim);
  static TargetSet product(std::vector<TargetSet> factors);
  static TargetSet intersection(std::vector<TargetSet> members);

  int dim() const { return dim_; }
  const Variant& variant() const { return v_; }

  std::vector<double> project(std::span<const double> v) const;
  double squared_distance(std::span<const double> v) const;
  double distance(std::span<const double> v) const;
  bool contains(std::span<const double> v, double tol) const;

  // Tight axis-aligned bounding box, or nullopt for unbounded sets.
  std::optional<Box> bounding_box() const;

 private:
  void project_into(std::span<const double> v, std::span<double> out) const;
  friend double squared_distance_impl(const TargetSet&, std::span<const double>,
                                      std::span<double>);

  Variant v_;
  int dim_ = 0;
};

// Dykstra controls for IntersectionSet projections.
inline constexpr int kDykstraMaxSweeps = 10000;
inline constexpr double kDykstraMoveTol = 1e-10;

// Monte-Carlo lower estimate of sup_{a in A} dist(a, B). Samples the
// bounding box (supplied, or A's own when bounded), pushes samples onto A
// by projection and measures their distance to B.
double hausdorff_onesided(const TargetSet& a, const TargetSet& b, int n_samples, Rng& rng,
                          const std::optional<Box>& sampling_box = std::nullopt);

}  // namespace blackwell
