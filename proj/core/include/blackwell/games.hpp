#pragma once

#include <span>
#include <vector>

#include "blackwell/geometry.hpp"
#include "blackwell/objectives.hpp"
#include "blackwell/prob.hpp"

namespace blackwell {

// What Nature observes before acting: the non-sensitive context alone, or
// both contexts.
enum class Monitoring { unaware, aware };

// Zero-sum game on a payoff matrix; the row player minimizes, the column
// player maximizes.
struct MatrixGame {
  int rows = 0, cols = 0;
  std::vector<double> m;  // row-major

  MatrixGame() = default;
  MatrixGame(int r, int c) : rows(r), cols(c), m(static_cast<size_t>(r) * c, 0.0) {}
  double at(int r, int c) const { return m[static_cast<size_t>(r) * cols + c]; }
  double& at(int r, int c) { return m[static_cast<size_t>(r) * cols + c]; }
};

struct GameSolution {
  double value = 0.0;
  MixedAction row_strategy;
  MixedAction col_strategy;
};

// Exact value and optimal strategies via one LP; the column strategy is
// read off the LP multipliers. When the uniform row strategy is also
// optimal it is returned instead of an arbitrary optimal vertex.
GameSolution solve_matrix_game(const MatrixGame& g);

// min over p in the simplex of sum_s weight_s * max_b (p' M_s)_b, posed as
// a single LP with one value variable per block. All matrices share the
// row dimension; weights must be nonnegative. All-zero weights give the
// uniform tie-break and value 0.
struct WeightedBlock {
  double weight = 0.0;
  MatrixGame matrix;
};
struct WeightedMinmaxSolution {
  MixedAction strategy;
  double value = 0.0;
};
WeightedMinmaxSolution solve_weighted_minmax(std::span<const WeightedBlock> blocks);

// Nature's measurable family of mixed outcome distributions, indexed by
// what it observes.
struct NatureFamily {
  Monitoring mode = Monitoring::unaware;
  int n_x = 0, n_s = 0;
  std::vector<MixedAction> actions;  // size n_x (unaware) or n_x * n_s (aware)

  const MixedAction& at(int x, int s) const {
    return mode == Monitoring::unaware ? actions[x] : actions[x * n_s + s];
  }
};

NatureFamily make_unaware_family(int n_x, int n_s, std::vector<MixedAction> per_x);
NatureFamily make_aware_family(int n_x, int n_s, std::vector<MixedAction> per_xs);

// Expected payoff sum_x sum_s Q(x,s) m(p^x, q^{G(x,s)}, x, s) of a player
// family against a nature family.
std::vector<double> expected_payoff(const PayoffTensor& payoff, const JointDistribution& q,
                                    std::span<const MixedAction> player_family,
                                    const NatureFamily& nature);

// Frank-Wolfe minimization of dist(expected payoff, set)^2 over the product
// of per-context simplices. The linear subproblem picks one action per
// context; the step size is the exact minimizer of the quadratic model with
// the projection held fixed, so the objective never increases.
//
// `distance` is the best achieved value (an upper bound on the minimum);
// `lower_bound` is certified from the duality gap. A positive
// `early_exit_distance` stops as soon as the achieved distance drops below
// it, which the condition checker uses to dismiss easy families quickly.
struct FrankWolfeResult {
  std::vector<MixedAction> family;
  double distance = 0.0;
  double lower_bound = 0.0;
  bool converged = false;
  int iterations = 0;
};
FrankWolfeResult frank_wolfe_min_distance(const PayoffTensor& payoff,
                                          const JointDistribution& q,
                                          const NatureFamily& nature, const TargetSet& set,
                                          int max_iter = 20000, double gap_tol = 1e-10,
                                          double early_exit_distance = 0.0);

// Brute-force check of the approachability condition: enumerate Nature
// families on a simplex grid (resolution = subdivisions per simplex), run
// the inner Frank-Wolfe minimization for each, and compare the worst inner
// distance against `distance_tol`. Only observations with positive mass
// under q are enumerated. Refuses instances whose family grid exceeds
// `kConditionGridGuard` points.
inline constexpr double kConditionGridGuard = 1e7;

struct ConditionCheckResult {
  bool satisfied = false;
  double inner_distance = 0.0;         // worst achieved inner minimum over the grid
  double certified_lower_bound = 0.0;  // duality-gap bound for the worst family
  NatureFamily worst_family;           // certificate when not satisfied
  long long families_checked = 0;
};
ConditionCheckResult check_condition_bruteforce(const PayoffTensor& payoff,
                                                const JointDistribution& q,
                                                const TargetSet& set, Monitoring monitoring,
                                                int grid_resolution,
                                                double distance_tol = 1e-3,
                                                int n_threads = 1);

// Grid points of the probability simplex over `dim` outcomes with the given
// resolution (weights are multiples of 1/resolution).
std::vector<std::vector<double>> simplex_grid(int dim, int resolution);

}  // namespace blackwell
