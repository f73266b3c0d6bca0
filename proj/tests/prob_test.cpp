#include <doctest.h>

#include <cmath>
#include <vector>

#include "blackwell/prob.hpp"

using namespace blackwell;

namespace {

JointDistribution make_joint(std::vector<std::string> labels, int ns,
                             std::vector<double> table) {
  return JointDistribution(ContextSpace(std::move(labels), ns), std::move(table));
}

MixedAction random_simplex(int dim, Rng& rng) {
  std::vector<double> w(dim);
  double sum = 0.0;
  for (double& v : w) {
    v = -std::log(1.0 - uniform01(rng));
    sum += v;
  }
  for (double& v : w) v /= sum;
  return MixedAction(std::move(w));
}

}  // namespace

TEST_CASE("mixed action validation and renormalization") {
  CHECK_THROWS_AS(MixedAction({0.5, -0.1, 0.6}), ValidationError);
  CHECK_THROWS_AS(MixedAction({0.5, 0.4}), ValidationError);  // mass 0.9
  CHECK_THROWS_AS(MixedAction(std::vector<double>{}), ValidationError);
  // Drift within 1e-9 of unit mass is renormalized exactly.
  MixedAction p({0.5, 0.5 + 5e-10});
  double sum = 0.0;
  for (int i = 0; i < p.size(); ++i) sum += p[i];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("tv distance examples") {
  CHECK(tv_distance(MixedAction({0.5, 0.5}), MixedAction({0.9, 0.1})) ==
        doctest::Approx(0.4).epsilon(1e-12));
  const MixedAction p({0.2, 0.3, 0.5});
  CHECK(tv_distance(p, p) == 0.0);
  CHECK(tv_distance(MixedAction({0.5, 0.5, 0.0}), MixedAction({0.0, 0.5, 0.5})) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(tv_distance(p, MixedAction({0.5, 0.5})), DimensionError);
}

TEST_CASE("tv distance is a metric on random triples") {
  Rng rng = make_stream(7, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const MixedAction a = random_simplex(5, rng);
    const MixedAction b = random_simplex(5, rng);
    const MixedAction c = random_simplex(5, rng);
    CHECK(tv_distance(a, b) >= 0.0);
    CHECK(tv_distance(a, b) == doctest::Approx(tv_distance(b, a)).epsilon(1e-12));
    CHECK(tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c) + 1e-12);
  }
}

TEST_CASE("bounded integrands are tv-lipschitz across conditionals") {
  Rng rng = make_stream(8, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const MixedAction q0 = random_simplex(6, rng);
    const MixedAction q1 = random_simplex(6, rng);
    double diff = 0.0;
    std::vector<double> f(6);
    for (double& v : f) v = uniform01(rng);
    for (int x = 0; x < 6; ++x) diff += f[x] * (q0[x] - q1[x]);
    CHECK(std::abs(diff) <= tv_distance(q0, q1) + 1e-12);
  }
}

TEST_CASE("marginals") {
  CHECK(make_joint({"a", "b"}, 2, {0.25, 0.25, 0.25, 0.25}).marginal_gamma() ==
        std::vector<double>{0.5, 0.5});
  const auto g = make_joint({"a", "b"}, 2, {0.3, 0.1, 0.2, 0.4}).marginal_gamma();
  CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-12));
  const auto point = make_joint({"a", "b"}, 2, {0.0, 1.0, 0.0, 0.0}).marginal_gamma();
  CHECK(point[0] == 0.0);
  CHECK(point[1] == 1.0);
}

TEST_CASE("conditional given group") {
  const auto uniform = make_joint({"a", "b"}, 2, {0.25, 0.25, 0.25, 0.25});
  CHECK(uniform.conditional_given_s(0) == MixedAction({0.5, 0.5}));

  const auto q = make_joint({"a", "b"}, 2, {0.3, 0.1, 0.2, 0.4});
  const MixedAction c1 = q.conditional_given_s(1);
  CHECK(c1[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(c1[1] == doctest::Approx(0.8).epsilon(1e-12));

  const auto point = make_joint({"a", "b"}, 2, {1.0, 0.0, 0.0, 0.0});
  CHECK(point.conditional_given_s(0) == MixedAction::dirac(0, 2));
  CHECK_THROWS_AS(point.conditional_given_s(1), DegenerateGroupError);
}

TEST_CASE("gamma times conditional reconstructs the table") {
  const auto q = make_joint({"a", "b", "c"}, 2, {0.12, 0.08, 0.18, 0.02, 0.30, 0.30});
  const auto gamma = q.marginal_gamma();
  for (int s = 0; s < 2; ++s) {
    const MixedAction cond = q.conditional_given_s(s);
    for (int x = 0; x < 3; ++x) {
      CHECK(gamma[s] * cond[x] == doctest::Approx(q.at(x, s)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sampling: dirac, frequency, chi-square") {
  Rng rng = make_stream(1, 0);
  const MixedAction dirac = MixedAction::dirac(2, 4);
  for (int i = 0; i < 50; ++i) CHECK(sample(dirac, rng) == 2);

  Rng coin_rng = make_stream(42, Stream::context);
  const MixedAction coin({0.5, 0.5});
  long heads = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) heads += sample(coin, coin_rng);
  CHECK(std::abs(static_cast<double>(heads) / n - 0.5) < 0.01);

  // Chi-square goodness of fit over 4 cells: reject only below the 0.001
  // quantile, i.e. statistic above 16.266 (chi2 with 3 dof).
  Rng u4_rng = make_stream(43, Stream::context);
  const MixedAction u4 = MixedAction::uniform(4);
  std::vector<long> counts(4, 0);
  for (int i = 0; i < n; ++i) ++counts[sample(u4, u4_rng)];
  double chi2 = 0.0;
  const double expected = n / 4.0;
  for (long c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 16.266);
}

TEST_CASE("sampling is reproducible for a fixed seed and call sequence") {
  const auto q = make_joint({"a", "b", "c"}, 2, {0.12, 0.08, 0.18, 0.02, 0.30, 0.30});
  std::vector<std::pair<int, int>> first, second;
  {
    Rng rng = make_stream(99, Stream::context);
    for (int i = 0; i < 200; ++i) first.push_back(sample(q, rng));
  }
  {
    Rng rng = make_stream(99, Stream::context);
    for (int i = 0; i < 200; ++i) second.push_back(sample(q, rng));
  }
  CHECK(first == second);
}

TEST_CASE("stream splitting separates the named streams") {
  Rng a = make_stream(5, Stream::context);
  Rng b = make_stream(5, Stream::player);
  Rng c = make_stream(5, Stream::nature);
  CHECK(a() != b());
  CHECK(b() != c());
}

TEST_CASE("joint distribution config round trip") {
  const auto q = make_joint({"x0", "x1"}, 2, {0.375, 0.125, 0.125, 0.375});
  const auto triples = config_triples(q);
  REQUIRE(triples.size() == 4);
  CHECK(triples[0].x_label == "x0");
  CHECK(triples[0].probability == "0.375");
  const auto rebuilt = joint_from_triples(q.space(), triples);
  CHECK(rebuilt == q);
  CHECK_THROWS_AS(joint_from_triples(q.space(), {{"zz", 0, "1.0"}}), ValidationError);
}

TEST_CASE("density partition splits by conditional mass") {
  const auto q = make_joint({"x0", "x1", "x2"}, 2, {0.25, 0.0, 0.15, 0.15, 0.10, 0.35});
  CHECK(density_partition(q) == std::vector<int>{-1, 0, 1});
}

TEST_CASE("context space validation") {
  CHECK_THROWS_AS(ContextSpace({"a", "a"}, 2), ValidationError);
  CHECK_THROWS_AS(ContextSpace({}, 2), ValidationError);
  CHECK_THROWS_AS(ContextSpace({"a"}, 0), ValidationError);
}
