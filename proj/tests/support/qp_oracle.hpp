#pragma once

// Brute-force projection oracle for polytopes {u : A u <= b}: enumerate
// every active subset of at most dim constraints, solve the corresponding
// equality-constrained least-distance system, and keep the feasible
// candidate closest to the query point. Exponential and only for tests;
// independent of the production projection paths.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "blackwell/geometry.hpp"

namespace blackwell::testing {

struct Polytope {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  int dim = 0;
};

inline void add_row(Polytope& p, std::vector<double> row, double rhs) {
  p.a.push_back(std::move(row));
  p.b.push_back(rhs);
}

// Halfspace descriptions of the bounded target-set variants.
inline Polytope polytope_of(const TargetSet& set) {
  Polytope p;
  p.dim = set.dim();
  struct Visitor {
    Polytope& p;
    void operator()(const Orthant& s) const {
      for (int i = 0; i < s.dim; ++i) {
        std::vector<double> row(s.dim, 0.0);
        row[i] = -1.0;
        add_row(p, std::move(row), 0.0);
      }
    }
    void operator()(const WeightedL1Ball& s) const {
      const int d = static_cast<int>(s.weights.size());
      for (int mask = 0; mask < (1 << d); ++mask) {
        std::vector<double> row(d);
        for (int i = 0; i < d; ++i) row[i] = (mask >> i & 1) ? s.weights[i] : -s.weights[i];
        add_row(p, std::move(row), s.radius);
      }
    }
    void operator()(const WeightedSlab& s) const {
      add_row(p, s.normal, s.half_width);
      std::vector<double> neg(s.normal.size());
      for (size_t i = 0; i < neg.size(); ++i) neg[i] = -s.normal[i];
      add_row(p, std::move(neg), s.half_width);
    }
    void operator()(const Box& s) const {
      const int d = static_cast<int>(s.lower.size());
      for (int i = 0; i < d; ++i) {
        std::vector<double> up(d, 0.0), lo(d, 0.0);
        up[i] = 1.0;
        lo[i] = -1.0;
        add_row(p, std::move(up), s.upper[i]);
        add_row(p, std::move(lo), -s.lower[i]);
      }
    }
    void operator()(const ProductSet& s) const {
      int offset = 0;
      for (const auto& f : s.factors) {
        Polytope sub = polytope_of(f);
        for (size_t r = 0; r < sub.a.size(); ++r) {
          std::vector<double> row(p.dim, 0.0);
          for (int i = 0; i < sub.dim; ++i) row[offset + i] = sub.a[r][i];
          add_row(p, std::move(row), sub.b[r]);
        }
        offset += sub.dim;
      }
    }
    void operator()(const IntersectionSet& s) const {
      for (const auto& m : s.members) {
        Polytope sub = polytope_of(m);
        for (size_t r = 0; r < sub.a.size(); ++r) add_row(p, std::move(sub.a[r]), sub.b[r]);
      }
    }
  };
  std::visit(Visitor{p}, set.variant());
  return p;
}

// Solves M y = rhs for a small symmetric system; false when singular.
inline bool solve_dense(std::vector<std::vector<double>> m, std::vector<double> rhs,
                        std::vector<double>& out) {
  const int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    }
    if (std::abs(m[piv][col]) < 1e-12) return false;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  out.resize(n);
  for (int i = 0; i < n; ++i) out[i] = rhs[i] / m[i][i];
  return true;
}

inline std::optional<std::vector<double>> project_onto_subset(const Polytope& p,
                                                              std::span<const double> v,
                                                              const std::vector<int>& subset) {
  const int k = static_cast<int>(subset.size());
  std::vector<double> u(v.begin(), v.end());
  if (k > 0) {
    // u = v - A_S' lambda with (A_S A_S') lambda = A_S v - b_S.
    std::vector<std::vector<double>> gram(k, std::vector<double>(k, 0.0));
    std::vector<double> rhs(k, 0.0);
    for (int i = 0; i < k; ++i) {
      const auto& ri = p.a[subset[i]];
      for (int j = 0; j < k; ++j) {
        const auto& rj = p.a[subset[j]];
        for (int c = 0; c < p.dim; ++c) gram[i][j] += ri[c] * rj[c];
      }
      for (int c = 0; c < p.dim; ++c) rhs[i] += ri[c] * v[c];
      rhs[i] -= p.b[subset[i]];
    }
    std::vector<double> lambda;
    if (!solve_dense(std::move(gram), std::move(rhs), lambda)) return std::nullopt;
    for (int i = 0; i < k; ++i) {
      for (int c = 0; c < p.dim; ++c) u[c] -= lambda[i] * p.a[subset[i]][c];
    }
  }
  for (size_t r = 0; r < p.a.size(); ++r) {
    double dot = 0.0;
    for (int c = 0; c < p.dim; ++c) dot += p.a[r][c] * u[c];
    if (dot > p.b[r] + 1e-8) return std::nullopt;
  }
  return u;
}

// Exact projection by exhaustive active-set enumeration.
inline std::vector<double> qp_project(const Polytope& p, std::span<const double> v) {
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  std::vector<int> subset;
  auto consider = [&]() {
    const auto u = project_onto_subset(p, v, subset);
    if (!u) return;
    double dist = 0.0;
    for (int c = 0; c < p.dim; ++c) dist += (v[c] - (*u)[c]) * (v[c] - (*u)[c]);
    if (dist < best_dist) {
      best_dist = dist;
      best = *u;
    }
  };
  const int m = static_cast<int>(p.a.size());
  std::function<void(int, int)> rec = [&](int start, int remaining) {
    consider();
    if (remaining == 0) return;
    for (int r = start; r < m; ++r) {
      subset.push_back(r);
      rec(r + 1, remaining - 1);
      subset.pop_back();
    }
  };
  rec(0, p.dim);
  return best;
}

inline std::vector<double> qp_project(const TargetSet& set, std::span<const double> v) {
  return qp_project(polytope_of(set), v);
}

}  // namespace blackwell::testing
