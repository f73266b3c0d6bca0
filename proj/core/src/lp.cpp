#include "blackwell/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "blackwell/stats.hpp"

namespace blackwell {

namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kFeasTol = 1e-9;

enum class ColKind { structural, slack, surplus, artificial };

struct Tableau {
  // rows x (cols + 1); last column is the rhs. Two extra rows hold the
  // reduced phase-2 and phase-1 objectives.
  int rows = 0, cols = 0;
  std::vector<double> a;          // (rows + 2) x (cols + 1)
  std::vector<int> basis;         // basic column per row
  std::vector<ColKind> kind;      // per column
  std::vector<int> owner_row;     // slack/surplus/artificial: originating row
  std::vector<bool> row_flipped;  // rhs sign normalization applied

  double& at(int r, int c) { return a[r * (cols + 1) + c]; }
  double at(int r, int c) const { return a[r * (cols + 1) + c]; }
  int obj2() const { return rows; }      // phase-2 objective row
  int obj1() const { return rows + 1; }  // phase-1 objective row

  void pivot(int pr, int pc) {
    const double piv = at(pr, pc);
    const double inv = 1.0 / piv;
    for (int c = 0; c <= cols; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (int r = 0; r < rows + 2; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= cols; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis[pr] = pc;
  }
};

// Bland: entering column = smallest index with a negative reduced cost.
int entering_column(const Tableau& t, int obj_row, bool allow_artificial) {
  for (int c = 0; c < t.cols; ++c) {
    if (!allow_artificial && t.kind[c] == ColKind::artificial) continue;
    if (t.at(obj_row, c) < -kPivotEps) return c;
  }
  return -1;
}

// Min-ratio row; ties broken on the smallest basic column index (Bland).
int leaving_row(const Tableau& t, int pc) {
  int best = -1;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (int r = 0; r < t.rows; ++r) {
    const double a = t.at(r, pc);
    if (a <= kPivotEps) continue;
    const double ratio = t.at(r, t.cols) / a;
    if (ratio < best_ratio - 1e-15 ||
        (std::abs(ratio - best_ratio) <= 1e-15 && best >= 0 && t.basis[r] < t.basis[best])) {
      best = r;
      best_ratio = ratio;
    }
  }
  return best;
}

void run_simplex(Tableau& t, int obj_row, bool allow_artificial) {
  for (;;) {
    const int pc = entering_column(t, obj_row, allow_artificial);
    if (pc < 0) return;
    const int pr = leaving_row(t, pc);
    if (pr < 0) throw SolverError("simplex: unbounded linear program");
    t.pivot(pr, pc);
  }
}

}  // namespace

LpSolution solve_lp(const LpProblem& lp) {
  ++solver_stats().lp_calls;
  const int n = lp.n;
  const int m_ub = static_cast<int>(lp.a_ub.size());
  const int m_eq = static_cast<int>(lp.a_eq.size());
  const int m = m_ub + m_eq;
  if (static_cast<int>(lp.c.size()) != n) throw DimensionError("solve_lp: bad c size");

  // Column layout: structural | one slack or surplus per <= row | artificials.
  Tableau t;
  t.rows = m;
  std::vector<int> aux_col(m, -1);  // slack/surplus column of each row
  std::vector<int> art_col(m, -1);

  // First pass decides the column count.
  std::vector<bool> flipped(m, false);
  for (int i = 0; i < m_ub; ++i) flipped[i] = lp.b_ub[i] < 0.0;
  for (int i = 0; i < m_eq; ++i) flipped[m_ub + i] = lp.b_eq[i] < 0.0;
  int cols = n;
  for (int i = 0; i < m_ub; ++i) cols += 1;  // slack or surplus
  int n_art = m_eq;
  for (int i = 0; i < m_ub; ++i) {
    if (flipped[i]) ++n_art;  // flipped <= becomes >=, needs an artificial
  }
  cols += n_art;
  t.cols = cols;
  t.a.assign((m + 2) * (cols + 1), 0.0);
  t.kind.assign(cols, ColKind::structural);
  t.owner_row.assign(cols, -1);
  t.basis.assign(m, -1);
  t.row_flipped = flipped;

  int next = n;
  auto fill_row = [&](int row, const std::vector<double>& coeffs, double rhs) {
    const double sgn = flipped[row] ? -1.0 : 1.0;
    if (static_cast<int>(coeffs.size()) != n) throw DimensionError("solve_lp: bad row size");
    for (int j = 0; j < n; ++j) t.at(row, j) = sgn * coeffs[j];
    t.at(row, cols) = sgn * rhs;
  };
  for (int i = 0; i < m_ub; ++i) fill_row(i, lp.a_ub[i], lp.b_ub[i]);
  for (int i = 0; i < m_eq; ++i) fill_row(m_ub + i, lp.a_eq[i], lp.b_eq[i]);

  for (int i = 0; i < m_ub; ++i) {
    t.at(i, next) = flipped[i] ? -1.0 : 1.0;  // surplus when flipped
    t.kind[next] = flipped[i] ? ColKind::surplus : ColKind::slack;
    t.owner_row[next] = i;
    aux_col[i] = next;
    if (!flipped[i]) t.basis[i] = next;
    ++next;
  }
  for (int i = 0; i < m; ++i) {
    const bool needs_art = (i >= m_ub) || flipped[i];
    if (!needs_art) continue;
    t.at(i, next) = 1.0;
    t.kind[next] = ColKind::artificial;
    t.owner_row[next] = i;
    art_col[i] = next;
    t.basis[i] = next;
    ++next;
  }

  // Phase-2 objective row: minimize c'x, stored as reduced costs.
  for (int j = 0; j < n; ++j) t.at(t.obj2(), j) = lp.c[j];
  // Phase-1 objective: minimize the sum of artificials; reduce against the
  // initial basis (each artificial is basic in its own row).
  for (int c = 0; c < cols; ++c) {
    if (t.kind[c] == ColKind::artificial) t.at(t.obj1(), c) = 1.0;
  }
  for (int i = 0; i < m; ++i) {
    if (art_col[i] < 0) continue;
    for (int c = 0; c <= cols; ++c) t.at(t.obj1(), c) -= t.at(i, c);
  }

  if (n_art > 0) {
    run_simplex(t, t.obj1(), true);
    if (-t.at(t.obj1(), cols) > kFeasTol) {
      throw SolverError("simplex: infeasible linear program", -t.at(t.obj1(), cols));
    }
    // Drive residual basic artificials out; they sit at zero, so any pivot
    // on a non-artificial column keeps feasibility.
    for (int r = 0; r < m; ++r) {
      if (t.kind[t.basis[r]] != ColKind::artificial) continue;
      int pc = -1;
      for (int c = 0; c < cols; ++c) {
        if (t.kind[c] == ColKind::artificial) continue;
        if (std::abs(t.at(r, c)) > 1e-9) {
          pc = c;
          break;
        }
      }
      if (pc >= 0) t.pivot(r, pc);
      // Otherwise the row is redundant; its artificial stays basic at zero.
    }
  }

  // Reduce phase-2 costs against the current basis, then optimize.
  for (int r = 0; r < m; ++r) {
    const double cb = t.at(t.obj2(), t.basis[r]);
    if (cb == 0.0) continue;
    for (int c = 0; c <= cols; ++c) t.at(t.obj2(), c) -= cb * t.at(r, c);
  }
  run_simplex(t, t.obj2(), false);

  LpSolution sol;
  sol.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r) {
    if (t.basis[r] < n) sol.x[t.basis[r]] = t.at(r, cols);
  }
  sol.objective = 0.0;
  for (int j = 0; j < n; ++j) sol.objective += lp.c[j] * sol.x[j];

  // Multipliers from the reduced costs of the rows' identity-like columns.
  // For a slack (+1 coefficient, zero cost) the reduced cost equals -y_i;
  // the KKT multiplier of a <= row in a minimization is -y_i itself.
  auto row_price = [&](int row) {
    const int ac = art_col[row];
    const int sc = aux_col[row];
    if (ac >= 0) return -t.at(t.obj2(), ac);
    const double rc = t.at(t.obj2(), sc);
    return t.kind[sc] == ColKind::slack ? -rc : rc;
  };
  sol.mult_ub.assign(m_ub, 0.0);
  sol.mult_eq.assign(m_eq, 0.0);
  for (int i = 0; i < m_ub; ++i) {
    double y = row_price(i);
    if (flipped[i]) y = -y;
    sol.mult_ub[i] = -y;
  }
  for (int i = 0; i < m_eq; ++i) {
    double y = row_price(m_ub + i);
    if (flipped[m_ub + i]) y = -y;
    sol.mult_eq[i] = -y;
  }
  return sol;
}

}  // namespace blackwell
