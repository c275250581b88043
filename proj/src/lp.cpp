#include "dincl/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dincl {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kReducedCostTol = 1e-9;
constexpr int kRefactorPeriod = 48;
constexpr int kStallLimit = 60;  // degenerate pivots before Bland's rule engages

enum class PivotResult { optimal, unbounded, iteration_limit };

// Dense tableau for the standardized system  M w = rhs, w >= 0.
// Column layout: [xp(n) | xn(n) | slacks(mi) | artificials(m)].
struct Tableau {
  Eigen::MatrixXd m0;       // original matrix, kept for refactorization
  Eigen::VectorXd b0;       // original rhs
  Eigen::MatrixXd t;        // m x (ncols + 1); last column is rhs
  std::vector<int> basis;   // basic column per row
  int ncols = 0;
  int art_start = 0;

  // Rebuild the tableau as B^{-1} [m0 | b0] from the original data; clears
  // the roundoff accumulated by the rank-one pivot updates.
  void refactor() {
    const int m = static_cast<int>(m0.rows());
    if (m == 0) return;
    Eigen::MatrixXd b(m, m);
    for (int r = 0; r < m; ++r) b.col(r) = m0.col(basis[r]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    t.leftCols(ncols) = lu.solve(m0);
    t.col(ncols) = lu.solve(b0);
    if (!t.allFinite()) throw std::runtime_error("solve_lp: basis became singular");
  }

  // Remove rows (marked true) from the working system; their multipliers are
  // zero by construction since the rows are linear combinations of the rest.
  void drop_rows(const std::vector<bool>& remove) {
    const int m = static_cast<int>(m0.rows());
    int kept = 0;
    for (int r = 0; r < m; ++r)
      if (!remove[r]) ++kept;
    Eigen::MatrixXd m0_new(kept, ncols), t_new(kept, ncols + 1);
    Eigen::VectorXd b0_new(kept);
    std::vector<int> basis_new;
    basis_new.reserve(kept);
    for (int r = 0, w = 0; r < m; ++r) {
      if (remove[r]) continue;
      m0_new.row(w) = m0.row(r);
      b0_new(w) = b0(r);
      t_new.row(w) = t.row(r);
      basis_new.push_back(basis[r]);
      ++w;
    }
    m0 = std::move(m0_new);
    b0 = std::move(b0_new);
    t = std::move(t_new);
    basis = std::move(basis_new);
  }
};

void pivot(Tableau& tab, Eigen::VectorXd& rc, double& obj, int row, int col) {
  Eigen::RowVectorXd prow = tab.t.row(row) / tab.t(row, col);
  tab.t.row(row) = prow;
  for (int r = 0; r < tab.t.rows(); ++r) {
    if (r == row) continue;
    double f = tab.t(r, col);
    if (f != 0.0) tab.t.row(r) -= f * prow;
  }
  double rcf = rc(col);
  if (rcf != 0.0) {
    rc -= rcf * prow.head(tab.ncols).transpose();
    obj += rcf * prow(tab.ncols);
  }
  tab.basis[row] = col;
}

Eigen::VectorXd reduced_costs(const Tableau& tab, const Eigen::VectorXd& cost, double& obj) {
  Eigen::VectorXd rc = cost;
  obj = 0.0;
  for (int r = 0; r < tab.t.rows(); ++r) {
    double cb = cost(tab.basis[r]);
    if (cb != 0.0) {
      rc -= cb * tab.t.row(r).head(tab.ncols).transpose();
      obj += cb * tab.t(r, tab.ncols);
    }
  }
  return rc;
}

// Dantzig pricing with Bland's least-index rule after a degenerate stall, and
// periodic refactorization from the original data. Deterministic throughout.
PivotResult run_simplex(Tableau& tab, const Eigen::VectorXd& cost, Eigen::VectorXd& rc,
                        double& obj, const std::vector<bool>& barred, int max_iterations,
                        int& iterations) {
  const int m = static_cast<int>(tab.t.rows());
  int stall = 0;
  int since_refactor = 0;
  bool bland = false;
  auto refresh = [&] {
    tab.refactor();
    rc = reduced_costs(tab, cost, obj);
    since_refactor = 0;
  };
  while (true) {
    if (iterations >= max_iterations) return PivotResult::iteration_limit;
    if (since_refactor >= kRefactorPeriod) refresh();

    int enter = -1;
    if (bland) {
      for (int j = 0; j < tab.ncols; ++j) {
        if (!barred[j] && rc(j) < -kReducedCostTol) {
          enter = j;
          break;
        }
      }
    } else {
      double best = -kReducedCostTol;
      for (int j = 0; j < tab.ncols; ++j) {
        if (!barred[j] && rc(j) < best) {
          best = rc(j);
          enter = j;
        }
      }
    }
    if (enter < 0) {
      // verdicts count only on fresh data; incremental pricing drifts
      if (since_refactor == 0) return PivotResult::optimal;
      refresh();
      continue;
    }

    int leave = -1;
    double best_ratio = 0.0;
    for (int r = 0; r < m; ++r) {
      double a = tab.t(r, enter);
      if (a <= kPivotTol) continue;
      double ratio = tab.t(r, tab.ncols) / a;
      if (leave < 0 || ratio < best_ratio - 1e-12 ||
          (std::abs(ratio - best_ratio) <= 1e-12 && tab.basis[r] < tab.basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave < 0) {
      if (since_refactor == 0) return PivotResult::unbounded;
      refresh();
      continue;
    }

    double obj_before = obj;
    pivot(tab, rc, obj, leave, enter);
    ++iterations;
    ++since_refactor;

    if (obj_before - obj > 1e-12 * (1.0 + std::abs(obj_before))) {
      stall = 0;
      bland = false;
    } else if (++stall >= kStallLimit) {
      bland = true;
    }
  }
}

}  // namespace

const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::optimal: return "optimal";
    case LPStatus::infeasible: return "infeasible";
    case LPStatus::unbounded: return "unbounded";
    case LPStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

double LPSolution::dual_objective(const LinearProgram& lp) const {
  double v = 0.0;
  if (y_ub.size() > 0) v -= lp.b_ub.dot(y_ub);
  if (y_eq.size() > 0) v -= lp.b_eq.dot(y_eq);
  for (int i = 0; i < y_lower.size(); ++i)
    if (y_lower(i) != 0.0) v += lp.lower(i) * y_lower(i);
  for (int i = 0; i < y_upper.size(); ++i)
    if (y_upper(i) != 0.0) v -= lp.upper(i) * y_upper(i);
  return v;
}

LPSolution solve_lp(const LinearProgram& lp, const SolveOptions& opts) {
  const int n = lp.num_vars();
  if (n <= 0) throw std::invalid_argument("solve_lp: objective vector is empty");
  const int m_ub = static_cast<int>(lp.b_ub.size());
  const int m_eq = static_cast<int>(lp.b_eq.size());
  if (m_ub > 0 && (lp.a_ub.rows() != m_ub || lp.a_ub.cols() != n))
    throw std::invalid_argument("solve_lp: a_ub/b_ub dimensions inconsistent");
  if (m_eq > 0 && (lp.a_eq.rows() != m_eq || lp.a_eq.cols() != n))
    throw std::invalid_argument("solve_lp: a_eq/b_eq dimensions inconsistent");
  if (lp.lower.size() != 0 && lp.lower.size() != n)
    throw std::invalid_argument("solve_lp: lower bound size mismatch");
  if (lp.upper.size() != 0 && lp.upper.size() != n)
    throw std::invalid_argument("solve_lp: upper bound size mismatch");
  if (!lp.c.allFinite()) throw std::invalid_argument("solve_lp: non-finite objective");
  if ((m_ub > 0 && (!lp.a_ub.allFinite() || !lp.b_ub.allFinite())) ||
      (m_eq > 0 && (!lp.a_eq.allFinite() || !lp.b_eq.allFinite())))
    throw std::invalid_argument("solve_lp: non-finite constraint data");

  // Finite bounds become extra inequality rows appended after the user rows.
  std::vector<int> lower_rows, upper_rows;
  for (int i = 0; i < lp.lower.size(); ++i)
    if (std::isfinite(lp.lower(i))) lower_rows.push_back(i);
  for (int i = 0; i < lp.upper.size(); ++i)
    if (std::isfinite(lp.upper(i))) upper_rows.push_back(i);

  const int mi = m_ub + static_cast<int>(lower_rows.size() + upper_rows.size());
  const int m = mi + m_eq;

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd gb = Eigen::VectorXd::Zero(m);
  if (m_ub > 0) {
    g.topRows(m_ub) = lp.a_ub;
    gb.head(m_ub) = lp.b_ub;
  }
  int row = m_ub;
  for (int i : lower_rows) {
    g(row, i) = -1.0;
    gb(row) = -lp.lower(i);
    ++row;
  }
  for (int i : upper_rows) {
    g(row, i) = 1.0;
    gb(row) = lp.upper(i);
    ++row;
  }
  if (m_eq > 0) {
    g.bottomRows(m_eq) = lp.a_eq;
    gb.tail(m_eq) = lp.b_eq;
  }
  const Eigen::MatrixXd g_orig = g;
  const Eigen::VectorXd gb_orig = gb;

  // Equilibrate rows to unit max-norm; transcribed problems mix O(1) rows
  // with h^{-k}-scaled stencil rows and the pivot tolerances assume a
  // common scale. Multipliers are mapped back through row_scale below.
  Eigen::VectorXd row_scale = Eigen::VectorXd::Ones(m);
  for (int r = 0; r < m; ++r) {
    double mx = g.row(r).lpNorm<Eigen::Infinity>();
    if (mx > 0.0) {
      row_scale(r) = 1.0 / mx;
      g.row(r) *= row_scale(r);
      gb(r) *= row_scale(r);
    }
  }

  // Standard form: x = xp - xn, slack per inequality row, artificial per row.
  const int ncols = 2 * n + mi + m;
  Tableau tab;
  tab.ncols = ncols;
  tab.art_start = 2 * n + mi;
  tab.t = Eigen::MatrixXd::Zero(m, ncols + 1);
  tab.basis.assign(m, -1);
  Eigen::VectorXd row_sign = Eigen::VectorXd::Ones(m);
  for (int r = 0; r < m; ++r) {
    double s = (gb(r) < 0.0) ? -1.0 : 1.0;
    row_sign(r) = s;
    tab.t.row(r).head(n) = s * g.row(r);
    tab.t.row(r).segment(n, n) = -s * g.row(r);
    if (r < mi) tab.t(r, 2 * n + r) = s;  // slack
    tab.t(r, 2 * n + mi + r) = 1.0;       // artificial
    tab.t(r, ncols) = s * gb(r);
    tab.basis[r] = 2 * n + mi + r;
  }
  tab.m0 = tab.t.leftCols(ncols);
  tab.b0 = tab.t.col(ncols);

  // Artificials start basic and may never re-enter once they leave.
  std::vector<bool> barred(ncols, false);
  for (int j = tab.art_start; j < ncols; ++j) barred[j] = true;
  LPSolution sol;
  int iterations = 0;

  // Phase 1: minimize the sum of artificials.
  Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(ncols);
  cost1.tail(m).setOnes();
  double obj1 = 0.0;
  Eigen::VectorXd rc = reduced_costs(tab, cost1, obj1);
  PivotResult pr = run_simplex(tab, cost1, rc, obj1, barred, opts.max_iterations, iterations);
  sol.iterations = iterations;
  if (pr == PivotResult::iteration_limit) {
    sol.status = LPStatus::iteration_limit;
    return sol;
  }
  tab.refactor();
  double obj_check = 0.0;
  reduced_costs(tab, cost1, obj_check);
  double feas_scale = std::max(1.0, gb.lpNorm<Eigen::Infinity>());
  if (obj_check > opts.feas_tol * feas_scale) {
    sol.status = LPStatus::infeasible;
    return sol;
  }

  // Between phases: pivot basic artificials out on fresh data; rows without a
  // usable structural pivot are redundant and leave the working system (their
  // multipliers are zero). Phase 2 then never carries a basic artificial.
  {
    Eigen::VectorXd dummy_rc = Eigen::VectorXd::Zero(ncols);
    double dummy_obj = 0.0;
    std::vector<bool> remove(m, false);
    bool any_removed = false;
    for (int r = 0; r < m; ++r) {
      if (tab.basis[r] < tab.art_start) continue;
      int col = -1;
      double best = 1e-7;
      for (int j = 0; j < tab.art_start; ++j) {
        if (std::abs(tab.t(r, j)) > best) {
          best = std::abs(tab.t(r, j));
          col = j;
        }
      }
      if (col >= 0) {
        pivot(tab, dummy_rc, dummy_obj, r, col);
      } else {
        remove[r] = true;
        any_removed = true;
      }
    }
    if (any_removed) {
      tab.drop_rows(remove);
      tab.refactor();
    }
  }

  // Phase 2 over the original objective.
  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(ncols);
  cost2.head(n) = lp.c;
  cost2.segment(n, n) = -lp.c;
  double obj2 = 0.0;
  rc = reduced_costs(tab, cost2, obj2);
  pr = run_simplex(tab, cost2, rc, obj2, barred, opts.max_iterations, iterations);
  sol.iterations = iterations;
  if (pr == PivotResult::iteration_limit) {
    sol.status = LPStatus::iteration_limit;
    return sol;
  }
  if (pr == PivotResult::unbounded) {
    sol.status = LPStatus::unbounded;
    sol.value = ExtReal::minus_inf();
    return sol;
  }
  tab.refactor();

  // Primal point.
  const int live_rows = static_cast<int>(tab.t.rows());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(ncols);
  for (int r = 0; r < live_rows; ++r) w(tab.basis[r]) = tab.t(r, ncols);
  sol.z = w.head(n) - w.segment(n, n);
  sol.value = ExtReal(lp.c.dot(sol.z));

  // Duals: the artificial block of the final tableau is B^{-1}, so
  // y_std = c_B^T B^{-1} read off column-wise; map back through row signs.
  // Rows dropped as redundant have zero columns there and zero multipliers.
  Eigen::VectorXd y_std = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int r = 0; r < live_rows; ++r) {
      double cb = cost2(tab.basis[r]);
      if (cb != 0.0) acc += cb * tab.t(r, 2 * n + mi + i);
    }
    y_std(i) = acc;
  }
  // Stationarity c + G^T y = 0 with y = -sign .* scale .* y_std.
  Eigen::VectorXd y = -(row_sign.array() * row_scale.array() * y_std.array()).matrix();

  sol.y_ub = y.head(m_ub);
  sol.y_eq = y.tail(m_eq);
  sol.y_lower = Eigen::VectorXd::Zero(lp.lower.size());
  sol.y_upper = Eigen::VectorXd::Zero(lp.upper.size());
  row = m_ub;
  for (int i : lower_rows) sol.y_lower(i) = y(row++);
  for (int i : upper_rows) sol.y_upper(i) = y(row++);
  sol.status = LPStatus::optimal;

  // Final audit: a claimed optimum must be feasible and carry sign-correct
  // multipliers. Failing here means numerics broke down, never a wrong answer.
  double audit_tol = 1e2 * opts.feas_tol * std::max(feas_scale, gb_orig.size() > 0
                                                        ? gb_orig.lpNorm<Eigen::Infinity>()
                                                        : 1.0);
  double worst_p = 0.0, worst_d = 0.0;
  for (int r = 0; r < mi; ++r)
    worst_p = std::max(worst_p, (g_orig.row(r).dot(sol.z) - gb_orig(r)) * row_scale(r));
  for (int r = mi; r < m; ++r)
    worst_p = std::max(worst_p, std::abs(g_orig.row(r).dot(sol.z) - gb_orig(r)) * row_scale(r));
  if (m_ub > 0) worst_d = std::max(worst_d, -sol.y_ub.minCoeff());
  if (std::max(worst_p, worst_d) > audit_tol) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "solve_lp: numerical audit failed (primal %.3e, dual sign %.3e, tol %.3e)",
                  worst_p, worst_d, audit_tol);
    throw std::runtime_error(msg);
  }
  return sol;
}

double KktReport::worst() const {
  return std::max(std::max(feasibility, dual_feasibility), std::max(stationarity, complementarity));
}

KktReport check_kkt(const LinearProgram& lp, const LPSolution& sol, double tol) {
  if (sol.status != LPStatus::optimal)
    throw std::invalid_argument("check_kkt: solution status is not optimal");
  const int n = lp.num_vars();
  if (sol.z.size() != n) throw std::invalid_argument("check_kkt: solution size mismatch");

  KktReport rep;

  if (lp.b_ub.size() > 0) {
    Eigen::VectorXd slack = lp.a_ub * sol.z - lp.b_ub;
    rep.feasibility = std::max(rep.feasibility, slack.maxCoeff());
    for (int i = 0; i < slack.size(); ++i)
      rep.complementarity = std::max(rep.complementarity, std::abs(sol.y_ub(i) * slack(i)));
    rep.dual_feasibility = std::max(rep.dual_feasibility, -sol.y_ub.minCoeff());
  }
  if (lp.b_eq.size() > 0) {
    rep.feasibility =
        std::max(rep.feasibility, (lp.a_eq * sol.z - lp.b_eq).lpNorm<Eigen::Infinity>());
  }
  Eigen::VectorXd grad = lp.c;
  if (lp.b_ub.size() > 0) grad += lp.a_ub.transpose() * sol.y_ub;
  if (lp.b_eq.size() > 0) grad += lp.a_eq.transpose() * sol.y_eq;
  for (int i = 0; i < lp.lower.size(); ++i) {
    if (!std::isfinite(lp.lower(i))) continue;
    double s = lp.lower(i) - sol.z(i);
    rep.feasibility = std::max(rep.feasibility, s);
    rep.complementarity = std::max(rep.complementarity, std::abs(sol.y_lower(i) * s));
    rep.dual_feasibility = std::max(rep.dual_feasibility, -sol.y_lower(i));
    grad(i) -= sol.y_lower(i);
  }
  for (int i = 0; i < lp.upper.size(); ++i) {
    if (!std::isfinite(lp.upper(i))) continue;
    double s = sol.z(i) - lp.upper(i);
    rep.feasibility = std::max(rep.feasibility, s);
    rep.complementarity = std::max(rep.complementarity, std::abs(sol.y_upper(i) * s));
    rep.dual_feasibility = std::max(rep.dual_feasibility, -sol.y_upper(i));
    grad(i) += sol.y_upper(i);
  }
  rep.stationarity = grad.lpNorm<Eigen::Infinity>();
  rep.feasibility = std::max(rep.feasibility, 0.0);
  rep.dual_feasibility = std::max(rep.dual_feasibility, 0.0);
  rep.pass = rep.worst() <= tol;
  return rep;
}

}  // namespace dincl
