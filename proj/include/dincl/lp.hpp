#pragma once

#include <Eigen/Dense>

#include "dincl/ext_real.hpp"

namespace dincl {

/// Dense linear program:
///   minimize    c . z
///   subject to  a_ub z <= b_ub
///               a_eq z  = b_eq
///               lower <= z <= upper   (optional; +-inf entries allowed)
///
/// Variables are free unless bounds are given. Matrices may have zero rows.
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd lower;  // size 0 = absent
  Eigen::VectorXd upper;  // size 0 = absent

  int num_vars() const { return static_cast<int>(c.size()); }
};

enum class LPStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LPStatus s);

/// Solution with dual multipliers. Sign convention: y_ub >= 0 and the
/// Lagrangian stationarity  c + a_ub^T y_ub + a_eq^T y_eq - y_lower + y_upper = 0
/// holds at an optimum, so the dual objective
///   -(b_ub . y_ub) - (b_eq . y_eq) + (lower . y_lower) - (upper . y_upper)
/// equals c . z.
struct LPSolution {
  LPStatus status = LPStatus::infeasible;
  Eigen::VectorXd z;
  ExtReal value = ExtReal(0.0);
  Eigen::VectorXd y_ub;
  Eigen::VectorXd y_eq;
  Eigen::VectorXd y_lower;
  Eigen::VectorXd y_upper;
  int iterations = 0;

  double dual_objective(const LinearProgram& lp) const;
};

struct SolveOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iterations = 200000;
};

/// Two-phase dense simplex with Bland's anti-cycling rule. Deterministic:
/// identical inputs give identical outputs. Infeasible/unbounded are statuses,
/// not exceptions; dimension mismatches are rejected with invalid_argument.
LPSolution solve_lp(const LinearProgram& lp, const SolveOptions& opts = {});

/// Residual report per KKT block for an optimal solution.
struct KktReport {
  double feasibility = 0.0;       // primal: constraint and bound violations
  double dual_feasibility = 0.0;  // negativity of inequality/bound multipliers
  double stationarity = 0.0;      // gradient of the Lagrangian
  double complementarity = 0.0;   // multiplier x slack products
  bool pass = false;

  double worst() const;
};

/// Recomputes all residuals from scratch; rejects non-optimal solutions.
KktReport check_kkt(const LinearProgram& lp, const LPSolution& sol, double tol);

}  // namespace dincl
