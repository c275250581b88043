#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <memory>
#include <vector>

#include "dincl/ext_real.hpp"
#include "dincl/lp.hpp"

namespace dincl {

/// Finitely described convex set {x in R^n : a x <= d}. Zero rows mean the
/// whole space. Immutable value; emptiness is decided by a feasibility LP and
/// cached (the cache is shared between copies).
class Polytope {
 public:
  Polytope() = default;
  Polytope(Eigen::MatrixXd a, Eigen::VectorXd d);

  /// Whole space R^n (zero rows).
  static Polytope whole_space(int dim);
  /// Axis-aligned box [lo, hi]^dim.
  static Polytope box(int dim, double lo, double hi);

  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::VectorXd& d() const { return d_; }
  int dim() const { return dim_; }
  int rows() const { return static_cast<int>(a_.rows()); }

  bool is_empty() const;

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd d_;
  int dim_ = 0;
  std::shared_ptr<std::atomic<int>> empty_cache_;  // -1 unknown, 0 nonempty, 1 empty
};

/// Polyhedral cone {w : c w <= 0}. Zero rows mean the whole space.
struct PolyhedralCone {
  Eigen::MatrixXd c;
  int dim = 0;

  PolyhedralCone() = default;
  PolyhedralCone(Eigen::MatrixXd rows, int dimension) : c(std::move(rows)), dim(dimension) {}
  int rows() const { return static_cast<int>(c.rows()); }
};

/// Rows of a polytope active at a point, with their slack values.
struct ActiveSet {
  std::vector<int> indices;
  Eigen::VectorXd slack;  // a x - d per row
};

/// sup{<x, x_star> : x in Q}; +inf if unbounded in that direction, -inf if Q
/// is empty.
ExtReal support(const Polytope& q, const Eigen::VectorXd& x_star);

/// max_i (a_i x - d_i) <= tol. The whole space contains everything.
bool contains(const Polytope& q, const Eigen::VectorXd& x, double tol);

ActiveSet active_set(const Polytope& q, const Eigen::VectorXd& x, double active_tol);

/// Cone of directions staying in Q to first order from x_tilde: the rows of Q
/// active at x_tilde, homogenized. Rejects points outside Q.
PolyhedralCone tangent_cone(const Polytope& q, const Eigen::VectorXd& x_tilde,
                            double active_tol = 1e-9);

/// Membership of w_star in the dual cone K* = {w* : <w, w*> >= 0 for all w in
/// K}, decided through the representation w* = -c^T lambda, lambda >= 0.
bool dual_cone_membership(const PolyhedralCone& k, const Eigen::VectorXd& w_star, double tol);

/// One-norm distance from w_star to {-c^T lambda : lambda >= 0}, reported by a
/// slack-minimizing feasibility LP. Zero (up to tol) means membership.
double dual_cone_residual(const PolyhedralCone& k, const Eigen::VectorXd& w_star);

/// Residual of y against the cone generated by nonnegative combinations of the
/// given columns (optionally with an affine-combination row when simplex=true).
double conic_combination_residual(const Eigen::MatrixXd& generators, const Eigen::VectorXd& y,
                                  bool simplex);

/// Same fit, also reporting the nearest cone point found.
struct ConicFit {
  double residual = 0.0;
  Eigen::VectorXd point;
};
ConicFit conic_combination_fit(const Eigen::MatrixXd& generators, const Eigen::VectorXd& y,
                               bool simplex);

}  // namespace dincl
