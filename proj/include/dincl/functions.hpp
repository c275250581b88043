#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dincl/ext_real.hpp"

namespace dincl {

/// Proper convex piecewise-affine function g(x) = max_l (<a_l, x> + b_l),
/// finite everywhere. At least one row is required.
struct MaxAffine {
  Eigen::MatrixXd a;  // one gradient per row
  Eigen::VectorXd b;  // offsets

  MaxAffine() = default;
  MaxAffine(Eigen::MatrixXd grads, Eigen::VectorXd offsets);

  int dim() const { return static_cast<int>(a.cols()); }
  int rows() const { return static_cast<int>(a.rows()); }
};

double evaluate(const MaxAffine& g, const Eigen::VectorXd& x);

/// g*(x*) = sup_x {<x, x*> - g(x)}, computed as the value of
/// min{-sum mu_l b_l : sum mu_l a_l = x*, mu in the simplex}; +inf when x*
/// lies outside the convex hull of the gradients.
ExtReal conjugate_eval(const MaxAffine& g, const Eigen::VectorXd& x_star);

/// Whether y lies in the subdifferential of g at x (the convex hull of the
/// gradients active at x), to tolerance tol on the feasibility residual.
bool subdiff_contains(const MaxAffine& g, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      double tol);

/// One-norm distance from y to the convex hull of the active gradients at x.
double subdiff_residual(const MaxAffine& g, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// g(x) + g*(x*) - <x, x*>; nonnegative, zero exactly on subgradient pairs.
ExtReal young_fenchel_residual(const MaxAffine& g, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& x_star);

}  // namespace dincl
