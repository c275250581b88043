#include "dincl/functions.hpp"

#include <stdexcept>

#include "dincl/geometry.hpp"
#include "dincl/lp.hpp"

namespace dincl {

namespace {
constexpr double kActiveTol = 1e-9;
}

MaxAffine::MaxAffine(Eigen::MatrixXd grads, Eigen::VectorXd offsets)
    : a(std::move(grads)), b(std::move(offsets)) {
  if (a.rows() == 0) throw std::invalid_argument("MaxAffine: needs at least one row");
  if (a.rows() != b.size()) throw std::invalid_argument("MaxAffine: gradient/offset mismatch");
  if (!a.allFinite() || !b.allFinite()) throw std::invalid_argument("MaxAffine: non-finite data");
}

double evaluate(const MaxAffine& g, const Eigen::VectorXd& x) {
  if (x.size() != g.dim()) throw std::invalid_argument("evaluate: dimension mismatch");
  return (g.a * x + g.b).maxCoeff();
}

ExtReal conjugate_eval(const MaxAffine& g, const Eigen::VectorXd& x_star) {
  if (x_star.size() != g.dim()) throw std::invalid_argument("conjugate_eval: dimension mismatch");
  const int l = g.rows();
  LinearProgram lp;
  lp.c = -g.b;
  lp.a_eq = Eigen::MatrixXd::Zero(g.dim() + 1, l);
  lp.a_eq.topRows(g.dim()) = g.a.transpose();
  lp.a_eq.row(g.dim()).setOnes();
  lp.b_eq = Eigen::VectorXd::Zero(g.dim() + 1);
  lp.b_eq.head(g.dim()) = x_star;
  lp.b_eq(g.dim()) = 1.0;
  lp.lower = Eigen::VectorXd::Zero(l);
  LPSolution s = solve_lp(lp);
  if (s.status == LPStatus::infeasible) return ExtReal::plus_inf();
  if (s.status != LPStatus::optimal) throw std::runtime_error("conjugate_eval: LP failed");
  return s.value;
}

double subdiff_residual(const MaxAffine& g, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != g.dim() || y.size() != g.dim())
    throw std::invalid_argument("subdiff_residual: dimension mismatch");
  Eigen::VectorXd vals = g.a * x + g.b;
  double top = vals.maxCoeff();
  std::vector<int> active;
  for (int i = 0; i < g.rows(); ++i)
    if (vals(i) >= top - kActiveTol) active.push_back(i);
  Eigen::MatrixXd gens(g.dim(), static_cast<int>(active.size()));
  for (int i = 0; i < static_cast<int>(active.size()); ++i) gens.col(i) = g.a.row(active[i]);
  return conic_combination_residual(gens, y, /*simplex=*/true);
}

bool subdiff_contains(const MaxAffine& g, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                      double tol) {
  return subdiff_residual(g, x, y) <= tol;
}

ExtReal young_fenchel_residual(const MaxAffine& g, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& x_star) {
  ExtReal conj = conjugate_eval(g, x_star);
  if (conj.is_plus_inf()) return ExtReal::plus_inf();
  return ExtReal(evaluate(g, x) + conj.value() - x.dot(x_star));
}

}  // namespace dincl
