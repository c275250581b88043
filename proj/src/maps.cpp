#include "dincl/maps.hpp"

#include <stdexcept>

namespace dincl {

namespace {

// {v : -E v <= d - A x}, the value set of a polyhedral map at x.
Polytope value_set(const PolyhedralMap& f, const Eigen::VectorXd& x) {
  return Polytope(-f.e, f.d - f.a * x);
}

// LP over the graph of f: optimize <cx, x> + <cv, v> with sense min.
// For linear-control maps the graph is parameterized by (x, u).
LPSolution graph_lp(const SetValuedMap& f, const Eigen::VectorXd& cx, const Eigen::VectorXd& cv) {
  const int n = state_dim(f);
  if (const auto* lc = std::get_if<LinearControlMap>(&f)) {
    const int r = lc->control_dim();
    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(n + r);
    lp.c.head(n) = cx + lc->a.transpose() * cv;
    lp.c.tail(r) = lc->b.transpose() * cv;
    const int mu = lc->u.rows();
    lp.a_ub = Eigen::MatrixXd::Zero(mu, n + r);
    lp.a_ub.rightCols(r) = lc->u.a();
    lp.b_ub = lc->u.d();
    return solve_lp(lp);
  }
  const auto& pm = std::get<PolyhedralMap>(f);
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(2 * n);
  lp.c.head(n) = cx;
  lp.c.tail(n) = cv;
  lp.a_ub = Eigen::MatrixXd::Zero(pm.rows(), 2 * n);
  lp.a_ub.leftCols(n) = pm.a;
  lp.a_ub.rightCols(n) = -pm.e;
  lp.b_ub = pm.d;
  return solve_lp(lp);
}

}  // namespace

LinearControlMap::LinearControlMap(Eigen::MatrixXd a_in, Eigen::MatrixXd b_in, Polytope u_in)
    : a(std::move(a_in)), b(std::move(b_in)), u(std::move(u_in)) {
  if (a.rows() != a.cols()) throw std::invalid_argument("LinearControlMap: A must be square");
  if (b.rows() != a.rows()) throw std::invalid_argument("LinearControlMap: A/B row mismatch");
  if (u.dim() != b.cols()) throw std::invalid_argument("LinearControlMap: B/U dimension mismatch");
  if (u.is_empty()) throw std::invalid_argument("LinearControlMap: U is empty");
  for (int i = 0; i < u.dim(); ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(u.dim());
    e(i) = 1.0;
    if (!support(u, e).finite() || !support(u, Eigen::VectorXd(-e)).finite())
      throw std::invalid_argument("LinearControlMap: U is unbounded");
  }
}

PolyhedralMap::PolyhedralMap(Eigen::MatrixXd a_in, Eigen::MatrixXd e_in, Eigen::VectorXd d_in)
    : a(std::move(a_in)), e(std::move(e_in)), d(std::move(d_in)) {
  if (a.rows() != e.rows() || a.cols() != e.cols() || a.rows() != d.size())
    throw std::invalid_argument("PolyhedralMap: A/E/d dimensions inconsistent");
  Eigen::MatrixXd g(rows(), 2 * state_dim());
  g.leftCols(state_dim()) = a;
  g.rightCols(state_dim()) = -e;
  if (Polytope(g, d).is_empty()) throw std::invalid_argument("PolyhedralMap: empty graph");
}

int state_dim(const SetValuedMap& f) {
  return std::visit([](const auto& m) { return m.state_dim(); }, f);
}

double graph_residual(const SetValuedMap& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  const int n = state_dim(f);
  if (x.size() != n || v.size() != n)
    throw std::invalid_argument("graph_residual: dimension mismatch");
  if (const auto* pm = std::get_if<PolyhedralMap>(&f))
    return (pm->a * x - pm->e * v - pm->d).cwiseMax(0.0).sum();
  const auto& lc = std::get<LinearControlMap>(f);
  // distance of v - A x to B U
  const int r = lc.control_dim();
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(r + 2 * n);
  lp.c.tail(2 * n).setOnes();
  lp.a_eq = Eigen::MatrixXd::Zero(n, r + 2 * n);
  lp.a_eq.leftCols(r) = lc.b;
  lp.a_eq.block(0, r, n, n) = Eigen::MatrixXd::Identity(n, n);
  lp.a_eq.block(0, r + n, n, n) = -Eigen::MatrixXd::Identity(n, n);
  lp.b_eq = v - lc.a * x;
  lp.a_ub = Eigen::MatrixXd::Zero(lc.u.rows(), r + 2 * n);
  lp.a_ub.leftCols(r) = lc.u.a();
  lp.b_ub = lc.u.d();
  lp.lower = Eigen::VectorXd::Constant(r + 2 * n, -std::numeric_limits<double>::infinity());
  lp.lower.tail(2 * n).setZero();
  LPSolution s = solve_lp(lp);
  if (s.status != LPStatus::optimal) throw std::runtime_error("graph_residual: LP failed");
  return s.value.value();
}

ExtReal hamiltonian(const SetValuedMap& f, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& v_star) {
  const int n = state_dim(f);
  if (x.size() != n || v_star.size() != n)
    throw std::invalid_argument("hamiltonian: dimension mismatch");
  if (const auto* lc = std::get_if<LinearControlMap>(&f)) {
    ExtReal wu = support(lc->u, Eigen::VectorXd(lc->b.transpose() * v_star));
    return ExtReal(x.dot(lc->a.transpose() * v_star)) + wu;
  }
  return support(value_set(std::get<PolyhedralMap>(f), x), v_star);
}

Eigen::VectorXd argmax_point(const SetValuedMap& f, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& v_star) {
  const int n = state_dim(f);
  if (x.size() != n || v_star.size() != n)
    throw std::invalid_argument("argmax_point: dimension mismatch");
  if (const auto* lc = std::get_if<LinearControlMap>(&f)) {
    LinearProgram lp;
    lp.c = -(lc->b.transpose() * v_star);
    lp.a_ub = lc->u.a();
    lp.b_ub = lc->u.d();
    LPSolution s = solve_lp(lp);
    if (s.status != LPStatus::optimal)
      throw std::domain_error("argmax_point: Hamiltonian is not finite");
    return lc->a * x + lc->b * s.z;
  }
  const auto& pm = std::get<PolyhedralMap>(f);
  LinearProgram lp;
  lp.c = -v_star;
  lp.a_ub = -pm.e;
  lp.b_ub = pm.d - pm.a * x;
  LPSolution s = solve_lp(lp);
  if (s.status != LPStatus::optimal)
    throw std::domain_error("argmax_point: Hamiltonian is not finite");
  return s.z;
}

ExtReal argmax_residual(const SetValuedMap& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& v_star, double tol) {
  if (graph_residual(f, x, v) > tol)
    throw std::invalid_argument("argmax_residual: v is not in F(x)");
  ExtReal h = hamiltonian(f, x, v_star);
  if (h.is_plus_inf()) return ExtReal::plus_inf();
  return ExtReal(h.value() - v.dot(v_star));
}

std::optional<Eigen::VectorXd> lam_linear(const LinearControlMap& f, const Eigen::VectorXd& v_star,
                                          const Eigen::VectorXd& x_tilde,
                                          const Eigen::VectorXd& v_tilde, double tol) {
  SetValuedMap wrapped = f;
  if (graph_residual(wrapped, x_tilde, v_tilde) > tol)
    throw std::invalid_argument("lam_linear: no control realizes v_tilde");
  // The realized control satisfies <B u, v*> = <v_tilde - A x_tilde, v*>
  // whichever selection is taken, so the maximum-principle test needs no
  // explicit control recovery.
  double achieved = (v_tilde - f.a * x_tilde).dot(v_star);
  ExtReal best = support(f.u, Eigen::VectorXd(f.b.transpose() * v_star));
  if (!best.finite()) throw std::runtime_error("lam_linear: unbounded control set");
  if (best.value() - achieved > tol) return std::nullopt;
  return Eigen::VectorXd(f.a.transpose() * v_star);
}

bool lam_membership_via_hamiltonian(const SetValuedMap& f, const Eigen::VectorXd& v_star,
                                    const Eigen::VectorXd& x_tilde, const Eigen::VectorXd& v_tilde,
                                    const Eigen::VectorXd& x_star, double tol) {
  ExtReal pre = argmax_residual(f, x_tilde, v_tilde, v_star, tol);
  if (!(pre.finite() && pre.value() <= tol))
    throw std::invalid_argument(
        "lam_membership_via_hamiltonian: v_tilde is not in the argmaximum set");
  // sup_x {H_F(x, v*) - <x*, x>} as one LP over the graph; membership means
  // the supremum is attained at x_tilde.
  LPSolution s = graph_lp(f, x_star, Eigen::VectorXd(-v_star));
  if (s.status == LPStatus::unbounded) return false;
  if (s.status != LPStatus::optimal)
    throw std::runtime_error("lam_membership_via_hamiltonian: LP failed");
  double sup = -s.value.value();
  double at_tilde = hamiltonian(f, x_tilde, v_star).value() - x_star.dot(x_tilde);
  return sup - at_tilde <= tol * (1.0 + std::abs(sup));
}

double lam_polyhedral_residual(const PolyhedralMap& f, const Eigen::VectorXd& v_star,
                               const Eigen::VectorXd& x_tilde, const Eigen::VectorXd& v_tilde,
                               const Eigen::VectorXd& x_star, double active_tol) {
  const int n = f.state_dim();
  if (v_star.size() != n || x_tilde.size() != n || v_tilde.size() != n || x_star.size() != n)
    throw std::invalid_argument("lam_polyhedral_residual: dimension mismatch");
  Eigen::VectorXd slack = f.a * x_tilde - f.e * v_tilde - f.d;
  if (slack.maxCoeff() > active_tol)
    throw std::invalid_argument("lam_polyhedral_residual: point is not on the graph");
  std::vector<int> active;
  for (int i = 0; i < f.rows(); ++i)
    if (slack(i) >= -active_tol) active.push_back(i);
  // target (x*, v*) = sum lambda_i (-A_i, -E_i), lambda >= 0 on active rows
  Eigen::MatrixXd gens(2 * n, static_cast<int>(active.size()));
  for (int i = 0; i < static_cast<int>(active.size()); ++i) {
    gens.col(i).head(n) = -f.a.row(active[i]).transpose();
    gens.col(i).tail(n) = -f.e.row(active[i]).transpose();
  }
  Eigen::VectorXd target(2 * n);
  target.head(n) = x_star;
  target.tail(n) = v_star;
  return conic_combination_residual(gens, target, /*simplex=*/false);
}

bool lam_polyhedral_members(const PolyhedralMap& f, const Eigen::VectorXd& v_star,
                            const Eigen::VectorXd& x_tilde, const Eigen::VectorXd& v_tilde,
                            const Eigen::VectorXd& x_star, double tol) {
  return lam_polyhedral_residual(f, v_star, x_tilde, v_tilde, x_star) <= tol;
}

ExtReal m_function(const SetValuedMap& f, const Eigen::VectorXd& x_star,
                   const Eigen::VectorXd& v_star) {
  const int n = state_dim(f);
  if (x_star.size() != n || v_star.size() != n)
    throw std::invalid_argument("m_function: dimension mismatch");
  LPSolution s = graph_lp(f, x_star, Eigen::VectorXd(-v_star));
  switch (s.status) {
    case LPStatus::optimal: return s.value;
    case LPStatus::unbounded: return ExtReal::minus_inf();
    case LPStatus::infeasible: return ExtReal::plus_inf();  // empty graph
    default: throw std::runtime_error("m_function: LP iteration limit");
  }
}

}  // namespace dincl
