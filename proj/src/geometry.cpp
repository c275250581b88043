#include "dincl/geometry.hpp"

#include <stdexcept>

namespace dincl {

Polytope::Polytope(Eigen::MatrixXd a, Eigen::VectorXd d)
    : a_(std::move(a)), d_(std::move(d)), empty_cache_(std::make_shared<std::atomic<int>>(-1)) {
  if (a_.rows() != d_.size()) throw std::invalid_argument("Polytope: a/d row mismatch");
  dim_ = static_cast<int>(a_.cols());
  if (a_.rows() > 0 && (!a_.allFinite() || !d_.allFinite()))
    throw std::invalid_argument("Polytope: non-finite data");
}

Polytope Polytope::whole_space(int dim) {
  Polytope p;
  p.a_ = Eigen::MatrixXd::Zero(0, dim);
  p.d_ = Eigen::VectorXd::Zero(0);
  p.dim_ = dim;
  p.empty_cache_ = std::make_shared<std::atomic<int>>(0);
  return p;
}

Polytope Polytope::box(int dim, double lo, double hi) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * dim, dim);
  Eigen::VectorXd d(2 * dim);
  for (int i = 0; i < dim; ++i) {
    a(i, i) = 1.0;
    d(i) = hi;
    a(dim + i, i) = -1.0;
    d(dim + i) = -lo;
  }
  return Polytope(a, d);
}

bool Polytope::is_empty() const {
  if (!empty_cache_) return false;  // default-constructed: R^0
  int cached = empty_cache_->load();
  if (cached >= 0) return cached == 1;
  if (rows() == 0 || dim_ == 0) {
    // whole space, or 0-dim set {()} constrained by d >= 0 rows
    bool empty = false;
    if (dim_ == 0 && rows() > 0) empty = (d_.minCoeff() < 0.0);
    empty_cache_->store(empty ? 1 : 0);
    return empty;
  }
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(dim_);
  lp.a_ub = a_;
  lp.b_ub = d_;
  bool empty = solve_lp(lp).status == LPStatus::infeasible;
  empty_cache_->store(empty ? 1 : 0);
  return empty;
}

ExtReal support(const Polytope& q, const Eigen::VectorXd& x_star) {
  if (x_star.size() != q.dim()) throw std::invalid_argument("support: dimension mismatch");
  if (q.is_empty()) return ExtReal::minus_inf();
  if (q.dim() == 0) return ExtReal(0.0);
  LinearProgram lp;
  lp.c = -x_star;
  lp.a_ub = q.a();
  lp.b_ub = q.d();
  LPSolution s = solve_lp(lp);
  switch (s.status) {
    case LPStatus::optimal: return ExtReal(-s.value.value());
    case LPStatus::unbounded: return ExtReal::plus_inf();
    case LPStatus::infeasible: return ExtReal::minus_inf();
    default: throw std::runtime_error("support: LP iteration limit");
  }
}

bool contains(const Polytope& q, const Eigen::VectorXd& x, double tol) {
  if (x.size() != q.dim()) throw std::invalid_argument("contains: dimension mismatch");
  if (q.rows() == 0) return true;
  return ((q.a() * x - q.d()).array() <= tol).all();
}

ActiveSet active_set(const Polytope& q, const Eigen::VectorXd& x, double active_tol) {
  if (x.size() != q.dim()) throw std::invalid_argument("active_set: dimension mismatch");
  ActiveSet as;
  as.slack = q.rows() > 0 ? Eigen::VectorXd(q.a() * x - q.d()) : Eigen::VectorXd(0);
  for (int i = 0; i < q.rows(); ++i)
    if (std::abs(as.slack(i)) <= active_tol) as.indices.push_back(i);
  return as;
}

PolyhedralCone tangent_cone(const Polytope& q, const Eigen::VectorXd& x_tilde, double active_tol) {
  if (!contains(q, x_tilde, active_tol))
    throw std::invalid_argument("tangent_cone: point is outside the set");
  ActiveSet as = active_set(q, x_tilde, active_tol);
  Eigen::MatrixXd c(static_cast<int>(as.indices.size()), q.dim());
  for (int i = 0; i < static_cast<int>(as.indices.size()); ++i) c.row(i) = q.a().row(as.indices[i]);
  return PolyhedralCone(std::move(c), q.dim());
}

double dual_cone_residual(const PolyhedralCone& k, const Eigen::VectorXd& w_star) {
  if (w_star.size() != k.dim) throw std::invalid_argument("dual_cone_residual: dimension mismatch");
  Eigen::MatrixXd gens = -k.c.transpose();  // columns generate K*
  return conic_combination_residual(gens, w_star, /*simplex=*/false);
}

bool dual_cone_membership(const PolyhedralCone& k, const Eigen::VectorXd& w_star, double tol) {
  return dual_cone_residual(k, w_star) <= tol;
}

ConicFit conic_combination_fit(const Eigen::MatrixXd& generators, const Eigen::VectorXd& y,
                               bool simplex) {
  const int q = static_cast<int>(y.size());
  const int p = static_cast<int>(generators.cols());
  if (generators.rows() != q)
    throw std::invalid_argument("conic_combination_fit: dimension mismatch");
  ConicFit fit;
  if (p == 0) {
    fit.residual = simplex ? std::numeric_limits<double>::infinity() : y.lpNorm<1>();
    fit.point = Eigen::VectorXd::Zero(q);
    return fit;
  }
  // min |r|_1  s.t.  G mu + rp - rn = y, mu >= 0, (sum mu = 1 when simplex)
  const int nv = p + 2 * q;
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(nv);
  lp.c.tail(2 * q).setOnes();
  int me = q + (simplex ? 1 : 0);
  lp.a_eq = Eigen::MatrixXd::Zero(me, nv);
  lp.b_eq = Eigen::VectorXd::Zero(me);
  lp.a_eq.block(0, 0, q, p) = generators;
  lp.a_eq.block(0, p, q, q) = Eigen::MatrixXd::Identity(q, q);
  lp.a_eq.block(0, p + q, q, q) = -Eigen::MatrixXd::Identity(q, q);
  lp.b_eq.head(q) = y;
  if (simplex) {
    lp.a_eq.row(q).head(p).setOnes();
    lp.b_eq(q) = 1.0;
  }
  lp.lower = Eigen::VectorXd::Zero(nv);
  LPSolution s = solve_lp(lp);
  if (s.status != LPStatus::optimal)
    throw std::runtime_error("conic_combination_fit: feasibility LP failed");
  fit.residual = s.value.value();
  fit.point = generators * s.z.head(p);
  return fit;
}

double conic_combination_residual(const Eigen::MatrixXd& generators, const Eigen::VectorXd& y,
                                  bool simplex) {
  return conic_combination_fit(generators, y, simplex).residual;
}

}  // namespace dincl
