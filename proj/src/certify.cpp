#include "dincl/certify.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dincl {

const char* const kSignConventionNote =
    "dual cones use nonnegative pairings (w* in K* iff <w, w*> >= 0 on K, realized as "
    "w* = -C^T lambda with lambda >= 0); polyhedral adjoint systems read x* = -A^T lambda, "
    "-v* = E^T lambda; the terminal conjugate argument carries the parity factor (-1)^k; "
    "adjoint grid values pair with inclusion node i through grid node i+k";

namespace {

constexpr double kFeasAccept = 1e-6;
constexpr double kActiveTol = 1e-6;
const double kInf = std::numeric_limits<double>::infinity();

void require_feasible(const ProblemSpec& spec, const DiscreteTrajectory& traj) {
  if (trajectory_residual(spec, traj) > kFeasAccept)
    throw std::invalid_argument("certify: trajectory is not feasible");
}

Eigen::VectorXd stack2(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace

const ConditionEntry* VerificationReport::find(const std::string& condition) const {
  for (const auto& e : entries)
    if (e.condition == condition) return &e;
  return nullptr;
}

bool VerificationReport::all_pass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

ConditionEntry check_euler_lagrange(const ProblemSpec& spec, const DiscreteTrajectory& traj,
                                    const DualCertificate& cert, double tol) {
  require_feasible(spec, traj);
  std::vector<Eigen::VectorXd> w = adjoint_inclusion_terms(spec, cert);
  const int k = spec.order;
  const auto* pm = std::get_if<PolyhedralMap>(&spec.dynamics);
  const auto* lc = std::get_if<LinearControlMap>(&spec.dynamics);

  ConditionEntry entry;
  entry.condition = "a";
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    double res;
    if (pm) {
      res = lam_polyhedral_residual(*pm, cert.x_star[i + k], traj.x[i], traj.v[i], w[i],
                                    kActiveTol);
    } else {
      res = (w[i] - lc->a.transpose() * cert.x_star[i + k]).lpNorm<Eigen::Infinity>();
      ExtReal wu = support(lc->u, Eigen::VectorXd(lc->b.transpose() * cert.x_star[i + k]));
      double achieved = (traj.v[i] - lc->a * traj.x[i]).dot(cert.x_star[i + k]);
      res = std::max(res, std::max(0.0, wu.value() - achieved));
    }
    if (res > entry.residual) {
      entry.residual = res;
      entry.worst_node = i;
    }
  }
  for (int l = 0; l <= spec.intervals; ++l) {
    PolyhedralCone cone = tangent_cone(spec.state_sets[l], traj.x[l], kActiveTol);
    double res = dual_cone_residual(cone, cert.v_star[l]);
    if (res > entry.residual) {
      entry.residual = res;
      entry.worst_node = l;
    }
  }
  entry.pass = entry.residual <= tol;
  return entry;
}

ConditionEntry check_argmax(const ProblemSpec& spec, const DiscreteTrajectory& traj,
                            const DualCertificate& cert, double tol) {
  require_feasible(spec, traj);
  const int k = spec.order;
  ConditionEntry entry;
  entry.condition = "b";
  for (int i = 0; i < static_cast<int>(traj.v.size()); ++i) {
    ExtReal res = argmax_residual(spec.dynamics, traj.x[i], traj.v[i], cert.x_star[i + k],
                                  kFeasAccept);
    if (!res.finite()) {
      entry.residual = kInf;
      entry.worst_node = i;
      entry.pass = false;
      return entry;
    }
    if (res.value() > entry.residual) {
      entry.residual = res.value();
      entry.worst_node = i;
    }
  }
  entry.pass = entry.residual <= tol;
  return entry;
}

std::pair<ConditionEntry, ConditionEntry> check_transversality(const ProblemSpec& spec,
                                                               const DiscreteTrajectory& traj,
                                                               const DualCertificate& cert,
                                                               double tol) {
  require_feasible(spec, traj);
  BoundaryArgs args = dual_boundary_args(spec, cert);
  auto pairs = endpoint_derivatives(traj.x, spec.order, spec.step());

  ConditionEntry c_entry;
  c_entry.condition = "c";
  {
    double sub = subdiff_residual(spec.objective, stack2(traj.x.front(), traj.x.back()),
                                  stack2(args.p0, args.p_t));
    PolyhedralCone cone =
        tangent_cone(spec.endpoint_set, stack2(pairs[0].first, pairs[0].second), kActiveTol);
    double dual = dual_cone_residual(cone, stack2(cert.mu0, cert.mu_t));
    c_entry.residual = std::max(sub, dual);
    c_entry.worst_node = 0;
    c_entry.pass = c_entry.residual <= tol;
  }

  ConditionEntry d_entry;
  d_entry.condition = "d";
  for (int j = 0; j + 1 < spec.order; ++j) {
    const auto& pair = pairs[spec.order - 1 - j];
    PolyhedralCone cone =
        tangent_cone(spec.endpoint_set, stack2(pair.first, pair.second), kActiveTol);
    double res = dual_cone_residual(
        cone, stack2(Eigen::VectorXd(-args.g0[j]), Eigen::VectorXd(-args.g_t[j])));
    if (res > d_entry.residual) {
      d_entry.residual = res;
      d_entry.worst_node = j;
    }
  }
  d_entry.pass = d_entry.residual <= tol;
  return {c_entry, d_entry};
}

ConditionEntry check_weak_duality(const ProblemSpec& spec, const DiscreteTrajectory& traj,
                                  const DualCertificate& cert, double tol) {
  require_feasible(spec, traj);
  ExtReal dual = evaluate_dual_functional(spec, cert);
  ConditionEntry entry;
  entry.condition = "weak_duality";
  entry.residual = dual.is_minus_inf() ? -kInf : dual.value() - objective_value(spec, traj);
  entry.pass = entry.residual <= tol;
  return entry;
}

GapResult check_gap(const ProblemSpec& spec, double tol, const SolveOptions& opts) {
  GapResult out;
  PrimalResult res = solve_primal(spec, opts);
  out.status = res.status;
  if (res.status != LPStatus::optimal) return out;
  out.primal = res.value;
  DualCertificate cert = extract_dual_certificate(spec, res.lp_solution);
  ExtReal dual = evaluate_dual_functional(spec, cert);
  out.dual = dual.raw();
  out.gap = out.primal - out.dual;
  out.pass = dual.finite() && std::abs(out.gap) <= tol;
  return out;
}

ConditionEntry check_max_principle(const ProblemSpec& spec, const DiscreteTrajectory& traj,
                                   const DualCertificate& cert, double tol) {
  const auto* lc = std::get_if<LinearControlMap>(&spec.dynamics);
  if (!lc)
    throw std::invalid_argument("check_max_principle: needs linear-control dynamics");
  require_feasible(spec, traj);
  const int k = spec.order;
  ConditionEntry entry;
  entry.condition = "max_principle";
  for (int i = 0; i < static_cast<int>(traj.v.size()); ++i) {
    if (graph_residual(spec.dynamics, traj.x[i], traj.v[i]) > kFeasAccept)
      throw std::invalid_argument("check_max_principle: no control realizes v_i");
    ExtReal wu = support(lc->u, Eigen::VectorXd(lc->b.transpose() * cert.x_star[i + k]));
    double achieved = (traj.v[i] - lc->a * traj.x[i]).dot(cert.x_star[i + k]);
    double res = std::max(0.0, wu.value() - achieved);
    if (res > entry.residual) {
      entry.residual = res;
      entry.worst_node = i;
    }
  }
  entry.pass = entry.residual <= tol;
  return entry;
}

ConditionEntry check_polyhedral_conditions(const ProblemSpec& spec, const DiscreteTrajectory& traj,
                                           const DualCertificate& cert, double tol) {
  const auto* pm = std::get_if<PolyhedralMap>(&spec.dynamics);
  if (!pm)
    throw std::invalid_argument("check_polyhedral_conditions: needs polyhedral dynamics");
  if (!cert.lambda)
    throw std::invalid_argument("check_polyhedral_conditions: multipliers missing");
  require_feasible(spec, traj);
  const auto& lambda = *cert.lambda;
  if (static_cast<int>(lambda.size()) != spec.num_inclusion_nodes())
    throw std::invalid_argument("check_polyhedral_conditions: wrong multiplier count");
  std::vector<Eigen::VectorXd> w = adjoint_inclusion_terms(spec, cert);
  const int k = spec.order;

  ConditionEntry entry;
  entry.condition = "complementarity";
  for (int i = 0; i < static_cast<int>(lambda.size()); ++i) {
    double res = lambda[i].size() > 0 ? std::max(0.0, -lambda[i].minCoeff()) : 0.0;
    Eigen::VectorXd slack = pm->a * traj.x[i] - pm->e * traj.v[i] - pm->d;
    res = std::max(res, std::abs(slack.dot(lambda[i])));
    res = std::max(res,
                   (cert.x_star[i + k] + pm->e.transpose() * lambda[i]).lpNorm<Eigen::Infinity>());
    res = std::max(res, (w[i] + pm->a.transpose() * lambda[i]).lpNorm<Eigen::Infinity>());
    if (res > entry.residual) {
      entry.residual = res;
      entry.worst_node = i;
    }
  }
  entry.pass = entry.residual <= tol;
  return entry;
}

VerificationReport verify_all(const ProblemSpec& spec, const DiscreteTrajectory& traj,
                              const DualCertificate& cert, const CertifyOptions& opts) {
  VerificationReport report;
  report.entries.push_back(check_euler_lagrange(spec, traj, cert, opts.inclusion_tol));
  report.entries.push_back(check_argmax(spec, traj, cert, opts.inclusion_tol));
  auto [c_entry, d_entry] = check_transversality(spec, traj, cert, opts.inclusion_tol);
  report.entries.push_back(c_entry);
  report.entries.push_back(d_entry);
  if (std::holds_alternative<LinearControlMap>(spec.dynamics))
    report.entries.push_back(check_max_principle(spec, traj, cert, opts.inclusion_tol));
  else if (cert.lambda)
    report.entries.push_back(
        check_polyhedral_conditions(spec, traj, cert, opts.complementarity_tol));
  report.entries.push_back(check_weak_duality(spec, traj, cert, opts.weak_duality_tol));

  ConditionEntry strong;
  strong.condition = "strong_duality";
  ExtReal dual = evaluate_dual_functional(spec, cert);
  strong.residual =
      dual.is_minus_inf() ? kInf : std::abs(dual.value() - objective_value(spec, traj));
  strong.pass = strong.residual <= opts.gap_tol;
  report.entries.push_back(strong);
  return report;
}

}  // namespace dincl
