#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "dincl/ext_real.hpp"
#include "dincl/functions.hpp"
#include "dincl/geometry.hpp"
#include "dincl/lp.hpp"
#include "dincl/maps.hpp"

namespace dincl {

/// Binomial coefficient as a double (small arguments only).
double binomial(int n, int r);

/// Coefficient of x_{i+s} in the j-th forward difference at i: (-1)^{j-s} C(j,s).
double diff_coeff(int j, int s);

/// j-th forward differences of a node grid, scaled by h^{-j}. Entry i spans
/// nodes i..i+j; the result has grid.size() - j entries.
std::vector<Eigen::VectorXd> forward_diff(const std::vector<Eigen::VectorXd>& grid, int j,
                                          double h);

/// One-sided j-th derivative estimates at both ends of the grid: forward at
/// node 0, backward (mirror stencil) at node N.
std::pair<Eigen::VectorXd, Eigen::VectorXd> endpoint_derivative(
    const std::vector<Eigen::VectorXd>& grid, int j, double h);

/// All endpoint pairs for j = 0..k-1.
std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> endpoint_derivatives(
    const std::vector<Eigen::VectorXd>& grid, int k, double h);

/// Dense matrix realization of the scaled forward-difference map on stacked
/// node vectors. Row block i depends on nodes i..i+order only.
struct DifferenceOperator {
  int order = 0;
  int grid_len = 0;
  int dim = 1;
  double h = 1.0;
  Eigen::MatrixXd matrix;  // ((grid_len-order)*dim) x (grid_len*dim)

  static DifferenceOperator build(int order, int grid_len, int dim, double h);
};

/// A full problem instance: minimize f(x_0, x_N) subject to the k-th order
/// discrete inclusion v_i = (forward k-th difference of x at i) / h^k in
/// F(x_i), endpoint-derivative pairs in S for orders 0..k-1, and x_i in X_i.
struct ProblemSpec {
  int order = 1;        // k
  double horizon = 1.0;  // T
  int intervals = 1;     // N
  SetValuedMap dynamics;
  MaxAffine objective;                // on R^{2n}, arguments (x_0, x_N)
  Polytope endpoint_set;              // S in R^{2n}
  std::vector<Polytope> state_sets;   // one per node, N+1 entries

  int state_dim() const { return dincl::state_dim(dynamics); }
  double step() const { return horizon / intervals; }
  int num_inclusion_nodes() const { return intervals - order + 1; }

  void validate() const;
};

struct DiscreteTrajectory {
  std::vector<Eigen::VectorXd> x;  // N+1 nodes
  std::vector<Eigen::VectorXd> v;  // N-k+1 selections
};

/// Discrete family of dual variables: adjoint grid, state multipliers,
/// endpoint multipliers, and (for polyhedral dynamics) graph-row multipliers.
struct DualCertificate {
  std::vector<Eigen::VectorXd> x_star;  // N+1 nodes
  std::vector<Eigen::VectorXd> v_star;  // N+1 nodes
  Eigen::VectorXd mu0, mu_t;
  std::optional<std::vector<Eigen::VectorXd>> lambda;  // N-k+1 entries, m each
};

/// Row/column layout of the assembled LP, used to map multipliers back.
struct PrimalIndexMap {
  int n = 0, k = 0, big_n = 0;
  double h = 1.0;
  int x_offset = 0, v_offset = 0, u_offset = 0, tau_col = 0;
  int num_vars = 0;
  // equality rows
  int dyn_row = 0;        // (N-k+1)*n rows
  int graph_eq_row = -1;  // linear-control: (N-k+1)*n rows
  // inequality rows
  int epi_row = 0;
  int graph_ub_row = -1;  // polyhedral: (N-k+1)*m rows
  int control_row = -1;   // linear-control: (N-k+1)*|U| rows
  int endpoint_row = 0;   // k * |S| rows
  std::vector<int> state_row;  // per node
};

struct AssembledPrimal {
  LinearProgram lp;
  PrimalIndexMap map;
};

AssembledPrimal assemble_primal_lp(const ProblemSpec& spec);

struct PrimalResult {
  LPStatus status = LPStatus::infeasible;
  DiscreteTrajectory trajectory;
  double value = 0.0;
  LPSolution lp_solution;
};

PrimalResult solve_primal(const ProblemSpec& spec, const SolveOptions& opts = {});

/// Maps the LP multipliers of an optimal transcription onto the discrete dual
/// family. The adjoint value at inclusion node i is carried by grid node i+k;
/// the k leading grid nodes are reconstructed from the endpoint multipliers.
DualCertificate extract_dual_certificate(const ProblemSpec& spec, const LPSolution& sol);

/// The boundary arguments of the dual functional: terminal-cost conjugate
/// arguments p0/pT and the endpoint support-term arguments g0_j/gT_j
/// (j = 0..k-2), determined by the certificate grids through the exact
/// summation-by-parts identities of the discretization.
struct BoundaryArgs {
  Eigen::VectorXd p0, p_t;
  std::vector<Eigen::VectorXd> g0, g_t;
};

BoundaryArgs dual_boundary_args(const ProblemSpec& spec, const DualCertificate& cert);

/// The adjoint inclusion arguments w*_i = (-1)^k (forward k-th difference of
/// x* at i)/h^k - v*_i for i = 0..N-k.
std::vector<Eigen::VectorXd> adjoint_inclusion_terms(const ProblemSpec& spec,
                                                     const DualCertificate& cert);

/// Value of the discrete dual functional at an arbitrary certificate:
///   -f*(p0, pT) + h sum_i M_F(w*_i, x*_{i+k}) - h sum_l W_{X_l}(-v*_l)
///   - W_S(-mu0, -muT) - sum_j W_S(g0_j, gT_j).
/// Any infinite support/conjugate term (or -inf M_F term) yields -inf.
/// Never exceeds the objective of any feasible trajectory.
ExtReal evaluate_dual_functional(const ProblemSpec& spec, const DualCertificate& cert);

/// Structured description of the dual problem for the two special families:
/// third-order linear-control and fourth-order polyhedral dynamics.
struct DualSpecialization {
  std::string kind;  // "third_order_linear" or "fourth_order_polyhedral"
  std::vector<std::string> objective_terms;
  std::vector<std::string> constraints;
};

DualSpecialization specialize_dual(const ProblemSpec& spec);

struct SpecializedValue {
  ExtReal value = ExtReal(0.0);
  double constraint_residual = 0.0;
};

/// Evaluates the specialized dual objective; agrees with the generic dual
/// functional whenever the emitted constraints hold for the certificate.
SpecializedValue evaluate_specialized_dual(const ProblemSpec& spec, const DualCertificate& cert);

/// Max violation of the discrete inclusion, state, endpoint, and derivative
/// consistency constraints for a candidate trajectory.
double trajectory_residual(const ProblemSpec& spec, const DiscreteTrajectory& traj);

double objective_value(const ProblemSpec& spec, const DiscreteTrajectory& traj);

}  // namespace dincl
