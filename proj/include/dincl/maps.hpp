#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>

#include "dincl/ext_real.hpp"
#include "dincl/geometry.hpp"

namespace dincl {

/// F(x) = A x + B U with U a nonempty bounded polytope of controls.
struct LinearControlMap {
  Eigen::MatrixXd a;  // n x n
  Eigen::MatrixXd b;  // n x r
  Polytope u;         // controls in R^r

  LinearControlMap() = default;
  LinearControlMap(Eigen::MatrixXd a_in, Eigen::MatrixXd b_in, Polytope u_in);

  int state_dim() const { return static_cast<int>(a.rows()); }
  int control_dim() const { return static_cast<int>(b.cols()); }
};

/// F(x) = {v : A x - E v <= d}; the graph is the polyhedron {(x,v) : Ax - Ev <= d}.
struct PolyhedralMap {
  Eigen::MatrixXd a;  // m x n
  Eigen::MatrixXd e;  // m x n
  Eigen::VectorXd d;  // m

  PolyhedralMap() = default;
  PolyhedralMap(Eigen::MatrixXd a_in, Eigen::MatrixXd e_in, Eigen::VectorXd d_in);

  int state_dim() const { return static_cast<int>(a.cols()); }
  int rows() const { return static_cast<int>(a.rows()); }
};

using SetValuedMap = std::variant<LinearControlMap, PolyhedralMap>;

int state_dim(const SetValuedMap& f);

/// One-norm residual of v against F(x) (feasibility LP); 0 means v in F(x).
double graph_residual(const SetValuedMap& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v);

/// H_F(x, v*) = sup{<v, v*> : v in F(x)}; -inf when F(x) is empty, +inf when
/// the supremum is unattained along a recession direction.
ExtReal hamiltonian(const SetValuedMap& f, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& v_star);

/// One element of the argmaximum set F_A(x; v*) (an LP vertex). Requires the
/// Hamiltonian to be finite.
Eigen::VectorXd argmax_point(const SetValuedMap& f, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& v_star);

/// H_F(x, v*) - <v, v*> for a v in F(x) (checked); zero exactly on the
/// argmaximum set.
ExtReal argmax_residual(const SetValuedMap& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& v_star, double tol = 1e-8);

/// Adjoint map of a linear-control family at a graph point: {A^T v*} when the
/// control realizing v_tilde maximizes <B u, v*> over U, empty otherwise.
std::optional<Eigen::VectorXd> lam_linear(const LinearControlMap& f, const Eigen::VectorXd& v_star,
                                          const Eigen::VectorXd& x_tilde,
                                          const Eigen::VectorXd& v_tilde, double tol = 1e-8);

/// Canonical adjoint-map membership through Hamiltonian monotonicity:
/// x* belongs iff H_F(x, v*) - H_F(x_tilde, v*) <= <x*, x - x_tilde> for all
/// x, decided exactly by one LP over the graph. Requires v_tilde in
/// F_A(x_tilde; v*). Every closed form is validated against this test.
bool lam_membership_via_hamiltonian(const SetValuedMap& f, const Eigen::VectorXd& v_star,
                                    const Eigen::VectorXd& x_tilde, const Eigen::VectorXd& v_tilde,
                                    const Eigen::VectorXd& x_star, double tol = 1e-8);

/// Adjoint-map membership for polyhedral graphs through the multiplier system
///   x* = -A^T lambda, -v* = E^T lambda, lambda >= 0 supported on the rows
/// active at (x_tilde, v_tilde).
bool lam_polyhedral_members(const PolyhedralMap& f, const Eigen::VectorXd& v_star,
                            const Eigen::VectorXd& x_tilde, const Eigen::VectorXd& v_tilde,
                            const Eigen::VectorXd& x_star, double tol = 1e-8);

/// One-norm residual of the polyhedral adjoint multiplier system above.
double lam_polyhedral_residual(const PolyhedralMap& f, const Eigen::VectorXd& v_star,
                               const Eigen::VectorXd& x_tilde, const Eigen::VectorXd& v_tilde,
                               const Eigen::VectorXd& x_star, double active_tol = 1e-7);

/// M_F(x*, v*) = inf{<x, x*> - <v, v*> : (x, v) in gph F}; -inf when the
/// infimum is unbounded below.
ExtReal m_function(const SetValuedMap& f, const Eigen::VectorXd& x_star,
                   const Eigen::VectorXd& v_star);

}  // namespace dincl
