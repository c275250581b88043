#pragma once

#include <string>
#include <vector>

#include "dincl/transcription.hpp"

namespace dincl {

struct ConditionEntry {
  std::string condition;  // a, b, c, d, max_principle, complementarity, weak_duality, strong_duality
  double residual = 0.0;
  int worst_node = -1;
  bool pass = false;
};

/// The convention note carried by every report: which multiplier orientations
/// and grid pairings the checks assume.
extern const char* const kSignConventionNote;

struct VerificationReport {
  std::vector<ConditionEntry> entries;
  std::string sign_convention = kSignConventionNote;

  const ConditionEntry* find(const std::string& condition) const;
  bool all_pass() const;
};

struct CertifyOptions {
  double inclusion_tol = 1e-7;       // adjoint inclusion and transversality
  double complementarity_tol = 1e-8;
  double weak_duality_tol = 1e-7;
  double gap_tol = 1e-6;
  double feasibility_tol = 1e-6;     // trajectory acceptance
};

/// Adjoint inclusion: w*_i = (-1)^k (D^k x*)_i - v*_i must belong to the
/// adjoint map at (x_i, v_i) evaluated at the staggered adjoint value
/// x*_{i+k}, and every v*_l must lie in the dual of the tangent cone of X_l.
ConditionEntry check_euler_lagrange(const ProblemSpec& spec, const DiscreteTrajectory& traj,
                                    const DualCertificate& cert, double tol = 1e-7);

/// Argmaximum condition: each v_i maximizes <., x*_{i+k}> over F(x_i).
ConditionEntry check_argmax(const ProblemSpec& spec, const DiscreteTrajectory& traj,
                            const DualCertificate& cert, double tol = 1e-7);

/// Transversality: (p0, pT) in the subdifferential of the terminal cost at
/// (x_0, x_N) with (mu0, muT) in the dual tangent cone of S (entry "c"), and
/// the order-j boundary arguments in the dual tangent cones of S (entry "d").
std::pair<ConditionEntry, ConditionEntry> check_transversality(const ProblemSpec& spec,
                                                               const DiscreteTrajectory& traj,
                                                               const DualCertificate& cert,
                                                               double tol = 1e-7);

/// Dual value minus primal objective; passes when <= tol.
ConditionEntry check_weak_duality(const ProblemSpec& spec, const DiscreteTrajectory& traj,
                                  const DualCertificate& cert, double tol = 1e-7);

struct GapResult {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  LPStatus status = LPStatus::infeasible;
  bool pass = false;
};

/// Solve, extract, evaluate: the duality gap at the transcription optimum.
GapResult check_gap(const ProblemSpec& spec, double tol = 1e-6, const SolveOptions& opts = {});

/// Pointwise maximum principle for linear-control dynamics:
/// <B u_i, x*_{i+k}> >= W_U(B^T x*_{i+k}) - tol with u_i recovered from v_i.
ConditionEntry check_max_principle(const ProblemSpec& spec, const DiscreteTrajectory& traj,
                                   const DualCertificate& cert, double tol = 1e-7);

/// Polyhedral multiplier conditions: lambda_i >= 0, complementary slackness
/// with the graph rows, and the two adjoint identities
/// x*_{i+k} = -E^T lambda_i and w*_i = -A^T lambda_i.
ConditionEntry check_polyhedral_conditions(const ProblemSpec& spec, const DiscreteTrajectory& traj,
                                           const DualCertificate& cert, double tol = 1e-8);

/// Runs every applicable check and assembles the report (deterministic).
VerificationReport verify_all(const ProblemSpec& spec, const DiscreteTrajectory& traj,
                              const DualCertificate& cert, const CertifyOptions& opts = {});

}  // namespace dincl
