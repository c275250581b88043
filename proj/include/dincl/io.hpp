#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "dincl/certify.hpp"
#include "dincl/transcription.hpp"

namespace dincl {

inline constexpr const char* kToolVersion = "0.1.0";

/// Thrown on malformed documents; the message names the offending key.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

using Json = nlohmann::ordered_json;

/// Reads a problem document:
///   {order, horizon, grid,
///    dynamics: {type: "linear_control", A, B, U: {A, d}} |
///              {type: "polyhedral", A, E, d},
///    objective: {rows: [{a0, aT, b}]},
///    endpoint_set: {A, d},
///    state_set: {A, d} | {per_node: [{A, d}, ...]}}
ProblemSpec parse_problem_document(const Json& doc);
Json emit_problem_document(const ProblemSpec& spec);

Json emit_trajectory(const DiscreteTrajectory& traj);
DiscreteTrajectory parse_trajectory(const Json& doc, int n, int nodes, int inclusion_nodes);

Json emit_certificate(const DualCertificate& cert);
DualCertificate parse_certificate(const Json& doc, int n, int nodes);

struct SpecializationInfo {
  std::string kind;
  std::vector<std::string> objective_terms;
  std::vector<std::string> constraints;
  double constraint_residual = 0.0;
  double specialized_value = 0.0;  // -inf allowed
};

/// Full machine-readable run report; re-parsing an emitted report reproduces
/// it bit-for-bit.
struct ReportDocument {
  std::string tool_version = kToolVersion;
  std::string status;
  std::optional<double> primal_value;
  std::optional<double> dual_value;  // -inf encoded as the string "-inf"
  std::optional<double> gap;
  std::optional<DiscreteTrajectory> trajectory;
  std::optional<DualCertificate> certificate;
  std::vector<ConditionEntry> verification;
  std::map<std::string, double> tolerances;
  std::string sign_convention;
  std::optional<SpecializationInfo> specialization;
};

Json emit_report(const ReportDocument& report);
ReportDocument parse_report(const Json& doc, int n, int nodes, int inclusion_nodes);

/// One row per verification condition, residuals in scientific notation.
std::string format_report_table(const ReportDocument& report);

}  // namespace dincl
