#include "dincl/io.hpp"

#include "dincl/demos.hpp"
#include "doctest.h"

using namespace dincl;

namespace {

Json decay_doc() {
  return Json::parse(R"({
    "order": 1,
    "horizon": 1.0,
    "grid": 10,
    "dynamics": {"type": "linear_control", "A": [[-1.0]], "B": [[0.0]],
                 "U": {"A": [[1.0], [-1.0]], "d": [0.0, 0.0]}},
    "objective": {"rows": [{"a0": [0.0], "aT": [1.0], "b": 0.0}]},
    "endpoint_set": {"A": [[1.0, 0.0], [-1.0, 0.0]], "d": [1.0, -1.0]},
    "state_set": {"A": [], "d": []}
  })");
}

}  // namespace

TEST_CASE("problem documents parse and solve") {
  ProblemSpec spec = parse_problem_document(decay_doc());
  PrimalResult res = solve_primal(spec);
  REQUIRE(res.status == LPStatus::optimal);
  CHECK(res.value == doctest::Approx(0.3486784401).epsilon(1e-9));
}

TEST_CASE("problem documents round-trip through emit") {
  for (int which = 0; which < 3; ++which) {
    ProblemSpec spec = which == 0   ? decay_problem()
                       : which == 1 ? third_order_control_problem(8)
                                    : fourth_order_polyhedral_problem(10);
    Json doc = emit_problem_document(spec);
    ProblemSpec back = parse_problem_document(doc);
    CHECK(emit_problem_document(back) == doc);
  }
}

TEST_CASE("parse errors name the offending key") {
  Json doc = decay_doc();
  doc.erase("grid");
  doc["gird"] = 10;
  try {
    parse_problem_document(doc);
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(std::string(err.what()).find("gird") != std::string::npos);
  }

  Json missing = decay_doc();
  missing.erase("dynamics");
  try {
    parse_problem_document(missing);
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(std::string(err.what()).find("dynamics") != std::string::npos);
  }

  Json bad_type = decay_doc();
  bad_type["dynamics"]["type"] = "nonlinear";
  CHECK_THROWS_AS(parse_problem_document(bad_type), ParseError);
}

TEST_CASE("per-node state sets parse") {
  Json doc = decay_doc();
  Json per = Json::array();
  for (int l = 0; l <= 10; ++l)
    per.push_back(Json{{"A", Json::array({Json::array({1.0}), Json::array({-1.0})})},
                       {"d", Json::array({2.0 + l, 2.0 + l})}});
  doc["state_set"] = Json{{"per_node", per}};
  ProblemSpec spec = parse_problem_document(doc);
  CHECK(spec.state_sets[3].d()(0) == doctest::Approx(5.0));
  PrimalResult res = solve_primal(spec);
  CHECK(res.status == LPStatus::optimal);
}

TEST_CASE("report documents round-trip bit-for-bit") {
  ProblemSpec spec = fourth_order_polyhedral_problem(10);
  PrimalResult res = solve_primal(spec);
  REQUIRE(res.status == LPStatus::optimal);
  DualCertificate cert = extract_dual_certificate(spec, res.lp_solution);
  VerificationReport ver = verify_all(spec, res.trajectory, cert);

  ReportDocument report;
  report.status = "verified";
  report.primal_value = res.value;
  report.dual_value = evaluate_dual_functional(spec, cert).raw();
  report.gap = *report.primal_value - *report.dual_value;
  report.trajectory = res.trajectory;
  report.certificate = cert;
  report.verification = ver.entries;
  report.tolerances = {{"inclusion", 1e-7}, {"gap", 1e-6}};
  report.sign_convention = ver.sign_convention;

  Json emitted = emit_report(report);
  ReportDocument parsed = parse_report(emitted, spec.state_dim(), spec.intervals + 1,
                                       spec.num_inclusion_nodes());
  CHECK(emit_report(parsed) == emitted);

  // re-verification of the parsed pair reproduces the pass/fail outcomes
  VerificationReport again = verify_all(spec, *parsed.trajectory, *parsed.certificate);
  REQUIRE(again.entries.size() == ver.entries.size());
  for (size_t i = 0; i < again.entries.size(); ++i)
    CHECK(again.entries[i].pass == ver.entries[i].pass);
}

TEST_CASE("infinite dual values survive the round trip") {
  ReportDocument report;
  report.status = "optimal";
  report.dual_value = -std::numeric_limits<double>::infinity();
  report.sign_convention = "none";
  Json emitted = emit_report(report);
  CHECK(emitted["dual_value"] == Json("-inf"));
  ReportDocument parsed = parse_report(emitted, 1, 2, 2);
  CHECK(std::isinf(*parsed.dual_value));
  CHECK(emit_report(parsed) == emitted);
}

TEST_CASE("trajectory and certificate documents validate dimensions") {
  ProblemSpec spec = decay_problem();
  PrimalResult res = solve_primal(spec);
  DualCertificate cert = extract_dual_certificate(spec, res.lp_solution);
  Json traj_doc = emit_trajectory(res.trajectory);
  Json cert_doc = emit_certificate(cert);
  DiscreteTrajectory traj2 = parse_trajectory(traj_doc, 1, 11, 10);
  DualCertificate cert2 = parse_certificate(cert_doc, 1, 11);
  CHECK(trajectory_residual(spec, traj2) <= 1e-9);
  CHECK(cert2.x_star[5](0) == cert.x_star[5](0));

  CHECK_THROWS_AS(parse_trajectory(traj_doc, 2, 11, 10), ParseError);
  CHECK_THROWS_AS(parse_certificate(cert_doc, 1, 12), ParseError);
}

TEST_CASE("table format lists one row per condition in scientific notation") {
  ReportDocument report;
  report.status = "verified";
  report.primal_value = 0.5;
  ConditionEntry e;
  e.condition = "a";
  e.residual = 1.234e-9;
  e.worst_node = 2;
  e.pass = true;
  report.verification.push_back(e);
  std::string table = format_report_table(report);
  CHECK(table.find("1.23e-09") != std::string::npos);
  CHECK(table.find("pass") != std::string::npos);
}
