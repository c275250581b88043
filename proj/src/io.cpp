#include "dincl/io.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace dincl {

namespace {

const Json& require_key(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
  return *it;
}

void reject_unknown_keys(const Json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      throw ParseError(where + ": unknown key '" + item.key() + "'");
  }
}

double as_number(const Json& j, const std::string& where) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "+inf" || s == "inf") return std::numeric_limits<double>::infinity();
    throw ParseError(where + ": expected a number");
  }
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

int as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
  return j.get<int>();
}

Eigen::VectorXd as_vector(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(i) = as_number(j[i], where);
  return v;
}

Eigen::MatrixXd as_matrix(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of rows");
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  size_t cols = 0;
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) throw ParseError(where + ": expected rows of numbers");
    if (i == 0) cols = j[i].size();
    if (j[i].size() != cols) throw ParseError(where + ": ragged rows");
  }
  Eigen::MatrixXd m(j.size(), cols);
  for (size_t i = 0; i < j.size(); ++i)
    for (size_t c = 0; c < cols; ++c) m(i, c) = as_number(j[i][c], where);
  return m;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

Json grid_to_json(const std::vector<Eigen::VectorXd>& grid) {
  Json out = Json::array();
  for (const auto& v : grid) out.push_back(vector_to_json(v));
  return out;
}

std::vector<Eigen::VectorXd> as_grid(const Json& j, int dim, int count,
                                     const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != count)
    throw ParseError(where + ": expected " + std::to_string(count) + " entries");
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (const auto& e : j) {
    Eigen::VectorXd v = as_vector(e, where);
    if (v.size() != dim) throw ParseError(where + ": entry dimension mismatch");
    out.push_back(std::move(v));
  }
  return out;
}

Polytope as_polytope(const Json& j, int dim, const std::string& where) {
  reject_unknown_keys(j, {"A", "d"}, where);
  Eigen::MatrixXd a = as_matrix(require_key(j, "A", where), where + ".A");
  Eigen::VectorXd d = as_vector(require_key(j, "d", where), where + ".d");
  if (a.rows() == 0) return Polytope::whole_space(dim);
  if (a.cols() != dim) throw ParseError(where + ".A: expected " + std::to_string(dim) + " columns");
  if (a.rows() != d.size()) throw ParseError(where + ": A and d row counts differ");
  return Polytope(a, d);
}

Json polytope_to_json(const Polytope& p) {
  Json out;
  out["A"] = matrix_to_json(p.a());
  out["d"] = vector_to_json(p.d());
  return out;
}

Json number_to_json(double v) {
  if (std::isfinite(v)) return Json(v);
  return Json(v > 0 ? "+inf" : "-inf");
}

}  // namespace

ProblemSpec parse_problem_document(const Json& doc) {
  reject_unknown_keys(doc, {"order", "horizon", "grid", "dynamics", "objective", "endpoint_set",
                            "state_set"},
                      "problem");
  ProblemSpec spec;
  spec.order = as_int(require_key(doc, "order", "problem"), "problem.order");
  spec.horizon = as_number(require_key(doc, "horizon", "problem"), "problem.horizon");
  spec.intervals = as_int(require_key(doc, "grid", "problem"), "problem.grid");

  const Json& dyn = require_key(doc, "dynamics", "problem");
  std::string type =
      require_key(dyn, "type", "problem.dynamics").get<std::string>();
  int n = 0;
  if (type == "linear_control") {
    reject_unknown_keys(dyn, {"type", "A", "B", "U"}, "problem.dynamics");
    Eigen::MatrixXd a = as_matrix(require_key(dyn, "A", "problem.dynamics"), "problem.dynamics.A");
    Eigen::MatrixXd b = as_matrix(require_key(dyn, "B", "problem.dynamics"), "problem.dynamics.B");
    const Json& uj = require_key(dyn, "U", "problem.dynamics");
    n = static_cast<int>(a.rows());
    if (b.rows() == 0) b = Eigen::MatrixXd::Zero(n, 1);
    Polytope u = as_polytope(uj, static_cast<int>(b.cols()), "problem.dynamics.U");
    try {
      spec.dynamics = LinearControlMap(a, b, u);
    } catch (const std::invalid_argument& err) {
      throw ParseError(std::string("problem.dynamics: ") + err.what());
    }
  } else if (type == "polyhedral") {
    reject_unknown_keys(dyn, {"type", "A", "E", "d"}, "problem.dynamics");
    Eigen::MatrixXd a = as_matrix(require_key(dyn, "A", "problem.dynamics"), "problem.dynamics.A");
    Eigen::MatrixXd e = as_matrix(require_key(dyn, "E", "problem.dynamics"), "problem.dynamics.E");
    Eigen::VectorXd d = as_vector(require_key(dyn, "d", "problem.dynamics"), "problem.dynamics.d");
    n = static_cast<int>(a.cols());
    try {
      spec.dynamics = PolyhedralMap(a, e, d);
    } catch (const std::invalid_argument& err) {
      throw ParseError(std::string("problem.dynamics: ") + err.what());
    }
  } else {
    throw ParseError("problem.dynamics.type: expected 'linear_control' or 'polyhedral'");
  }

  const Json& obj = require_key(doc, "objective", "problem");
  reject_unknown_keys(obj, {"rows"}, "problem.objective");
  const Json& rows = require_key(obj, "rows", "problem.objective");
  if (!rows.is_array() || rows.empty())
    throw ParseError("problem.objective.rows: expected a nonempty array");
  Eigen::MatrixXd fa(rows.size(), 2 * n);
  Eigen::VectorXd fb(rows.size());
  for (size_t l = 0; l < rows.size(); ++l) {
    const std::string where = "problem.objective.rows[" + std::to_string(l) + "]";
    reject_unknown_keys(rows[l], {"a0", "aT", "b"}, where);
    Eigen::VectorXd a0 = as_vector(require_key(rows[l], "a0", where), where + ".a0");
    Eigen::VectorXd at = as_vector(require_key(rows[l], "aT", where), where + ".aT");
    if (a0.size() != n || at.size() != n)
      throw ParseError(where + ": gradient dimension mismatch");
    fa.row(l).head(n) = a0.transpose();
    fa.row(l).tail(n) = at.transpose();
    fb(l) = as_number(require_key(rows[l], "b", where), where + ".b");
  }
  spec.objective = MaxAffine(fa, fb);

  spec.endpoint_set =
      as_polytope(require_key(doc, "endpoint_set", "problem"), 2 * n, "problem.endpoint_set");

  const Json& st = require_key(doc, "state_set", "problem");
  if (st.contains("per_node")) {
    reject_unknown_keys(st, {"per_node"}, "problem.state_set");
    const Json& per = st["per_node"];
    if (!per.is_array() || static_cast<int>(per.size()) != spec.intervals + 1)
      throw ParseError("problem.state_set.per_node: expected grid+1 entries");
    for (size_t l = 0; l < per.size(); ++l)
      spec.state_sets.push_back(
          as_polytope(per[l], n, "problem.state_set.per_node[" + std::to_string(l) + "]"));
  } else {
    Polytope x = as_polytope(st, n, "problem.state_set");
    spec.state_sets.assign(spec.intervals + 1, x);
  }

  try {
    spec.validate();
  } catch (const std::invalid_argument& err) {
    throw ParseError(std::string("problem: ") + err.what());
  }
  return spec;
}

Json emit_problem_document(const ProblemSpec& spec) {
  Json doc;
  doc["order"] = spec.order;
  doc["horizon"] = spec.horizon;
  doc["grid"] = spec.intervals;
  if (const auto* lc = std::get_if<LinearControlMap>(&spec.dynamics)) {
    doc["dynamics"] = {{"type", "linear_control"},
                       {"A", matrix_to_json(lc->a)},
                       {"B", matrix_to_json(lc->b)},
                       {"U", polytope_to_json(lc->u)}};
  } else {
    const auto& pm = std::get<PolyhedralMap>(spec.dynamics);
    doc["dynamics"] = {{"type", "polyhedral"},
                       {"A", matrix_to_json(pm.a)},
                       {"E", matrix_to_json(pm.e)},
                       {"d", vector_to_json(pm.d)}};
  }
  const int n = spec.state_dim();
  Json rows = Json::array();
  for (int l = 0; l < spec.objective.rows(); ++l) {
    rows.push_back({{"a0", vector_to_json(spec.objective.a.row(l).head(n))},
                    {"aT", vector_to_json(spec.objective.a.row(l).tail(n))},
                    {"b", spec.objective.b(l)}});
  }
  doc["objective"] = {{"rows", rows}};
  doc["endpoint_set"] = polytope_to_json(spec.endpoint_set);
  bool constant = true;
  for (const auto& x : spec.state_sets)
    if (x.a() != spec.state_sets.front().a() || x.d() != spec.state_sets.front().d())
      constant = false;
  if (constant) {
    doc["state_set"] = polytope_to_json(spec.state_sets.front());
  } else {
    Json per = Json::array();
    for (const auto& x : spec.state_sets) per.push_back(polytope_to_json(x));
    doc["state_set"] = {{"per_node", per}};
  }
  return doc;
}

Json emit_trajectory(const DiscreteTrajectory& traj) {
  Json out;
  out["x"] = grid_to_json(traj.x);
  out["v"] = grid_to_json(traj.v);
  return out;
}

DiscreteTrajectory parse_trajectory(const Json& doc, int n, int nodes, int inclusion_nodes) {
  const Json& src = doc.contains("trajectory") ? doc["trajectory"] : doc;
  reject_unknown_keys(src, {"x", "v"}, "trajectory");
  DiscreteTrajectory traj;
  traj.x = as_grid(require_key(src, "x", "trajectory"), n, nodes, "trajectory.x");
  traj.v = as_grid(require_key(src, "v", "trajectory"), n, inclusion_nodes, "trajectory.v");
  return traj;
}

Json emit_certificate(const DualCertificate& cert) {
  Json out;
  out["x_star"] = grid_to_json(cert.x_star);
  out["v_star"] = grid_to_json(cert.v_star);
  out["mu0"] = vector_to_json(cert.mu0);
  out["muT"] = vector_to_json(cert.mu_t);
  if (cert.lambda)
    out["lambda"] = grid_to_json(*cert.lambda);
  else
    out["lambda"] = nullptr;
  return out;
}

DualCertificate parse_certificate(const Json& doc, int n, int nodes) {
  const Json& src = doc.contains("certificate") ? doc["certificate"] : doc;
  reject_unknown_keys(src, {"x_star", "v_star", "mu0", "muT", "lambda"}, "certificate");
  DualCertificate cert;
  cert.x_star = as_grid(require_key(src, "x_star", "certificate"), n, nodes, "certificate.x_star");
  cert.v_star = as_grid(require_key(src, "v_star", "certificate"), n, nodes, "certificate.v_star");
  cert.mu0 = as_vector(require_key(src, "mu0", "certificate"), "certificate.mu0");
  cert.mu_t = as_vector(require_key(src, "muT", "certificate"), "certificate.muT");
  if (cert.mu0.size() != n || cert.mu_t.size() != n)
    throw ParseError("certificate: endpoint multiplier dimension mismatch");
  if (src.contains("lambda") && !src["lambda"].is_null()) {
    const Json& lj = src["lambda"];
    if (!lj.is_array()) throw ParseError("certificate.lambda: expected an array");
    std::vector<Eigen::VectorXd> lambda;
    for (const auto& e : lj) lambda.push_back(as_vector(e, "certificate.lambda"));
    cert.lambda = std::move(lambda);
  }
  return cert;
}

Json emit_report(const ReportDocument& report) {
  Json doc;
  doc["tool_version"] = report.tool_version;
  doc["status"] = report.status;
  doc["primal_value"] = report.primal_value ? number_to_json(*report.primal_value) : Json(nullptr);
  doc["dual_value"] = report.dual_value ? number_to_json(*report.dual_value) : Json(nullptr);
  doc["gap"] = report.gap ? number_to_json(*report.gap) : Json(nullptr);
  doc["trajectory"] = report.trajectory ? emit_trajectory(*report.trajectory) : Json(nullptr);
  doc["certificate"] = report.certificate ? emit_certificate(*report.certificate) : Json(nullptr);
  Json ver = Json::array();
  for (const auto& e : report.verification) {
    ver.push_back({{"condition", e.condition},
                   {"residual", number_to_json(e.residual)},
                   {"worst_node", e.worst_node},
                   {"pass", e.pass}});
  }
  doc["verification"] = ver;
  Json tol;
  for (const auto& [key, value] : report.tolerances) tol[key] = value;
  doc["tolerances"] = tol;
  doc["sign_convention"] = report.sign_convention;
  if (report.specialization) {
    const auto& sp = *report.specialization;
    doc["specialization"] = {{"kind", sp.kind},
                             {"objective_terms", sp.objective_terms},
                             {"constraints", sp.constraints},
                             {"constraint_residual", number_to_json(sp.constraint_residual)},
                             {"specialized_value", number_to_json(sp.specialized_value)}};
  } else {
    doc["specialization"] = nullptr;
  }
  return doc;
}

ReportDocument parse_report(const Json& doc, int n, int nodes, int inclusion_nodes) {
  reject_unknown_keys(doc,
                      {"tool_version", "status", "primal_value", "dual_value", "gap", "trajectory",
                       "certificate", "verification", "tolerances", "sign_convention",
                       "specialization"},
                      "report");
  ReportDocument report;
  report.tool_version = require_key(doc, "tool_version", "report").get<std::string>();
  report.status = require_key(doc, "status", "report").get<std::string>();
  if (!doc["primal_value"].is_null())
    report.primal_value = as_number(doc["primal_value"], "report.primal_value");
  if (!doc["dual_value"].is_null())
    report.dual_value = as_number(doc["dual_value"], "report.dual_value");
  if (!doc["gap"].is_null()) report.gap = as_number(doc["gap"], "report.gap");
  if (!doc["trajectory"].is_null())
    report.trajectory = parse_trajectory(doc["trajectory"], n, nodes, inclusion_nodes);
  if (!doc["certificate"].is_null())
    report.certificate = parse_certificate(doc["certificate"], n, nodes);
  for (const auto& e : require_key(doc, "verification", "report")) {
    ConditionEntry entry;
    entry.condition = require_key(e, "condition", "report.verification").get<std::string>();
    entry.residual = as_number(require_key(e, "residual", "report.verification"),
                               "report.verification.residual");
    entry.worst_node = as_int(require_key(e, "worst_node", "report.verification"),
                              "report.verification.worst_node");
    entry.pass = require_key(e, "pass", "report.verification").get<bool>();
    report.verification.push_back(entry);
  }
  for (const auto& item : require_key(doc, "tolerances", "report").items())
    report.tolerances[item.key()] = as_number(item.value(), "report.tolerances");
  report.sign_convention = require_key(doc, "sign_convention", "report").get<std::string>();
  if (doc.contains("specialization") && !doc["specialization"].is_null()) {
    const Json& sp = doc["specialization"];
    SpecializationInfo info;
    info.kind = require_key(sp, "kind", "report.specialization").get<std::string>();
    for (const auto& t : require_key(sp, "objective_terms", "report.specialization"))
      info.objective_terms.push_back(t.get<std::string>());
    for (const auto& t : require_key(sp, "constraints", "report.specialization"))
      info.constraints.push_back(t.get<std::string>());
    info.constraint_residual = as_number(require_key(sp, "constraint_residual",
                                                     "report.specialization"),
                                         "report.specialization.constraint_residual");
    info.specialized_value = as_number(require_key(sp, "specialized_value",
                                                   "report.specialization"),
                                       "report.specialization.specialized_value");
    report.specialization = std::move(info);
  }
  return report;
}

std::string format_report_table(const ReportDocument& report) {
  std::ostringstream os;
  os << "status: " << report.status << "\n";
  auto line = [&](const char* label, const std::optional<double>& v) {
    if (!v) return;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", *v);
    os << label << ": " << buf << "\n";
  };
  line("primal value", report.primal_value);
  line("dual value", report.dual_value);
  line("gap", report.gap);
  if (!report.verification.empty()) {
    os << "condition        residual    node  result\n";
    for (const auto& e : report.verification) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%-15s %10.2e %5d  %s\n", e.condition.c_str(), e.residual,
                    e.worst_node, e.pass ? "pass" : "FAIL");
      os << buf;
    }
  }
  if (report.specialization) {
    const auto& sp = *report.specialization;
    os << "dual specialization: " << sp.kind << "\n";
    for (const auto& t : sp.objective_terms) os << "  term: " << t << "\n";
    for (const auto& t : sp.constraints) os << "  constraint: " << t << "\n";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "  constraint residual: %.2e\n  specialized value: %.10g\n",
                  sp.constraint_residual, sp.specialized_value);
    os << buf;
  }
  return os.str();
}

}  // namespace dincl
