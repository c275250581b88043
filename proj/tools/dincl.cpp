#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "dincl/certify.hpp"
#include "dincl/demos.hpp"
#include "dincl/io.hpp"

namespace {

using dincl::Json;

enum ExitCode : int {
  kOk = 0,
  kInfeasible = 2,
  kUnbounded = 3,
  kParseError = 4,
  kVerificationFailure = 5,
};

struct OutputOptions {
  std::string out_path;
  std::string format = "table";
};

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dincl::ParseError("cannot open file: " + path);
  Json doc;
  try {
    in >> doc;
  } catch (const std::exception& err) {
    throw dincl::ParseError(path + ": " + err.what());
  }
  return doc;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

void deliver(const dincl::ReportDocument& report, const OutputOptions& opts) {
  Json doc = dincl::emit_report(report);
  if (!opts.out_path.empty()) write_file(opts.out_path, doc.dump(2) + "\n");
  if (opts.format == "json")
    std::cout << doc.dump(2) << "\n";
  else
    std::cout << dincl::format_report_table(report);
}

int status_exit(dincl::LPStatus status) {
  switch (status) {
    case dincl::LPStatus::optimal: return kOk;
    case dincl::LPStatus::infeasible: return kInfeasible;
    case dincl::LPStatus::unbounded: return kUnbounded;
    default: return kVerificationFailure;
  }
}

std::map<std::string, double> tolerance_map(const dincl::CertifyOptions& opts) {
  return {{"inclusion", opts.inclusion_tol},
          {"complementarity", opts.complementarity_tol},
          {"weak_duality", opts.weak_duality_tol},
          {"gap", opts.gap_tol}};
}

int run_solve(const std::string& file, const dincl::CertifyOptions& certify_opts,
              const OutputOptions& out) {
  dincl::ProblemSpec spec = dincl::parse_problem_document(load_json(file));
  dincl::PrimalResult res = dincl::solve_primal(spec);
  dincl::ReportDocument report;
  report.status = dincl::to_string(res.status);
  report.tolerances = tolerance_map(certify_opts);
  report.sign_convention = dincl::kSignConventionNote;
  if (res.status == dincl::LPStatus::optimal) {
    report.primal_value = res.value;
    report.trajectory = res.trajectory;
    if (spec.intervals >= 2 * spec.order)
      report.certificate = dincl::extract_dual_certificate(spec, res.lp_solution);
  }
  deliver(report, out);
  return status_exit(res.status);
}

int run_gap(const std::string& file, const dincl::CertifyOptions& certify_opts,
            const OutputOptions& out) {
  dincl::ProblemSpec spec = dincl::parse_problem_document(load_json(file));
  dincl::GapResult gap = dincl::check_gap(spec, certify_opts.gap_tol);
  dincl::ReportDocument report;
  report.status = dincl::to_string(gap.status);
  report.tolerances = tolerance_map(certify_opts);
  report.sign_convention = dincl::kSignConventionNote;
  if (gap.status == dincl::LPStatus::optimal) {
    report.primal_value = gap.primal;
    report.dual_value = gap.dual;
    report.gap = gap.gap;
    dincl::ConditionEntry entry;
    entry.condition = "strong_duality";
    entry.residual = std::abs(gap.gap);
    entry.pass = gap.pass;
    report.verification.push_back(entry);
  }
  deliver(report, out);
  if (gap.status != dincl::LPStatus::optimal) return status_exit(gap.status);
  return gap.pass ? kOk : kVerificationFailure;
}

int run_dual(const std::string& file, const dincl::CertifyOptions& certify_opts,
             const OutputOptions& out) {
  dincl::ProblemSpec spec = dincl::parse_problem_document(load_json(file));
  dincl::PrimalResult res = dincl::solve_primal(spec);
  dincl::ReportDocument report;
  report.status = dincl::to_string(res.status);
  report.tolerances = tolerance_map(certify_opts);
  report.sign_convention = dincl::kSignConventionNote;
  if (res.status == dincl::LPStatus::optimal) {
    dincl::DualCertificate cert = dincl::extract_dual_certificate(spec, res.lp_solution);
    dincl::ExtReal dual = dincl::evaluate_dual_functional(spec, cert);
    report.primal_value = res.value;
    report.dual_value = dual.raw();
    report.gap = res.value - dual.raw();
    report.certificate = cert;
    bool specializable =
        (spec.order == 3 && std::holds_alternative<dincl::LinearControlMap>(spec.dynamics)) ||
        (spec.order == 4 && std::holds_alternative<dincl::PolyhedralMap>(spec.dynamics));
    if (specializable) {
      dincl::DualSpecialization sd = dincl::specialize_dual(spec);
      dincl::SpecializedValue sv = dincl::evaluate_specialized_dual(spec, cert);
      dincl::SpecializationInfo info;
      info.kind = sd.kind;
      info.objective_terms = sd.objective_terms;
      info.constraints = sd.constraints;
      info.constraint_residual = sv.constraint_residual;
      info.specialized_value = sv.value.raw();
      report.specialization = std::move(info);
    }
  }
  deliver(report, out);
  return status_exit(res.status);
}

int run_verify(const std::string& file, const std::string& primal_file,
               const std::string& cert_file, const dincl::CertifyOptions& certify_opts,
               const OutputOptions& out) {
  dincl::ProblemSpec spec = dincl::parse_problem_document(load_json(file));
  const int n = spec.state_dim();
  dincl::DiscreteTrajectory traj = dincl::parse_trajectory(
      load_json(primal_file), n, spec.intervals + 1, spec.num_inclusion_nodes());
  dincl::DualCertificate cert =
      dincl::parse_certificate(load_json(cert_file), n, spec.intervals + 1);

  dincl::ReportDocument report;
  report.tolerances = tolerance_map(certify_opts);
  dincl::VerificationReport ver;
  try {
    ver = dincl::verify_all(spec, traj, cert, certify_opts);
  } catch (const std::invalid_argument& err) {
    report.status = std::string("rejected: ") + err.what();
    report.sign_convention = dincl::kSignConventionNote;
    deliver(report, out);
    return kVerificationFailure;
  }
  report.status = ver.all_pass() ? "verified" : "verification_failed";
  report.primal_value = dincl::objective_value(spec, traj);
  dincl::ExtReal dual = dincl::evaluate_dual_functional(spec, cert);
  report.dual_value = dual.raw();
  report.trajectory = traj;
  report.certificate = cert;
  report.verification = ver.entries;
  report.sign_convention = ver.sign_convention;
  deliver(report, out);
  return ver.all_pass() ? kOk : kVerificationFailure;
}

int run_demo(const std::string& name, const std::string& dir,
             const dincl::CertifyOptions& certify_opts, const OutputOptions& out) {
  dincl::ProblemSpec spec;
  if (name == "decay")
    spec = dincl::decay_problem();
  else if (name == "ptl")
    spec = dincl::third_order_control_problem();
  else if (name == "pfc")
    spec = dincl::fourth_order_polyhedral_problem();
  else
    throw CLI::ValidationError("demo", "unknown demo '" + name + "' (decay, ptl, pfc)");

  std::string prefix = dir.empty() ? name : dir + "/" + name;
  write_file(prefix + "_problem.json", dincl::emit_problem_document(spec).dump(2) + "\n");

  dincl::PrimalResult res = dincl::solve_primal(spec);
  dincl::ReportDocument report;
  report.status = dincl::to_string(res.status);
  report.tolerances = tolerance_map(certify_opts);
  report.sign_convention = dincl::kSignConventionNote;
  if (res.status != dincl::LPStatus::optimal) {
    deliver(report, out);
    return status_exit(res.status);
  }
  dincl::DualCertificate cert = dincl::extract_dual_certificate(spec, res.lp_solution);
  dincl::VerificationReport ver = dincl::verify_all(spec, res.trajectory, cert, certify_opts);
  dincl::ExtReal dual = dincl::evaluate_dual_functional(spec, cert);
  report.status = ver.all_pass() ? "verified" : "verification_failed";
  report.primal_value = res.value;
  report.dual_value = dual.raw();
  report.gap = res.value - dual.raw();
  report.trajectory = res.trajectory;
  report.certificate = cert;
  report.verification = ver.entries;
  report.sign_convention = ver.sign_convention;
  write_file(prefix + "_report.json", dincl::emit_report(report).dump(2) + "\n");
  deliver(report, out);
  return ver.all_pass() ? kOk : kVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver and certifier for k-th order convex differential inclusions"};
  app.require_subcommand(1);

  dincl::CertifyOptions certify_opts;
  OutputOptions out;
  double tol = certify_opts.inclusion_tol;
  app.add_option("--tol", tol,
                 "verification tolerance for inclusion/transversality checks (default 1e-7)");
  app.add_option("--out", out.out_path, "write the JSON report to this path");
  app.add_option("--format", out.format, "stdout format: table (default) or json")
      ->check(CLI::IsMember({"table", "json"}));

  std::string file, primal_file, cert_file, demo_name, demo_dir;

  CLI::App* solve = app.add_subcommand("solve", "solve the transcribed problem");
  solve->add_option("file", file, "problem document")->required();
  CLI::App* gap = app.add_subcommand("gap", "solve and report the duality gap");
  gap->add_option("file", file, "problem document")->required();
  CLI::App* dual = app.add_subcommand("dual", "evaluate the dual functional and specialization");
  dual->add_option("file", file, "problem document")->required();
  CLI::App* verify = app.add_subcommand("verify", "verify a trajectory/certificate pair");
  verify->add_option("file", file, "problem document")->required();
  verify->add_option("primal_file", primal_file, "trajectory document")->required();
  verify->add_option("cert_file", cert_file, "certificate document")->required();
  CLI::App* demo = app.add_subcommand("demo", "write and run a built-in instance");
  demo->add_option("name", demo_name, "one of: decay, ptl, pfc")->required();
  demo->add_option("--dir", demo_dir, "output directory for the generated files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  }

  certify_opts.inclusion_tol = tol;
  try {
    if (*solve) return run_solve(file, certify_opts, out);
    if (*gap) return run_gap(file, certify_opts, out);
    if (*dual) return run_dual(file, certify_opts, out);
    if (*verify) return run_verify(file, primal_file, cert_file, certify_opts, out);
    if (*demo) return run_demo(demo_name, demo_dir, certify_opts, out);
  } catch (const dincl::ParseError& err) {
    std::cerr << "parse error: " << err.what() << "\n";
    return kParseError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kVerificationFailure;
  }
  return kOk;
}
