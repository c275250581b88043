#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dincl/io.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using dincl::Json;

namespace {

const fs::path kDir = fs::temp_directory_path() / "dincl_cli_test";

int run(const std::string& args) {
  std::string cmd = std::string(DINCL_CLI_PATH) + " " + args + " > " +
                    (kDir / "stdout.txt").string() + " 2> " + (kDir / "stderr.txt").string();
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

struct Fixture {
  Fixture() {
    fs::create_directories(kDir);
    fs::current_path(kDir);
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "demo pipelines verify and exit cleanly") {
  CHECK(run("demo decay --dir " + kDir.string()) == 0);
  CHECK(run("demo ptl --dir " + kDir.string()) == 0);
  CHECK(run("demo pfc --dir " + kDir.string()) == 0);
  CHECK(fs::exists(kDir / "decay_problem.json"));
  CHECK(fs::exists(kDir / "decay_report.json"));
  CHECK(run("demo unknown") != 0);
}

TEST_CASE_FIXTURE(Fixture, "solve reports the decay value and is byte-stable") {
  REQUIRE(run("demo decay --dir " + kDir.string()) == 0);
  CHECK(run("--format json --out " + (kDir / "r1.json").string() + " solve " +
            (kDir / "decay_problem.json").string()) == 0);
  CHECK(run("--format json --out " + (kDir / "r2.json").string() + " solve " +
            (kDir / "decay_problem.json").string()) == 0);
  CHECK(slurp(kDir / "r1.json") == slurp(kDir / "r2.json"));
  Json report = Json::parse(slurp(kDir / "r1.json"));
  CHECK(std::abs(report["primal_value"].get<double>() - 0.3486784401) <= 1e-9);
}

TEST_CASE_FIXTURE(Fixture, "status exit codes") {
  // infeasible: x(0) pinned outside the state box
  write(kDir / "infeasible.json", R"({
    "order": 1, "horizon": 1.0, "grid": 4,
    "dynamics": {"type": "linear_control", "A": [[0.0]], "B": [[1.0]],
                 "U": {"A": [[1.0], [-1.0]], "d": [1.0, 1.0]}},
    "objective": {"rows": [{"a0": [0.0], "aT": [1.0], "b": 0.0}]},
    "endpoint_set": {"A": [[1.0, 0.0], [-1.0, 0.0]], "d": [10.0, -10.0]},
    "state_set": {"A": [[1.0], [-1.0]], "d": [1.0, 1.0]}
  })");
  CHECK(run("solve " + (kDir / "infeasible.json").string()) == 2);

  // unbounded: free endpoints, terminal value can decrease without limit
  write(kDir / "unbounded.json", R"({
    "order": 1, "horizon": 1.0, "grid": 4,
    "dynamics": {"type": "linear_control", "A": [[0.0]], "B": [[1.0]],
                 "U": {"A": [[1.0], [-1.0]], "d": [1.0, 1.0]}},
    "objective": {"rows": [{"a0": [0.0], "aT": [1.0], "b": 0.0}]},
    "endpoint_set": {"A": [], "d": []},
    "state_set": {"A": [], "d": []}
  })");
  CHECK(run("solve " + (kDir / "unbounded.json").string()) == 3);

  write(kDir / "typo.json", R"({"gird": 4})");
  CHECK(run("solve " + (kDir / "typo.json").string()) == 4);
  CHECK(slurp(kDir / "stderr.txt").find("gird") != std::string::npos);

  CHECK(run("solve " + (kDir / "no_such_file.json").string()) == 4);
}

TEST_CASE_FIXTURE(Fixture, "verify accepts report files and flags sign flips") {
  REQUIRE(run("demo decay --dir " + kDir.string()) == 0);
  std::string problem = (kDir / "decay_problem.json").string();
  std::string report = (kDir / "decay_report.json").string();
  CHECK(run("verify " + problem + " " + report + " " + report) == 0);

  // negate the adjoint grid: transversality (condition c) must fail
  Json doc = Json::parse(slurp(kDir / "decay_report.json"));
  for (auto& node : doc["certificate"]["x_star"])
    for (auto& entry : node) entry = -entry.get<double>();
  write(kDir / "flipped.json", doc.dump());
  CHECK(run("--format json --out " + (kDir / "verify_out.json").string() + " verify " + problem +
            " " + report + " " + (kDir / "flipped.json").string()) == 5);
  Json out = Json::parse(slurp(kDir / "verify_out.json"));
  bool c_failed = false;
  for (const auto& e : out["verification"])
    if (e["condition"] == "c" && e["pass"] == false) c_failed = true;
  CHECK(c_failed);
}

TEST_CASE_FIXTURE(Fixture, "dual emits the fourth-order specialization") {
  REQUIRE(run("demo pfc --dir " + kDir.string()) == 0);
  CHECK(run("--format json --out " + (kDir / "dual_out.json").string() + " dual " +
            (kDir / "pfc_problem.json").string()) == 0);
  Json out = Json::parse(slurp(kDir / "dual_out.json"));
  REQUIRE(!out["specialization"].is_null());
  CHECK(out["specialization"]["kind"] == "fourth_order_polyhedral");
  bool has_multiplier_cost = false;
  for (const auto& term : out["specialization"]["objective_terms"])
    if (term.get<std::string>().find("lambda") != std::string::npos) has_multiplier_cost = true;
  CHECK(has_multiplier_cost);
  CHECK(out["specialization"]["constraint_residual"].get<double>() <= 1e-8);

  // gap subcommand agrees
  CHECK(run("gap " + (kDir / "pfc_problem.json").string()) == 0);
}
