#include "dincl/lp.hpp"

#include <functional>
#include <random>
#include <vector>

#include "doctest.h"

using namespace dincl;

namespace {

LinearProgram make_lp(int n) {
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(n);
  return lp;
}

// Independent oracle: enumerate all vertices of {a_ub z <= b_ub} by solving
// every n x n subsystem of active rows, keep the feasible ones, take the best.
// Only for small dense instances with a bounded feasible set.
struct EnumResult {
  bool feasible = false;
  double value = 0.0;
  Eigen::VectorXd z;
};

EnumResult enumerate_optimum(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  EnumResult best;
  std::vector<int> idx(n);
  std::vector<int> comb;
  comb.reserve(n);
  // iterate over all n-subsets of rows
  std::vector<int> stack(n, 0);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd m_act(n, n);
      Eigen::VectorXd rhs(n);
      for (int i = 0; i < n; ++i) {
        m_act.row(i) = a.row(comb[i]);
        rhs(i) = b(comb[i]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(m_act);
      if (!lu.isInvertible()) return;
      Eigen::VectorXd z = lu.solve(rhs);
      if (((a * z - b).array() <= 1e-8).all()) {
        double v = c.dot(z);
        if (!best.feasible || v < best.value) {
          best.feasible = true;
          best.value = v;
          best.z = z;
        }
      }
      return;
    }
    for (int i = start; i <= m - (n - depth); ++i) {
      comb.push_back(i);
      rec(i + 1, depth + 1);
      comb.pop_back();
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST_CASE("single active bound") {
  LinearProgram lp = make_lp(1);
  lp.c << 1.0;
  lp.a_ub.resize(1, 1);
  lp.a_ub << -1.0;
  lp.b_ub.resize(1);
  lp.b_ub << -1.0;  // z >= 1
  LPSolution s = solve_lp(lp);
  REQUIRE(s.status == LPStatus::optimal);
  CHECK(s.z(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.value.value() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(s.y_ub(0) >= -1e-10);
  CHECK(std::abs(s.value.value() - s.dual_objective(lp)) <= 1e-8);
}

TEST_CASE("contradictory bounds are infeasible") {
  LinearProgram lp = make_lp(1);
  lp.c << 1.0;
  lp.a_ub.resize(2, 1);
  lp.a_ub << 1.0, -1.0;
  lp.b_ub.resize(2);
  lp.b_ub << -1.0, 0.0;  // z <= -1 and z >= 0
  CHECK(solve_lp(lp).status == LPStatus::infeasible);
}

TEST_CASE("recession direction is unbounded") {
  LinearProgram lp = make_lp(1);
  lp.c << -1.0;
  lp.a_ub.resize(1, 1);
  lp.a_ub << -1.0;
  lp.b_ub.resize(1);
  lp.b_ub << 0.0;  // z >= 0
  CHECK(solve_lp(lp).status == LPStatus::unbounded);
}

TEST_CASE("dimension mismatch is rejected") {
  LinearProgram lp = make_lp(2);
  lp.a_ub.resize(1, 1);
  lp.a_ub << 1.0;
  lp.b_ub.resize(1);
  lp.b_ub << 0.0;
  CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
}

TEST_CASE("equality rows and variable bounds") {
  // min x + y  s.t.  x + y = 1, 0 <= x <= 10, y >= -2
  LinearProgram lp = make_lp(2);
  lp.c << 1.0, 1.0;
  lp.a_eq.resize(1, 2);
  lp.a_eq << 1.0, 1.0;
  lp.b_eq.resize(1);
  lp.b_eq << 1.0;
  lp.lower.resize(2);
  lp.lower << 0.0, -2.0;
  lp.upper.resize(2);
  lp.upper << 10.0, std::numeric_limits<double>::infinity();
  LPSolution s = solve_lp(lp);
  REQUIRE(s.status == LPStatus::optimal);
  CHECK(s.value.value() == doctest::Approx(1.0));
  KktReport rep = check_kkt(lp, s, 1e-8);
  CHECK(rep.pass);
}

TEST_CASE("kkt reports a constructed perturbation") {
  LinearProgram lp = make_lp(1);
  lp.c << 1.0;
  lp.a_ub.resize(1, 1);
  lp.a_ub << -1.0;
  lp.b_ub.resize(1);
  lp.b_ub << -1.0;
  LPSolution s = solve_lp(lp);
  REQUIRE(s.status == LPStatus::optimal);

  KktReport clean = check_kkt(lp, s, 1e-8);
  CHECK(clean.pass);
  CHECK(clean.worst() <= 1e-10);

  LPSolution bad = s;
  bad.z(0) -= 1e-3;  // now violates z >= 1 by 1e-3
  KktReport rep = check_kkt(lp, bad, 1e-8);
  CHECK(!rep.pass);
  CHECK(rep.feasibility == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("kkt rejects non-optimal input") {
  LinearProgram lp = make_lp(1);
  lp.c << 1.0;
  LPSolution s;
  s.status = LPStatus::infeasible;
  CHECK_THROWS_AS(check_kkt(lp, s, 1e-8), std::invalid_argument);
}

TEST_CASE("random bounded instances match vertex enumeration") {
  std::mt19937 rng(20240517);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    int n = 1 + static_cast<int>(rng() % 3);
    int extra = 2 + static_cast<int>(rng() % 4);
    int m = 2 * n + extra;
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd b(m);
    // box keeps the instance bounded; extra random cuts through it
    for (int i = 0; i < n; ++i) {
      a.row(i).setZero();
      a(i, i) = 1.0;
      b(i) = 2.0 + std::abs(unif(rng));
      a.row(n + i).setZero();
      a(n + i, i) = -1.0;
      b(n + i) = 2.0 + std::abs(unif(rng));
    }
    for (int i = 2 * n; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = unif(rng);
      b(i) = unif(rng) + 1.5;  // keeps the origin feasible
    }
    Eigen::VectorXd c(n);
    for (int j = 0; j < n; ++j) c(j) = unif(rng);

    LinearProgram lp;
    lp.c = c;
    lp.a_ub = a;
    lp.b_ub = b;
    LPSolution s = solve_lp(lp);
    EnumResult ref = enumerate_optimum(a, b, c);
    REQUIRE(ref.feasible);
    REQUIRE(s.status == LPStatus::optimal);
    CHECK(std::abs(s.value.value() - ref.value) <= 1e-8 * (1.0 + std::abs(ref.value)));
    KktReport rep = check_kkt(lp, s, 1e-8);
    CHECK(rep.worst() <= 1e-8);
    CHECK(std::abs(s.value.value() - s.dual_objective(lp)) <= 1e-8);
    ++checked;
  }
  CHECK(checked == 120);
}

TEST_CASE("deterministic across repeated solves") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  LinearProgram lp = make_lp(3);
  for (int j = 0; j < 3; ++j) lp.c(j) = unif(rng);
  lp.a_ub.resize(7, 3);
  lp.b_ub.resize(7);
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 3; ++j) lp.a_ub(i, j) = unif(rng);
    lp.b_ub(i) = 1.0 + std::abs(unif(rng));
  }
  LPSolution s1 = solve_lp(lp);
  LPSolution s2 = solve_lp(lp);
  REQUIRE(s1.status == LPStatus::optimal);
  CHECK(s1.z == s2.z);
  CHECK(s1.y_ub == s2.y_ub);
  CHECK(s1.iterations == s2.iterations);
}

TEST_CASE("iteration limit is an explicit status") {
  LinearProgram lp = make_lp(2);
  lp.c << 1.0, 1.0;
  lp.a_ub.resize(2, 2);
  lp.a_ub << -1.0, 0.0, 0.0, -1.0;
  lp.b_ub.resize(2);
  lp.b_ub << 0.0, 0.0;
  SolveOptions opts;
  opts.max_iterations = 0;
  CHECK(solve_lp(lp, opts).status == LPStatus::iteration_limit);
}

TEST_CASE("extreal arithmetic rejects the indeterminate form") {
  ExtReal a = ExtReal::plus_inf();
  ExtReal b = ExtReal::minus_inf();
  CHECK_THROWS_AS(a + b, std::domain_error);
  CHECK((a + ExtReal(1.0)).is_plus_inf());
  CHECK((b - ExtReal(1.0)).is_minus_inf());
  CHECK(ExtReal(2.0).value() == 2.0);
  CHECK_THROWS_AS(a.value(), std::domain_error);
}
