#include "dincl/maps.hpp"

#include <random>

#include "doctest.h"

using namespace dincl;

namespace {

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::MatrixXd mat1(double a) {
  Eigen::MatrixXd m(1, 1);
  m << a;
  return m;
}

LinearControlMap scalar_lc(double a, double b, double ulo, double uhi) {
  return LinearControlMap(mat1(a), mat1(b), Polytope::box(1, ulo, uhi));
}

// F(x) = [x, inf): A = 1, E = 1, d = 0
PolyhedralMap halfline_map() { return PolyhedralMap(mat1(1.0), mat1(1.0), vec1(0.0)); }

struct RandomPolyhedral {
  PolyhedralMap map;
  Eigen::VectorXd x_tilde, v_tilde, v_star;
};

// Random bounded-graph polyhedral map plus an exact argmaximum point:
// |v - R x| <= c componentwise together with a box on x keeps every LP finite.
RandomPolyhedral random_instance(std::mt19937& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  int n = 1 + static_cast<int>(rng() % 2);
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = unif(rng);
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c(i) = 0.5 + std::abs(unif(rng));
  int m = 2 * n + 2 * n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n), e = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd d(m);
  a.topRows(n) = r;
  e.topRows(n) = Eigen::MatrixXd::Identity(n, n);
  d.head(n) = c;  // R x - v <= c
  a.block(n, 0, n, n) = -r;
  e.block(n, 0, n, n) = -Eigen::MatrixXd::Identity(n, n);
  d.segment(n, n) = c;  // v - R x <= c
  a.block(2 * n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
  d.segment(2 * n, n).setConstant(3.0);  // x <= 3
  a.block(3 * n, 0, n, n) = -Eigen::MatrixXd::Identity(n, n);
  d.tail(n).setConstant(3.0);  // x >= -3

  RandomPolyhedral out{PolyhedralMap(a, e, d), Eigen::VectorXd(n), Eigen::VectorXd(n),
                       Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    out.x_tilde(i) = 2.0 * unif(rng);
    out.v_star(i) = unif(rng);
  }
  out.v_tilde = argmax_point(out.map, out.x_tilde, out.v_star);
  return out;
}

}  // namespace

TEST_CASE("hamiltonian fixtures") {
  SetValuedMap f1 = scalar_lc(0.0, 1.0, -1.0, 1.0);
  CHECK(hamiltonian(f1, vec1(5.0), vec1(2.0)).value() == doctest::Approx(2.0));

  LinearControlMap sing(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 1),
                        Polytope::box(1, 0.0, 0.0));
  SetValuedMap f2 = sing;
  CHECK(hamiltonian(f2, vec2(1.0, 2.0), vec2(3.0, 4.0)).value() == doctest::Approx(11.0));

  SetValuedMap f3 = halfline_map();
  CHECK(hamiltonian(f3, vec1(2.0), vec1(-1.0)).value() == doctest::Approx(-2.0));
  CHECK(hamiltonian(f3, vec1(2.0), vec1(1.0)).is_plus_inf());
}

TEST_CASE("argmax point fixtures") {
  SetValuedMap f1 = scalar_lc(0.0, 1.0, -1.0, 1.0);
  CHECK(argmax_point(f1, vec1(0.0), vec1(3.0))(0) == doctest::Approx(1.0));

  SetValuedMap f2 = scalar_lc(2.0, 0.0, 0.0, 0.0);
  CHECK(argmax_point(f2, vec1(1.5), vec1(-7.0))(0) == doctest::Approx(3.0));

  SetValuedMap f3 = halfline_map();
  CHECK(argmax_point(f3, vec1(2.0), vec1(-1.0))(0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(argmax_point(f3, vec1(2.0), vec1(1.0)), std::domain_error);
}

TEST_CASE("argmax residual fixtures and oracle") {
  SetValuedMap f = scalar_lc(0.0, 1.0, -1.0, 1.0);
  CHECK(argmax_residual(f, vec1(0.0), vec1(1.0), vec1(3.0)).value() ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK(argmax_residual(f, vec1(0.0), vec1(0.0), vec1(3.0)).value() == doctest::Approx(3.0));
  CHECK_THROWS_AS(argmax_residual(f, vec1(0.0), vec1(2.0), vec1(3.0)), std::invalid_argument);

  std::mt19937 rng(5);
  for (int t = 0; t < 20; ++t) {
    RandomPolyhedral inst = random_instance(rng);
    SetValuedMap m = inst.map;
    ExtReal res = argmax_residual(m, inst.x_tilde, inst.v_tilde, inst.v_star);
    double h = hamiltonian(m, inst.x_tilde, inst.v_star).value();
    CHECK(res.value() == doctest::Approx(h - inst.v_tilde.dot(inst.v_star)).epsilon(1e-9));
    CHECK(res.value() <= 1e-8);
  }
}

TEST_CASE("linear-control adjoint map fixtures") {
  LinearControlMap f = scalar_lc(0.0, 1.0, -1.0, 1.0);
  auto r1 = lam_linear(f, vec1(2.0), vec1(0.0), vec1(1.0));
  REQUIRE(r1.has_value());
  CHECK((*r1)(0) == doctest::Approx(0.0));

  CHECK(!lam_linear(f, vec1(2.0), vec1(0.0), vec1(0.0)).has_value());

  LinearControlMap g = scalar_lc(2.0, 1.0, -1.0, 1.0);
  CHECK(!lam_linear(g, vec1(-1.0), vec1(1.0), vec1(3.0)).has_value());
  auto r2 = lam_linear(g, vec1(1.0), vec1(1.0), vec1(3.0));
  REQUIRE(r2.has_value());
  CHECK((*r2)(0) == doctest::Approx(2.0));

  CHECK_THROWS_AS(lam_linear(f, vec1(1.0), vec1(0.0), vec1(5.0)), std::invalid_argument);
}

TEST_CASE("linear-control adjoint map agrees with the hamiltonian test") {
  LinearControlMap g = scalar_lc(2.0, 1.0, -1.0, 1.0);
  SetValuedMap f = g;
  // v* = +1: u = 1 maximizes, adjoint value must be exactly A^T v* = 2
  for (double cand = -3.0; cand <= 3.01; cand += 0.25) {
    bool via_h = lam_membership_via_hamiltonian(f, vec1(1.0), vec1(1.0), vec1(3.0), vec1(cand));
    CHECK(via_h == (std::abs(cand - 2.0) <= 1e-9));
  }
}

TEST_CASE("hamiltonian adjoint membership fixtures") {
  SetValuedMap f = halfline_map();
  // H(x, -1) = -x; the only admissible slope is -1
  CHECK(lam_membership_via_hamiltonian(f, vec1(-1.0), vec1(0.0), vec1(0.0), vec1(-1.0)));
  CHECK(!lam_membership_via_hamiltonian(f, vec1(-1.0), vec1(0.0), vec1(0.0), vec1(1.0)));

  // grid oracle: H(x, -1) - H(0, -1) <= x* (x - 0) for all sampled x
  for (double cand : {-1.0, 1.0}) {
    bool ok = true;
    for (int xi = -10; xi <= 10; ++xi) {
      double lhs = -static_cast<double>(xi);  // H(x, -1) = -x
      if (lhs - 0.0 > cand * xi + 1e-12) ok = false;
    }
    CHECK(ok == lam_membership_via_hamiltonian(f, vec1(-1.0), vec1(0.0), vec1(0.0), vec1(cand)));
  }

  SetValuedMap sing = scalar_lc(2.0, 0.0, 0.0, 0.0);
  CHECK(lam_membership_via_hamiltonian(sing, vec1(1.0), vec1(0.7), vec1(1.4), vec1(2.0)));
  CHECK(!lam_membership_via_hamiltonian(sing, vec1(1.0), vec1(0.7), vec1(1.4), vec1(1.0)));
}

TEST_CASE("polyhedral adjoint membership fixtures") {
  PolyhedralMap f = halfline_map();
  CHECK(lam_polyhedral_members(f, vec1(-1.0), vec1(0.0), vec1(0.0), vec1(-1.0)));
  CHECK(!lam_polyhedral_members(f, vec1(-1.0), vec1(0.0), vec1(0.0), vec1(-0.5)));
  // v* = +1 makes the multiplier system infeasible for every x*
  for (double cand = -2.0; cand <= 2.01; cand += 0.5)
    CHECK(!lam_polyhedral_members(f, vec1(1.0), vec1(0.0), vec1(0.0), vec1(cand)));
  // strict interior of the graph: only lambda = 0 satisfies complementarity
  CHECK(lam_polyhedral_members(f, vec1(0.0), vec1(0.0), vec1(5.0), vec1(0.0)));
  CHECK(!lam_polyhedral_members(f, vec1(0.0), vec1(0.0), vec1(5.0), vec1(-1.0)));
  CHECK_THROWS_AS(lam_polyhedral_members(f, vec1(0.0), vec1(0.0), vec1(-1.0), vec1(0.0)),
                  std::invalid_argument);
}

TEST_CASE("adjoint formula agreement on random instances") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  int agreements = 0;
  for (int t = 0; t < 60; ++t) {
    RandomPolyhedral inst = random_instance(rng);
    SetValuedMap m = inst.map;
    const int n = inst.map.state_dim();
    for (int probe = 0; probe < 8; ++probe) {
      Eigen::VectorXd x_star(n);
      if (probe % 2 == 0) {
        // candidate from the multiplier side: -A^T lambda with lambda >= 0 on
        // active rows and v* adjusted to match is hard to hit at random, so
        // probe random directions here and exact members below.
        for (int i = 0; i < n; ++i) x_star(i) = unif(rng);
      } else {
        Eigen::VectorXd slack = inst.map.a * inst.x_tilde - inst.map.e * inst.v_tilde - inst.map.d;
        Eigen::VectorXd lam = Eigen::VectorXd::Zero(inst.map.rows());
        for (int i = 0; i < inst.map.rows(); ++i)
          if (slack(i) > -1e-9) lam(i) = std::abs(unif(rng));
        // consistent candidate only if -v* matches E^T lam; rescale toward it
        x_star = -inst.map.a.transpose() * lam;
      }
      bool via_h =
          lam_membership_via_hamiltonian(m, inst.v_star, inst.x_tilde, inst.v_tilde, x_star);
      bool via_farkas =
          lam_polyhedral_members(inst.map, inst.v_star, inst.x_tilde, inst.v_tilde, x_star);
      CHECK(via_h == via_farkas);
      ++agreements;
    }
  }
  CHECK(agreements == 480);
}

TEST_CASE("adjoint membership is equivalent to m-function tightness") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    RandomPolyhedral inst = random_instance(rng);
    SetValuedMap m = inst.map;
    const int n = inst.map.state_dim();
    double h_tilde = hamiltonian(m, inst.x_tilde, inst.v_star).value();
    for (int probe = 0; probe < 6; ++probe) {
      Eigen::VectorXd x_star(n);
      for (int i = 0; i < n; ++i) x_star(i) = 1.5 * unif(rng);
      bool member =
          lam_membership_via_hamiltonian(m, inst.v_star, inst.x_tilde, inst.v_tilde, x_star);
      ExtReal mf = m_function(m, x_star, inst.v_star);
      bool tight =
          mf.finite() && std::abs(mf.value() - (inst.x_tilde.dot(x_star) - h_tilde)) <= 1e-8;
      CHECK(member == tight);
    }
  }
}

TEST_CASE("m-function fixtures") {
  SetValuedMap f1 = scalar_lc(0.0, 1.0, -1.0, 1.0);
  CHECK(m_function(f1, vec1(0.0), vec1(2.0)).value() == doctest::Approx(-2.0));
  CHECK(m_function(f1, vec1(1.0), vec1(2.0)).is_minus_inf());

  SetValuedMap f2 = halfline_map();
  CHECK(m_function(f2, vec1(-1.0), vec1(-1.0)).value() == doctest::Approx(0.0).epsilon(1e-10));

  SetValuedMap f3 = PolyhedralMap(mat1(1.0), mat1(1.0), vec1(1.0));
  CHECK(m_function(f3, vec1(-1.0), vec1(-1.0)).value() == doctest::Approx(-1.0));
}

TEST_CASE("m-function closed form for linear-control maps") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    int n = 1 + static_cast<int>(rng() % 2);
    int r = 1 + static_cast<int>(rng() % 2);
    Eigen::MatrixXd a(n, n), b(n, r);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = unif(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < r; ++j) b(i, j) = unif(rng);
    LinearControlMap lc(a, b, Polytope::box(r, -1.0, 1.0));
    SetValuedMap f = lc;
    Eigen::VectorXd v_star(n);
    for (int i = 0; i < n; ++i) v_star(i) = unif(rng);

    // matching slot: finite branch with value -W_U(B^T v*)
    Eigen::VectorXd on_branch = a.transpose() * v_star;
    ExtReal m_on = m_function(f, on_branch, v_star);
    double w_u = support(lc.u, Eigen::VectorXd(b.transpose() * v_star)).value();
    REQUIRE(m_on.finite());
    CHECK(m_on.value() == doctest::Approx(-w_u).epsilon(1e-8));

    // any other slot: identically -inf
    Eigen::VectorXd off = on_branch;
    off(0) += 0.3 + std::abs(unif(rng));
    CHECK(m_function(f, off, v_star).is_minus_inf());
  }
}

TEST_CASE("m-function conjugacy against a box grid") {
  // -[-H_F(., v*)]*(x*) evaluated on a coarse grid; on the finite branch the
  // integrand is constant in x so the grid value is exact.
  LinearControlMap lc = scalar_lc(0.7, 1.0, -1.0, 1.0);
  SetValuedMap f = lc;
  Eigen::VectorXd v_star = vec1(0.8);
  Eigen::VectorXd x_star = vec1(0.7 * 0.8);  // A^T v*
  double grid_inf = 1e300;
  for (double x = -50.0; x <= 50.0; x += 0.5) {
    double h = hamiltonian(f, vec1(x), v_star).value();
    grid_inf = std::min(grid_inf, x * x_star(0) - h);
  }
  ExtReal mf = m_function(f, x_star, v_star);
  REQUIRE(mf.finite());
  CHECK(mf.value() == doctest::Approx(grid_inf).epsilon(1e-6));

  ExtReal off = m_function(f, vec1(0.7 * 0.8 + 0.5), v_star);
  CHECK(off.is_minus_inf());
  double grid_off = 1e300;
  for (double x = -50.0; x <= 50.0; x += 0.5) {
    double h = hamiltonian(f, vec1(x), v_star).value();
    grid_off = std::min(grid_off, x * (x_star(0) + 0.5) - h);
  }
  CHECK(grid_off <= -10.0);  // decreasing toward -inf with the box radius
}

TEST_CASE("hamiltonian concavity in x for polyhedral maps") {
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    RandomPolyhedral inst = random_instance(rng);
    SetValuedMap m = inst.map;
    const int n = inst.map.state_dim();
    Eigen::VectorXd x1(n), x2(n);
    for (int i = 0; i < n; ++i) {
      x1(i) = 2.0 * unif(rng);
      x2(i) = 2.0 * unif(rng);
    }
    double lambda = 0.5 * (unif(rng) + 1.0);
    Eigen::VectorXd xm = lambda * x1 + (1.0 - lambda) * x2;
    double h1 = hamiltonian(m, x1, inst.v_star).value();
    double h2 = hamiltonian(m, x2, inst.v_star).value();
    double hm = hamiltonian(m, xm, inst.v_star).value();
    CHECK(hm >= lambda * h1 + (1.0 - lambda) * h2 - 1e-8);
  }
}

TEST_CASE("map constructors validate their data") {
  CHECK_THROWS_AS(LinearControlMap(mat1(1.0), mat1(1.0), Polytope(mat1(1.0), vec1(0.0))),
                  std::invalid_argument);  // unbounded U
  Eigen::MatrixXd a(2, 1);
  a << 1.0, -1.0;
  Eigen::VectorXd d(2);
  d << -1.0, 0.0;
  CHECK_THROWS_AS(PolyhedralMap(a, Eigen::MatrixXd::Zero(2, 1), d),
                  std::invalid_argument);  // empty graph
}
