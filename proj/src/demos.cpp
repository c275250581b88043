#include "dincl/demos.hpp"

namespace dincl {

namespace {

MaxAffine terminal_value_objective() {
  Eigen::MatrixXd a(1, 2);
  a << 0.0, 1.0;
  return MaxAffine(a, Eigen::VectorXd::Zero(1));
}

Polytope fix_initial_value(double value) {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, -1.0, 0.0;
  Eigen::VectorXd d(2);
  d << value, -value;
  return Polytope(a, d);
}

}  // namespace

ProblemSpec decay_problem() {
  ProblemSpec spec;
  spec.order = 1;
  spec.horizon = 1.0;
  spec.intervals = 10;
  Eigen::MatrixXd a(1, 1), b(1, 1);
  a << -1.0;
  b << 0.0;
  spec.dynamics = LinearControlMap(a, b, Polytope::box(1, 0.0, 0.0));
  spec.objective = terminal_value_objective();
  spec.endpoint_set = fix_initial_value(1.0);
  spec.state_sets.assign(spec.intervals + 1, Polytope::whole_space(1));
  return spec;
}

ProblemSpec third_order_control_problem(int intervals) {
  ProblemSpec spec;
  spec.order = 3;
  spec.horizon = 1.0;
  spec.intervals = intervals;
  Eigen::MatrixXd a(1, 1), b(1, 1);
  a << 0.0;
  b << 1.0;
  spec.dynamics = LinearControlMap(a, b, Polytope::box(1, -1.0, 1.0));
  spec.objective = terminal_value_objective();
  spec.endpoint_set = fix_initial_value(0.0);
  spec.state_sets.assign(spec.intervals + 1, Polytope::whole_space(1));
  return spec;
}

ProblemSpec fourth_order_polyhedral_problem(int intervals) {
  ProblemSpec spec;
  spec.order = 4;
  spec.horizon = 1.0;
  spec.intervals = intervals;
  Eigen::MatrixXd a(2, 1), e(2, 1);
  a << 0.5, 0.0;
  e << 1.0, -1.0;
  Eigen::VectorXd d(2);
  d << 1.0, 1.0;
  spec.dynamics = PolyhedralMap(a, e, d);
  spec.objective = terminal_value_objective();
  spec.endpoint_set = fix_initial_value(0.0);
  spec.state_sets.assign(spec.intervals + 1, Polytope::box(1, -10.0, 10.0));
  return spec;
}

}  // namespace dincl
