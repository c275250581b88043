#include "dincl/transcription.hpp"

#include <cmath>
#include <stdexcept>

namespace dincl {

namespace {

Eigen::VectorXd stack2(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

// The finite branches of the support and graph-cost terms are lower
// dimensional cones, so evaluating them at multipliers recovered in floating
// point is a knife edge. Arguments within this distance of the finite branch
// are evaluated at the nearest branch point; the reported value is then the
// exact functional value of a certificate within the tolerance of the input.
constexpr double kBranchTol = 1e-7;

ExtReal tolerant_support(const Polytope& q, const Eigen::VectorXd& s) {
  ExtReal v = support(q, s);
  if (!v.is_plus_inf()) return v;
  ConicFit fit = conic_combination_fit(q.a().transpose(), s, /*simplex=*/false);
  if (fit.residual > kBranchTol) return v;
  return support(q, fit.point);
}

ExtReal tolerant_m_function(const SetValuedMap& f, const Eigen::VectorXd& w,
                            const Eigen::VectorXd& s) {
  ExtReal v = m_function(f, w, s);
  if (!v.is_minus_inf()) return v;
  const int n = state_dim(f);
  if (const auto* lc = std::get_if<LinearControlMap>(&f)) {
    Eigen::VectorXd w_hat = lc->a.transpose() * s;
    if ((w - w_hat).lpNorm<1>() > kBranchTol) return v;
    return m_function(f, w_hat, s);
  }
  const auto& pm = std::get<PolyhedralMap>(f);
  Eigen::MatrixXd gens(2 * n, pm.rows());
  for (int i = 0; i < pm.rows(); ++i) {
    gens.col(i).head(n) = -pm.a.row(i).transpose();
    gens.col(i).tail(n) = -pm.e.row(i).transpose();
  }
  ConicFit fit = conic_combination_fit(gens, stack2(w, s), /*simplex=*/false);
  if (fit.residual > kBranchTol) return v;
  return m_function(f, fit.point.head(n), fit.point.tail(n));
}

void check_cert_dims(const ProblemSpec& spec, const DualCertificate& cert) {
  const int n = spec.state_dim();
  const int big_n = spec.intervals;
  if (static_cast<int>(cert.x_star.size()) != big_n + 1 ||
      static_cast<int>(cert.v_star.size()) != big_n + 1)
    throw std::invalid_argument("certificate: adjoint/state multiplier grids need N+1 nodes");
  for (const auto& v : cert.x_star)
    if (v.size() != n) throw std::invalid_argument("certificate: adjoint dimension mismatch");
  for (const auto& v : cert.v_star)
    if (v.size() != n)
      throw std::invalid_argument("certificate: state multiplier dimension mismatch");
  if (cert.mu0.size() != n || cert.mu_t.size() != n)
    throw std::invalid_argument("certificate: endpoint multiplier dimension mismatch");
}

}  // namespace

double binomial(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double out = 1.0;
  for (int i = 0; i < r; ++i) out = out * (n - i) / (i + 1);
  return std::round(out);
}

double diff_coeff(int j, int s) {
  double c = binomial(j, s);
  return ((j - s) % 2 == 0) ? c : -c;
}

std::vector<Eigen::VectorXd> forward_diff(const std::vector<Eigen::VectorXd>& grid, int j,
                                          double h) {
  const int len = static_cast<int>(grid.size());
  if (j < 0 || len <= j) throw std::invalid_argument("forward_diff: grid too short for the order");
  if (h <= 0.0) throw std::invalid_argument("forward_diff: step must be positive");
  const double scale = std::pow(h, -j);
  std::vector<Eigen::VectorXd> out;
  out.reserve(len - j);
  for (int i = 0; i + j < len; ++i) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(grid[0].size());
    for (int s = 0; s <= j; ++s) acc += diff_coeff(j, s) * grid[i + s];
    out.push_back(acc * scale);
  }
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> endpoint_derivative(
    const std::vector<Eigen::VectorXd>& grid, int j, double h) {
  const int len = static_cast<int>(grid.size());
  if (j < 0 || len <= j) throw std::invalid_argument("endpoint_derivative: grid too short");
  const double scale = std::pow(h, -j);
  Eigen::VectorXd front = Eigen::VectorXd::Zero(grid[0].size());
  Eigen::VectorXd back = Eigen::VectorXd::Zero(grid[0].size());
  for (int s = 0; s <= j; ++s) {
    front += diff_coeff(j, s) * grid[s];
    back += diff_coeff(j, s) * grid[len - 1 - j + s];
  }
  return {front * scale, back * scale};
}

std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> endpoint_derivatives(
    const std::vector<Eigen::VectorXd>& grid, int k, double h) {
  if (static_cast<int>(grid.size()) < k + 1)
    throw std::invalid_argument("endpoint_derivatives: grid too short");
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> out;
  for (int j = 0; j < k; ++j) out.push_back(endpoint_derivative(grid, j, h));
  return out;
}

DifferenceOperator DifferenceOperator::build(int order, int grid_len, int dim, double h) {
  if (grid_len <= order) throw std::invalid_argument("DifferenceOperator: grid too short");
  DifferenceOperator op;
  op.order = order;
  op.grid_len = grid_len;
  op.dim = dim;
  op.h = h;
  const int rows = (grid_len - order) * dim;
  op.matrix = Eigen::MatrixXd::Zero(rows, grid_len * dim);
  const double scale = std::pow(h, -order);
  for (int i = 0; i + order < grid_len; ++i)
    for (int s = 0; s <= order; ++s)
      for (int t = 0; t < dim; ++t)
        op.matrix(i * dim + t, (i + s) * dim + t) = diff_coeff(order, s) * scale;
  return op;
}

void ProblemSpec::validate() const {
  const int n = state_dim();
  if (order < 1) throw std::invalid_argument("problem: order must be at least 1");
  if (horizon <= 0.0) throw std::invalid_argument("problem: horizon must be positive");
  if (intervals < order) throw std::invalid_argument("problem: grid must have at least k intervals");
  if (objective.dim() != 2 * n)
    throw std::invalid_argument("problem: objective must act on endpoint pairs (R^{2n})");
  if (endpoint_set.dim() != 2 * n)
    throw std::invalid_argument("problem: endpoint set must live in R^{2n}");
  if (endpoint_set.is_empty()) throw std::invalid_argument("problem: endpoint set is empty");
  if (static_cast<int>(state_sets.size()) != intervals + 1)
    throw std::invalid_argument("problem: need one state set per node");
  for (const auto& x : state_sets) {
    if (x.dim() != n) throw std::invalid_argument("problem: state set dimension mismatch");
    if (x.is_empty()) throw std::invalid_argument("problem: a state set is empty");
  }
}

AssembledPrimal assemble_primal_lp(const ProblemSpec& spec) {
  spec.validate();
  const int n = spec.state_dim();
  const int k = spec.order;
  const int big_n = spec.intervals;
  const double h = spec.step();
  const int nodes = big_n + 1;
  const int inc = spec.num_inclusion_nodes();  // N-k+1
  const int num_f_rows = spec.objective.rows();
  const auto* lc = std::get_if<LinearControlMap>(&spec.dynamics);
  const auto* pm = std::get_if<PolyhedralMap>(&spec.dynamics);
  const int r = lc ? lc->control_dim() : 0;

  PrimalIndexMap map;
  map.n = n;
  map.k = k;
  map.big_n = big_n;
  map.h = h;
  map.x_offset = 0;
  map.v_offset = nodes * n;
  map.u_offset = map.v_offset + inc * n;
  map.tau_col = map.u_offset + (lc ? inc * r : 0);
  map.num_vars = map.tau_col + 1;

  const int eq_rows = inc * n + (lc ? inc * n : 0);
  map.dyn_row = 0;
  map.graph_eq_row = lc ? inc * n : -1;

  int ms = spec.endpoint_set.rows();
  int ub_rows = num_f_rows + k * ms;
  map.epi_row = 0;
  if (pm) {
    map.graph_ub_row = num_f_rows;
    ub_rows += inc * pm->rows();
    map.endpoint_row = map.graph_ub_row + inc * pm->rows();
  } else {
    map.control_row = num_f_rows;
    ub_rows += inc * lc->u.rows();
    map.endpoint_row = map.control_row + inc * lc->u.rows();
  }
  map.state_row.resize(nodes);
  int cursor = map.endpoint_row + k * ms;
  for (int l = 0; l < nodes; ++l) {
    map.state_row[l] = cursor;
    cursor += spec.state_sets[l].rows();
  }
  ub_rows = cursor;

  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(map.num_vars);
  lp.c(map.tau_col) = 1.0;
  lp.a_eq = Eigen::MatrixXd::Zero(eq_rows, map.num_vars);
  lp.b_eq = Eigen::VectorXd::Zero(eq_rows);
  lp.a_ub = Eigen::MatrixXd::Zero(ub_rows, map.num_vars);
  lp.b_ub = Eigen::VectorXd::Zero(ub_rows);

  auto x_col = [&](int node, int t) { return map.x_offset + node * n + t; };
  auto v_col = [&](int i, int t) { return map.v_offset + i * n + t; };
  auto u_col = [&](int i, int s) { return map.u_offset + i * r + s; };

  // derivative equalities: (forward k-th difference at i)/h^k - v_i = 0
  const double dscale = std::pow(h, -k);
  for (int i = 0; i < inc; ++i) {
    for (int t = 0; t < n; ++t) {
      int row = map.dyn_row + i * n + t;
      for (int s = 0; s <= k; ++s) lp.a_eq(row, x_col(i + s, t)) = diff_coeff(k, s) * dscale;
      lp.a_eq(row, v_col(i, t)) = -1.0;
    }
  }
  // graph constraints per inclusion node
  if (lc) {
    for (int i = 0; i < inc; ++i) {
      for (int t = 0; t < n; ++t) {
        int row = map.graph_eq_row + i * n + t;
        lp.a_eq(row, v_col(i, t)) = 1.0;
        for (int tt = 0; tt < n; ++tt) lp.a_eq(row, x_col(i, tt)) = -lc->a(t, tt);
        for (int s = 0; s < r; ++s) lp.a_eq(row, u_col(i, s)) = -lc->b(t, s);
      }
      for (int c = 0; c < lc->u.rows(); ++c) {
        int row = map.control_row + i * lc->u.rows() + c;
        for (int s = 0; s < r; ++s) lp.a_ub(row, u_col(i, s)) = lc->u.a()(c, s);
        lp.b_ub(row) = lc->u.d()(c);
      }
    }
  } else {
    for (int i = 0; i < inc; ++i) {
      for (int c = 0; c < pm->rows(); ++c) {
        int row = map.graph_ub_row + i * pm->rows() + c;
        for (int t = 0; t < n; ++t) {
          lp.a_ub(row, x_col(i, t)) = pm->a(c, t);
          lp.a_ub(row, v_col(i, t)) = -pm->e(c, t);
        }
        lp.b_ub(row) = pm->d(c);
      }
    }
  }
  // epigraph rows of the terminal cost
  for (int l = 0; l < num_f_rows; ++l) {
    int row = map.epi_row + l;
    for (int t = 0; t < n; ++t) {
      lp.a_ub(row, x_col(0, t)) = spec.objective.a(l, t);
      lp.a_ub(row, x_col(big_n, t)) = spec.objective.a(l, n + t);
    }
    lp.a_ub(row, map.tau_col) = -1.0;
    lp.b_ub(row) = -spec.objective.b(l);
  }
  // endpoint rows: S applied to the order-j endpoint derivative pairs
  const Eigen::MatrixXd s0 = spec.endpoint_set.a().leftCols(n);
  const Eigen::MatrixXd st = spec.endpoint_set.a().rightCols(n);
  for (int j = 0; j < k; ++j) {
    const double jscale = std::pow(h, -j);
    for (int c = 0; c < ms; ++c) {
      int row = map.endpoint_row + j * ms + c;
      for (int s = 0; s <= j; ++s) {
        double w = diff_coeff(j, s) * jscale;
        for (int t = 0; t < n; ++t) {
          lp.a_ub(row, x_col(s, t)) += s0(c, t) * w;
          lp.a_ub(row, x_col(big_n - j + s, t)) += st(c, t) * w;
        }
      }
      lp.b_ub(row) = spec.endpoint_set.d()(c);
    }
  }
  // state rows per node
  for (int l = 0; l < nodes; ++l) {
    const Polytope& xs = spec.state_sets[l];
    for (int c = 0; c < xs.rows(); ++c) {
      int row = map.state_row[l] + c;
      for (int t = 0; t < n; ++t) lp.a_ub(row, x_col(l, t)) = xs.a()(c, t);
      lp.b_ub(row) = xs.d()(c);
    }
  }
  return {std::move(lp), std::move(map)};
}

PrimalResult solve_primal(const ProblemSpec& spec, const SolveOptions& opts) {
  AssembledPrimal ap = assemble_primal_lp(spec);
  PrimalResult out;
  out.lp_solution = solve_lp(ap.lp, opts);
  out.status = out.lp_solution.status;
  if (out.status != LPStatus::optimal) return out;

  const int n = ap.map.n;
  out.trajectory.x.resize(ap.map.big_n + 1);
  for (int l = 0; l <= ap.map.big_n; ++l)
    out.trajectory.x[l] = out.lp_solution.z.segment(ap.map.x_offset + l * n, n);
  out.trajectory.v = forward_diff(out.trajectory.x, spec.order, spec.step());
  out.value = objective_value(spec, out.trajectory);
  return out;
}

DualCertificate extract_dual_certificate(const ProblemSpec& spec, const LPSolution& sol) {
  if (sol.status != LPStatus::optimal)
    throw std::invalid_argument("extract_dual_certificate: solution is not optimal");
  if (spec.intervals < 2 * spec.order)
    throw std::invalid_argument("extract_dual_certificate: needs N >= 2k");
  AssembledPrimal ap = assemble_primal_lp(spec);
  const PrimalIndexMap& map = ap.map;
  const int n = map.n, k = map.k, big_n = map.big_n;
  const double h = map.h;
  const int inc = spec.num_inclusion_nodes();
  const auto* pm = std::get_if<PolyhedralMap>(&spec.dynamics);

  DualCertificate cert;
  cert.x_star.assign(big_n + 1, Eigen::VectorXd::Zero(n));
  cert.v_star.assign(big_n + 1, Eigen::VectorXd::Zero(n));

  // adjoint values from the derivative-equality multipliers, staggered by k
  for (int i = 0; i < inc; ++i)
    cert.x_star[i + k] = sol.y_eq.segment(map.dyn_row + i * n, n) / h;

  // state multipliers
  for (int l = 0; l <= big_n; ++l) {
    const Polytope& xs = spec.state_sets[l];
    if (xs.rows() == 0) continue;
    Eigen::VectorXd eta = sol.y_ub.segment(map.state_row[l], xs.rows());
    cert.v_star[l] = -(xs.a().transpose() * eta) / h;
  }

  // endpoint multipliers (order-0 pair) and the transversality targets
  const int ms = spec.endpoint_set.rows();
  const Eigen::MatrixXd s0 = spec.endpoint_set.a().leftCols(n);
  const Eigen::MatrixXd st = spec.endpoint_set.a().rightCols(n);
  Eigen::VectorXd sigma0 = ms > 0 ? Eigen::VectorXd(sol.y_ub.segment(map.endpoint_row, ms))
                                  : Eigen::VectorXd::Zero(0);
  cert.mu0 = ms > 0 ? Eigen::VectorXd(-s0.transpose() * sigma0) : Eigen::VectorXd::Zero(n);
  cert.mu_t = ms > 0 ? Eigen::VectorXd(-st.transpose() * sigma0) : Eigen::VectorXd::Zero(n);

  Eigen::VectorXd theta = sol.y_ub.segment(map.epi_row, spec.objective.rows());
  Eigen::VectorXd p0_target = spec.objective.a.leftCols(n).transpose() * theta;

  // leading grid nodes from the one-sided difference identities:
  //   (D^j x*)_{k-1-j} = (-1)^j h^j * target_j,
  // with target_j the endpoint support argument of order j and target_{k-1}
  // the conjugate argument minus mu0.
  std::vector<Eigen::VectorXd> targets(k);
  for (int j = 0; j + 1 < k; ++j) {
    Eigen::VectorXd sigma_j =
        ms > 0 ? Eigen::VectorXd(sol.y_ub.segment(map.endpoint_row + (k - 1 - j) * ms, ms))
               : Eigen::VectorXd::Zero(0);
    targets[j] = ms > 0 ? Eigen::VectorXd(s0.transpose() * sigma_j) : Eigen::VectorXd::Zero(n);
  }
  targets[k - 1] = p0_target - cert.mu0;
  for (int j = 0; j < k; ++j) {
    double sgn = (j % 2 == 0) ? 1.0 : -1.0;
    Eigen::VectorXd rhs = sgn * std::pow(h, j) * targets[j];
    for (int s = 1; s <= j; ++s) rhs -= diff_coeff(j, s) * cert.x_star[k - 1 - j + s];
    cert.x_star[k - 1 - j] = sgn * rhs;
  }

  if (pm) {
    std::vector<Eigen::VectorXd> lambda(inc);
    for (int i = 0; i < inc; ++i)
      lambda[i] = sol.y_ub.segment(map.graph_ub_row + i * pm->rows(), pm->rows()) / h;
    cert.lambda = std::move(lambda);
  }
  return cert;
}

std::vector<Eigen::VectorXd> adjoint_inclusion_terms(const ProblemSpec& spec,
                                                     const DualCertificate& cert) {
  check_cert_dims(spec, cert);
  const int k = spec.order;
  const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
  std::vector<Eigen::VectorXd> diffs = forward_diff(cert.x_star, k, spec.step());
  for (int i = 0; i < static_cast<int>(diffs.size()); ++i)
    diffs[i] = sgn * diffs[i] - cert.v_star[i];
  return diffs;
}

BoundaryArgs dual_boundary_args(const ProblemSpec& spec, const DualCertificate& cert) {
  check_cert_dims(spec, cert);
  const int n = spec.state_dim();
  const int k = spec.order;
  const int big_n = spec.intervals;
  const double h = spec.step();
  if (big_n < 2 * k)
    throw std::invalid_argument("dual_boundary_args: needs N >= 2k");

  BoundaryArgs args;
  args.g0.resize(k - 1 > 0 ? k - 1 : 0);
  args.g_t.resize(k - 1 > 0 ? k - 1 : 0);

  // left end: one-sided differences with stencils ending at node k-1
  for (int j = 0; j + 1 < k; ++j) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    for (int s = 0; s <= j; ++s) acc += diff_coeff(j, s) * cert.x_star[k - 1 - j + s];
    double sgn = (j % 2 == 0) ? 1.0 : -1.0;
    args.g0[j] = sgn * acc / std::pow(h, j);
  }
  {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    for (int s = 0; s <= k - 1; ++s) acc += diff_coeff(k - 1, s) * cert.x_star[s];
    double sgn = ((k - 1) % 2 == 0) ? 1.0 : -1.0;
    args.p0 = cert.mu0 + sgn * acc / std::pow(h, k - 1);
  }

  // right end: the k trailing summation-by-parts identities, solved as one
  // lower-triangular system for gT_0..gT_{k-2} and pT.
  const double kscale = std::pow(h, -k);
  Eigen::MatrixXd m_tail = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd rhs(k, n);
  for (int row = 0; row < k; ++row) {
    int node = big_n - k + 1 + row;
    Eigen::VectorXd dtz = Eigen::VectorXd::Zero(n);
    for (int s = node - big_n + k; s <= k; ++s)
      dtz += diff_coeff(k, s) * cert.x_star[node + k - s];
    rhs.row(row) = (-h * kscale * dtz + h * cert.v_star[node]).transpose();
    for (int j = 0; j <= row && j + 1 < k; ++j)
      m_tail(row, j) = diff_coeff(k - j - 1, row - j) / std::pow(h, k - j - 1);
    if (row == k - 1) m_tail(row, k - 1) = 1.0;
  }
  Eigen::MatrixXd sol = m_tail.partialPivLu().solve(rhs);
  for (int j = 0; j + 1 < k; ++j) args.g_t[j] = sol.row(j).transpose();
  args.p_t = cert.mu_t + sol.row(k - 1).transpose();
  return args;
}

ExtReal evaluate_dual_functional(const ProblemSpec& spec, const DualCertificate& cert) {
  spec.validate();
  check_cert_dims(spec, cert);
  const int k = spec.order;
  const int big_n = spec.intervals;
  const double h = spec.step();
  if (big_n < 2 * k)
    throw std::invalid_argument("evaluate_dual_functional: needs N >= 2k");

  BoundaryArgs args = dual_boundary_args(spec, cert);

  ExtReal conj = conjugate_eval(spec.objective, stack2(args.p0, args.p_t));
  if (conj.is_plus_inf()) return ExtReal::minus_inf();
  double total = -conj.value();

  std::vector<Eigen::VectorXd> w = adjoint_inclusion_terms(spec, cert);
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    ExtReal m = tolerant_m_function(spec.dynamics, w[i], cert.x_star[i + k]);
    if (m.is_minus_inf()) return ExtReal::minus_inf();
    if (m.is_plus_inf()) throw std::runtime_error("evaluate_dual_functional: empty graph");
    total += h * m.value();
  }
  for (int l = 0; l <= big_n; ++l) {
    ExtReal ws = tolerant_support(spec.state_sets[l], Eigen::VectorXd(-cert.v_star[l]));
    if (ws.is_plus_inf()) return ExtReal::minus_inf();
    total -= h * ws.value();
  }
  ExtReal ws0 = tolerant_support(spec.endpoint_set, stack2(Eigen::VectorXd(-cert.mu0),
                                                           Eigen::VectorXd(-cert.mu_t)));
  if (ws0.is_plus_inf()) return ExtReal::minus_inf();
  total -= ws0.value();
  for (int j = 0; j + 1 < k; ++j) {
    ExtReal wsj = tolerant_support(spec.endpoint_set, stack2(args.g0[j], args.g_t[j]));
    if (wsj.is_plus_inf()) return ExtReal::minus_inf();
    total -= wsj.value();
  }
  return ExtReal(total);
}

DualSpecialization specialize_dual(const ProblemSpec& spec) {
  spec.validate();
  const auto* lc = std::get_if<LinearControlMap>(&spec.dynamics);
  const auto* pm = std::get_if<PolyhedralMap>(&spec.dynamics);
  DualSpecialization out;
  if (lc && spec.order == 3) {
    out.kind = "third_order_linear";
    out.objective_terms = {
        "-f*(p0, pT)",
        "-h * sum_i W_U(B^T xstar_{i+3})",
        "-h * sum_l W_X_l(-vstar_l)",
        "-W_S(-mu0, -muT)",
        "-sum_{j=0,1} W_S(g0_j, gT_j)",
    };
    out.constraints = {
        "-(D3 xstar)_i / h^3 - vstar_i = A^T xstar_{i+3}   for i = 0..N-3",
        "<B u_i, xstar_{i+3}> = W_U(B^T xstar_{i+3})        (maximum principle)",
    };
    return out;
  }
  if (pm && spec.order == 4) {
    out.kind = "fourth_order_polyhedral";
    out.objective_terms = {
        "-f*(p0, pT)",
        "-h * sum_i <d, lambda_i>",
        "-h * sum_l W_X_l(-vstar_l)",
        "-W_S(-mu0, -muT)",
        "-sum_{j=0,1,2} W_S(g0_j, gT_j)",
    };
    out.constraints = {
        "xstar_{i+4} = -E^T lambda_i                        for i = 0..N-4",
        "(D4 xstar)_i / h^4 - vstar_i = -A^T lambda_i       for i = 0..N-4",
        "lambda_i >= 0",
    };
    return out;
  }
  throw std::invalid_argument(
      "specialize_dual: needs third-order linear-control or fourth-order polyhedral dynamics");
}

SpecializedValue evaluate_specialized_dual(const ProblemSpec& spec, const DualCertificate& cert) {
  DualSpecialization kind = specialize_dual(spec);
  check_cert_dims(spec, cert);
  const int k = spec.order;
  const double h = spec.step();
  const int inc = spec.num_inclusion_nodes();

  BoundaryArgs args = dual_boundary_args(spec, cert);
  std::vector<Eigen::VectorXd> w = adjoint_inclusion_terms(spec, cert);

  SpecializedValue out;
  ExtReal conj = conjugate_eval(spec.objective, stack2(args.p0, args.p_t));
  double total = conj.is_plus_inf() ? 0.0 : -conj.value();
  bool finite = !conj.is_plus_inf();

  if (kind.kind == "third_order_linear") {
    const auto& lc = std::get<LinearControlMap>(spec.dynamics);
    for (int i = 0; i < inc; ++i) {
      out.constraint_residual =
          std::max(out.constraint_residual,
                   (w[i] - lc.a.transpose() * cert.x_star[i + k]).lpNorm<Eigen::Infinity>());
      ExtReal wu = support(lc.u, Eigen::VectorXd(lc.b.transpose() * cert.x_star[i + k]));
      if (!wu.finite()) throw std::runtime_error("specialized dual: unbounded control support");
      total -= h * wu.value();
    }
  } else {
    const auto& pm = std::get<PolyhedralMap>(spec.dynamics);
    if (!cert.lambda)
      throw std::invalid_argument("specialized dual: polyhedral multipliers missing");
    const auto& lambda = *cert.lambda;
    if (static_cast<int>(lambda.size()) != inc)
      throw std::invalid_argument("specialized dual: wrong multiplier count");
    for (int i = 0; i < inc; ++i) {
      out.constraint_residual = std::max(
          out.constraint_residual,
          (cert.x_star[i + k] + pm.e.transpose() * lambda[i]).lpNorm<Eigen::Infinity>());
      out.constraint_residual =
          std::max(out.constraint_residual,
                   (w[i] + pm.a.transpose() * lambda[i]).lpNorm<Eigen::Infinity>());
      if (lambda[i].size() > 0)
        out.constraint_residual = std::max(out.constraint_residual, -lambda[i].minCoeff());
      total -= h * pm.d.dot(lambda[i]);
    }
  }

  for (int l = 0; l <= spec.intervals; ++l) {
    ExtReal ws = tolerant_support(spec.state_sets[l], Eigen::VectorXd(-cert.v_star[l]));
    if (ws.is_plus_inf()) finite = false;
    else total -= h * ws.value();
  }
  ExtReal ws0 = tolerant_support(spec.endpoint_set,
                                 stack2(Eigen::VectorXd(-cert.mu0), Eigen::VectorXd(-cert.mu_t)));
  if (ws0.is_plus_inf()) finite = false;
  else total -= ws0.value();
  for (int j = 0; j + 1 < k; ++j) {
    ExtReal wsj = tolerant_support(spec.endpoint_set, stack2(args.g0[j], args.g_t[j]));
    if (wsj.is_plus_inf()) finite = false;
    else total -= wsj.value();
  }
  out.value = finite ? ExtReal(total) : ExtReal::minus_inf();
  return out;
}

double trajectory_residual(const ProblemSpec& spec, const DiscreteTrajectory& traj) {
  spec.validate();
  const int big_n = spec.intervals;
  const int inc = spec.num_inclusion_nodes();
  if (static_cast<int>(traj.x.size()) != big_n + 1 || static_cast<int>(traj.v.size()) != inc)
    throw std::invalid_argument("trajectory_residual: wrong grid sizes");

  double worst = 0.0;
  std::vector<Eigen::VectorXd> diffs = forward_diff(traj.x, spec.order, spec.step());
  for (int i = 0; i < inc; ++i) {
    worst = std::max(worst, (traj.v[i] - diffs[i]).lpNorm<Eigen::Infinity>());
    worst = std::max(worst, graph_residual(spec.dynamics, traj.x[i], traj.v[i]));
  }
  for (int l = 0; l <= big_n; ++l) {
    const Polytope& xs = spec.state_sets[l];
    if (xs.rows() > 0)
      worst = std::max(worst, (xs.a() * traj.x[l] - xs.d()).maxCoeff());
  }
  auto pairs = endpoint_derivatives(traj.x, spec.order, spec.step());
  for (const auto& [front, back] : pairs) {
    if (spec.endpoint_set.rows() > 0)
      worst = std::max(
          worst,
          (spec.endpoint_set.a() * stack2(front, back) - spec.endpoint_set.d()).maxCoeff());
  }
  return std::max(worst, 0.0);
}

double objective_value(const ProblemSpec& spec, const DiscreteTrajectory& traj) {
  return evaluate(spec.objective, stack2(traj.x.front(), traj.x.back()));
}

}  // namespace dincl
