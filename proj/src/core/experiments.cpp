#include "core/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "core/error.hpp"
#include "core/format.hpp"
#include "core/parallel.hpp"

namespace hesslab {

namespace {

void require_negative(const ScalarField& u) {
  const auto& g = u.grid();
  for (std::size_t idx : g.interior()) {
    if (!(u[idx] < 0.0)) {
      const auto x = g.coords(idx);
      std::string where;
      for (double v : x) where += (where.empty() ? "" : ", ") + fmt(v);
      fail(ErrorKind::data, "u = " + fmt(u[idx]) + " >= 0 at interior point (" + where + ")");
    }
  }
}

template <class Scan>
void locate_max(const ScalarField& u, Scan& s, double& best) {
  const auto& g = u.grid();
  const auto interior = g.interior();
  best = -std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  for (std::size_t t = 0; t < interior.size(); ++t) {
    if (s.values[t] > best) {
      best = s.values[t];
      at = t;
    }
  }
  s.argmax = interior[at];
  s.argmax_x = g.coords(s.argmax);
  s.argmax_strict = g.deep_interior(s.argmax);
}

} // namespace

PogorelovScan pogorelov_scan(const ScalarField& u, double beta) {
  require(std::isfinite(beta) && beta >= 0.0, ErrorKind::argument, "pogorelov_scan: beta must be >= 0");
  require_negative(u);
  const auto interior = u.grid().interior();
  PogorelovScan s;
  s.beta = beta;
  s.values.resize(interior.size());
  for (std::size_t t = 0; t < interior.size(); ++t) {
    const double l1 = eigen_decompose(hessian_at(u, interior[t])).lambda[0];
    s.values[t] = (beta == 0.0 ? 1.0 : std::pow(-u[interior[t]], beta)) * l1;
  }
  locate_max(u, s, s.sup_value);
  return s;
}

TestFunctionField test_function_field(const ScalarField& u, double beta, double B) {
  require(std::isfinite(beta) && std::isfinite(B), ErrorKind::argument, "test_function_field: non-finite parameter");
  require_negative(u);
  const auto& g = u.grid();
  const auto interior = g.interior();
  TestFunctionField f;
  f.beta = beta;
  f.B = B;
  f.values.resize(interior.size());
  for (std::size_t t = 0; t < interior.size(); ++t) {
    const std::size_t idx = interior[t];
    const double l1 = eigen_decompose(hessian_at(u, idx)).lambda[0];
    if (!(l1 > 0.0)) fail(ErrorKind::data, "test_function_field: lambda_1 = " + fmt(l1) + " <= 0");
    double p2 = 0.0;
    for (double v : gradient_at(u, idx)) p2 += v * v;
    f.values[t] = std::log(l1) + beta * std::log(-u[idx]) + 0.5 * B * p2;
  }
  locate_max(u, f, f.max_value);
  return f;
}

void write_pogorelov_csv(std::ostream& os, const ScalarField& u, std::span<const PogorelovScan> scans) {
  const auto& g = u.grid();
  const int n = g.dim();
  for (int i = 1; i <= n; ++i) os << 'x' << i << ',';
  os << "u,lambda_1";
  for (const auto& s : scans) os << ",q_beta" << fmt(s.beta);
  os << '\n';
  const auto interior = g.interior();
  std::vector<double> x(n);
  for (std::size_t t = 0; t < interior.size(); ++t) {
    g.coords(interior[t], x);
    write_joined(os, x);
    os << ',' << fmt(u[interior[t]]) << ',' << fmt(eigen_decompose(hessian_at(u, interior[t])).lambda[0]);
    for (const auto& s : scans) os << ',' << fmt(s.values[t]);
    os << '\n';
  }
}

QuadraticFit quadratic_fit(const ScalarField& u) {
  const auto& g = u.grid();
  const int n = g.dim();
  const auto interior = g.interior();
  const int cols = n * (n + 1) / 2 + n + 1;
  require(static_cast<int>(interior.size()) >= cols, ErrorKind::fit, "quadratic_fit: too few interior points");

  Eigen::MatrixXd X(static_cast<Eigen::Index>(interior.size()), cols);
  Eigen::VectorXd y(static_cast<Eigen::Index>(interior.size()));
  std::vector<double> x(n);
  for (std::size_t t = 0; t < interior.size(); ++t) {
    g.coords(interior[t], x);
    const auto r = static_cast<Eigen::Index>(t);
    int c = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) X(r, c++) = i == j ? 0.5 * x[i] * x[i] : x[i] * x[j];
    for (int i = 0; i < n; ++i) X(r, c++) = x[i];
    X(r, c) = 1.0;
    y[r] = u[interior[t]];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < cols) fail(ErrorKind::fit, "quadratic_fit: rank-deficient design matrix");
  const Eigen::VectorXd coef = qr.solve(y);

  QuadraticFit fit;
  fit.A = SymMatrix(n);
  int c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) fit.A.set(i, j, coef[c++]);
  fit.b.resize(n);
  for (int i = 0; i < n; ++i) fit.b[i] = coef[c++];
  fit.c = coef[c];
  fit.max_residual = (X * coef - y).cwiseAbs().maxCoeff();
  return fit;
}

ProblemSpec rigidity_problem(const RigidityConfig& cfg, double R) {
  ProblemSpec p = radial_problem(cfg.n, R, cfg.points);
  p.solver = cfg.solver;
  p.solver.threads = 1;
  if (cfg.eps != 0.0) {
    p.boundary.kind = BoundaryKind::cubic_perturbation;
    p.boundary.eps = cfg.eps;
    p.boundary.scale = R;
    p.boundary.growth = cfg.growth;
  }
  return p;
}

ScalarField rescale_to_unit_ball(const ScalarField& u, double R, double sup_boundary) {
  const auto& g = u.grid();
  require(g.domain().type == DomainType::ball, ErrorKind::argument, "rescale_to_unit_ball: ball domain required");
  auto unit = std::make_shared<const Grid>(Grid::ball(g.dim(), 1.0, g.shape()[0]));
  std::vector<double> v(u.values().begin(), u.values().end());
  for (std::size_t idx = 0; idx < v.size(); ++idx)
    v[idx] = g.kind(idx) == PointKind::exterior ? 0.0 : (v[idx] - sup_boundary) / (R * R);
  return ScalarField(std::move(unit), std::move(v));
}

namespace {

void fill_statistics(RigidityRow& row, const ScalarField& u, const ProblemSpec& spec) {
  double sup_g = -std::numeric_limits<double>::infinity();
  for (const auto& c : u.grid().closures()) sup_g = std::max(sup_g, spec.boundary(c.crossing));
  const ScalarField v = rescale_to_unit_ball(u, row.R, sup_g);
  const auto& g = v.grid();
  const int n = g.dim();

  std::vector<std::vector<double>> ys;
  std::vector<SymMatrix> hs;
  for (std::size_t idx : g.interior()) {
    auto y = g.coords(idx);
    double r2 = 0.0;
    for (double c : y) r2 += c * c;
    if (r2 > 0.25) continue;
    ys.push_back(std::move(y));
    hs.push_back(hessian_at(v, idx));
  }
  SymMatrix mean(n);
  for (const auto& H : hs) mean += H;
  mean *= 1.0 / static_cast<double>(hs.size());
  row.hessian_center = mean;

  row.deviation = 0.0;
  for (const auto& H : hs) {
    row.deviation = std::max(row.deviation, (H - mean).frobenius());
  }

  // Pairs at separation >= R/4 in x, i.e. >= 1/4 in y; quotient in x units.
  row.holder_proxy = 0.0;
  for (std::size_t a = 0; a < hs.size(); ++a) {
    for (std::size_t b = a + 1; b < hs.size(); ++b) {
      double d2 = 0.0;
      for (int i = 0; i < n; ++i) d2 += (ys[a][i] - ys[b][i]) * (ys[a][i] - ys[b][i]);
      if (d2 < 0.0625) continue;
      row.holder_proxy = std::max(row.holder_proxy, (hs[a] - hs[b]).frobenius() / (row.R * std::sqrt(d2)));
    }
  }

  row.fit_residual = quadratic_fit(v).max_residual;
}

} // namespace

std::vector<RigidityRow> rigidity_experiment(const RigidityConfig& cfg) {
  require(!cfg.radii.empty(), ErrorKind::config, "rigidity: at least one radius required");
  for (std::size_t i = 0; i < cfg.radii.size(); ++i) {
    require(std::isfinite(cfg.radii[i]) && cfg.radii[i] > 0.0, ErrorKind::config, "rigidity: radii must be positive");
    if (i > 0) require(cfg.radii[i] > cfg.radii[i - 1], ErrorKind::config, "rigidity: radii must be increasing");
  }
  require(std::isfinite(cfg.eps) && std::isfinite(cfg.growth), ErrorKind::config, "rigidity: eps and growth must be finite");
  require(cfg.threads >= 1, ErrorKind::config, "rigidity: threads must be >= 1");

  std::vector<RigidityRow> rows(cfg.radii.size());
  parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
    RigidityRow& row = rows[i];
    row.R = cfg.radii[i];
    row.points = cfg.points;
    const ProblemSpec spec = rigidity_problem(cfg, row.R);
    row.h = 2.0 * row.R / (cfg.points - 1);
    row.h_unit = 2.0 / (cfg.points - 1);
    row.fit_bound = 10.0 * row.h_unit * row.h_unit;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.hessian_center = SymMatrix(static_cast<std::size_t>(cfg.n));
    row.deviation = row.holder_proxy = row.fit_residual = nan;
    try {
      SolverState st = newton_solve(spec);
      row.status = st.status;
      row.newton_iter = st.newton_iter;
      row.residual_norm = st.residual_norm;
      row.message = st.message;
      if (st.converged()) fill_statistics(row, st.u, spec);
    } catch (const Error& e) {
      row.status = SolverStatus::linear_solve;
      row.message = e.what();
    }
  });
  return rows;
}

RigidityVerdict rigidity_verdict(std::span<const RigidityRow> rows, double eps) {
  RigidityVerdict v;
  v.all_solved = std::all_of(rows.begin(), rows.end(), [](const RigidityRow& r) { return r.solved(); });
  v.holder_nonincreasing = v.fit_decreasing = v.fit_within_bound = v.all_solved;
  if (v.all_solved) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (!(rows[i].holder_proxy <= rows[i - 1].holder_proxy)) v.holder_nonincreasing = false;
      if (!(rows[i].fit_residual < rows[i - 1].fit_residual)) v.fit_decreasing = false;
    }
    for (const auto& r : rows)
      if (!(r.fit_residual <= r.fit_bound)) v.fit_within_bound = false;
  }
  v.passed = eps == 0.0 ? v.all_solved && v.fit_within_bound
                        : v.all_solved && v.holder_nonincreasing && v.fit_decreasing;
  return v;
}

void write_rigidity_csv(std::ostream& os, std::span<const RigidityRow> rows, double eps) {
  if (rows.empty()) return;
  const std::size_t n = rows.front().hessian_center.dim();
  os << "R,points,h,h_unit,eps,status,newton_iter,residual_norm";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) os << ",H" << i + 1 << j + 1;
  os << ",deviation,holder_proxy,fit_residual,fit_bound\n";
  for (const auto& r : rows) {
    os << fmt(r.R) << ',' << r.points << ',' << fmt(r.h) << ',' << fmt(r.h_unit) << ',' << fmt(eps) << ','
       << to_string(r.status) << ',' << r.newton_iter << ',' << fmt(r.residual_norm);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) os << ',' << fmt(r.hessian_center(i, j));
    os << ',' << fmt(r.deviation) << ',' << fmt(r.holder_proxy) << ',' << fmt(r.fit_residual) << ','
       << fmt(r.fit_bound) << '\n';
  }
}

} // namespace hesslab
