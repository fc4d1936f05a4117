#include "core/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace hesslab {

const char* to_string(SolverStatus s) noexcept {
  switch (s) {
  case SolverStatus::converged: return "converged";
  case SolverStatus::admissibility_barrier: return "admissibility_barrier";
  case SolverStatus::linear_solve: return "linear_solve";
  case SolverStatus::max_iterations: return "max_iterations";
  case SolverStatus::inadmissible_start: return "inadmissible_start";
  }
  return "unknown";
}

namespace {

struct PointState {
  EigenSystem eig;
  std::vector<double> grad;
  bool admissible = false;
};

PointState point_state(const ScalarField& u, std::size_t idx, int k) {
  PointState s{eigen_decompose(hessian_at(u, idx)), gradient_at(u, idx), false};
  s.admissible = in_cone(s.eig.lambda.values(), k);
  return s;
}

} // namespace

Residual residual(const ScalarField& u, const ProblemSpec& spec) {
  const auto& g = u.grid();
  const auto interior = g.interior();
  const int k = spec.k();
  Residual r;
  r.values.resize(interior.size());
  r.admissible.resize(interior.size());
  parallel_for(interior.size(), spec.solver.threads, [&](std::size_t t) {
    const std::size_t idx = interior[t];
    const auto s = point_state(u, idx, k);
    std::array<double, 4> x{};
    g.coords(idx, std::span<double>(x.data(), g.dim()));
    const double psi = spec.psi(std::span<const double>(x.data(), g.dim()), u[idx], s.grad);
    r.values[t] = sigma(s.eig.lambda, k) - psi;
    r.admissible[t] = s.admissible;
  });
  for (std::size_t t = 0; t < interior.size(); ++t) {
    r.max_norm = std::max(r.max_norm, std::abs(r.values[t]));
    if (!r.admissible[t]) ++r.inadmissible;
  }
  return r;
}

void apply_boundary(ScalarField& u, const ProblemSpec& spec) {
  for (const auto& c : u.grid().closures()) {
    const double gv = spec.boundary(c.crossing);
    u[c.point] = c.w == 0.0 ? gv : (1.0 - c.w) * gv + c.w * u[c.partner];
  }
}

namespace {

// Stencil weights of the linearized operator at one interior point, as
// (grid index, coefficient) pairs.
struct Stencil {
  std::vector<std::pair<std::size_t, double>> terms;
};

Stencil linear_stencil(const ScalarField& u, const ProblemSpec& spec, std::size_t idx) {
  const auto& g = u.grid();
  const int n = g.dim();
  const int k = spec.k();
  const auto s = point_state(u, idx, k);
  require(s.admissible, ErrorKind::precondition, "linearization at an inadmissible point");
  const SymMatrix Fij = F_gradient_matrix(s.eig, k);

  std::array<double, 4> x{};
  g.coords(idx, std::span<double>(x.data(), n));
  const auto pv = spec.psi.eval(std::span<const double>(x.data(), n), u[idx], s.grad);

  const double h = g.h(), h2 = h * h;
  Stencil st;
  st.terms.reserve(1 + 2 * n + 2 * n * (n - 1));
  double center = -pv.du;
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::ptrdiff_t>(g.stride(i));
    const double fii = Fij(i, i) / h2;
    center -= 2.0 * fii;
    const double gi = pv.dgrad[i] / (2.0 * h);
    st.terms.emplace_back(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + si), fii - gi);
    st.terms.emplace_back(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) - si), fii + gi);
    for (int j = i + 1; j < n; ++j) {
      const auto sj = static_cast<std::ptrdiff_t>(g.stride(j));
      const double fij = Fij(i, j) / (2.0 * h2);
      if (fij == 0.0) continue;
      const auto base = static_cast<std::ptrdiff_t>(idx);
      st.terms.emplace_back(static_cast<std::size_t>(base + si + sj), fij);
      st.terms.emplace_back(static_cast<std::size_t>(base - si - sj), fij);
      st.terms.emplace_back(static_cast<std::size_t>(base + si - sj), -fij);
      st.terms.emplace_back(static_cast<std::size_t>(base - si + sj), -fij);
    }
  }
  st.terms.emplace_back(idx, center);
  return st;
}

using SparseRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Jacobian with respect to the interior unknowns; boundary values enter
// through their closures u(b) = (1 - w) g + w u(partner).
SparseRM assemble_jacobian(const ScalarField& u, const ProblemSpec& spec) {
  const auto& g = u.grid();
  const auto interior = g.interior();
  std::vector<Stencil> stencils(interior.size());
  parallel_for(interior.size(), spec.solver.threads,
               [&](std::size_t t) { stencils[t] = linear_stencil(u, spec, interior[t]); });

  std::vector<double> closure_w(g.size(), 0.0);
  std::vector<std::size_t> closure_partner(g.size(), Grid::npos);
  for (const auto& c : g.closures()) {
    closure_w[c.point] = c.w;
    closure_partner[c.point] = c.partner;
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(interior.size() * 20);
  for (std::size_t t = 0; t < interior.size(); ++t) {
    for (const auto& [j, coef] : stencils[t].terms) {
      const auto col = g.unknown(j);
      if (col != Grid::npos) {
        triplets.emplace_back(static_cast<int>(t), static_cast<int>(col), coef);
      } else if (closure_w[j] != 0.0) {
        triplets.emplace_back(static_cast<int>(t), static_cast<int>(g.unknown(closure_partner[j])),
                              coef * closure_w[j]);
      }
    }
  }
  SparseRM J(static_cast<int>(interior.size()), static_cast<int>(interior.size()));
  J.setFromTriplets(triplets.begin(), triplets.end());
  J.makeCompressed();
  return J;
}

} // namespace

std::vector<double> linearized_apply(const ScalarField& u, const ProblemSpec& spec, const ScalarField& du) {
  const auto interior = u.grid().interior();
  std::vector<double> out(interior.size());
  parallel_for(interior.size(), spec.solver.threads, [&](std::size_t t) {
    const auto st = linear_stencil(u, spec, interior[t]);
    double acc = 0.0;
    for (const auto& [j, coef] : st.terms) acc += coef * du[j];
    out[t] = acc;
  });
  return out;
}

namespace {

// Smallest a >= 0 with mu + a 1 in Gamma_k and sigma_k(mu + a 1) >= target.
double lift(std::vector<double> mu, int k, double target) {
  auto ok = [&](double a) {
    std::vector<double> v(mu);
    for (double& x : v) x += a;
    return in_cone(v, k) && sigma(v, k) >= target;
  };
  if (ok(0.0)) return 0.0;
  double hi = 1.0;
  while (!ok(hi)) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

} // namespace

ScalarField initial_guess(const ProblemSpec& spec, std::shared_ptr<const Grid> grid) {
  const auto& g = *grid;
  const int n = g.dim();
  const int k = spec.k();
  const double h = g.h();

  // Hessian of the boundary data extended by its own formula; central
  // differences are exact for the catalog's polynomials.
  std::vector<std::size_t> points;
  std::vector<std::vector<double>> mu;
  std::vector<double> x(n), xp(n), xm(n), xpp(n);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g.kind(idx) == PointKind::exterior) continue;
    g.coords(idx, x);
    SymMatrix H(n);
    const double g0 = spec.boundary(x);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        auto at = [&](double di, double dj) {
          xpp = x;
          xpp[i] += di * h;
          xpp[j] += dj * h;
          return spec.boundary(xpp);
        };
        if (i == j) H.set(i, i, (at(0.5, 0.5) - 2.0 * g0 + at(-0.5, -0.5)) / (h * h));
        else H.set(i, j, (at(1, 1) + at(-1, -1) - at(1, -1) - at(-1, 1)) / (4.0 * h * h));
      }
    }
    points.push_back(idx);
    const auto eig = eigen_decompose(H);
    mu.emplace_back(eig.lambda.values().begin(), eig.lambda.values().end());
  }

  std::vector<double> grad(n);
  auto guess_at = [&](std::span<const double> p, double a, double c) {
    double r2 = 0.0;
    for (double v : p) r2 += v * v;
    return 0.5 * a * r2 + c + spec.boundary(p);
  };
  auto offset = [&](double a) {
    double c = std::numeric_limits<double>::infinity();
    for (const auto& cl : g.closures()) {
      double r2 = 0.0;
      for (double v : cl.crossing) r2 += v * v;
      c = std::min(c, -0.5 * a * r2);
    }
    return c;
  };
  auto required = [&](double a, double c) {
    double need = 0.0;
    for (std::size_t t = 0; t < points.size(); ++t) {
      g.coords(points[t], x);
      std::vector<double> gp(n);
      for (int i = 0; i < n; ++i) {
        xp = x;
        xm = x;
        xp[i] += h;
        xm[i] -= h;
        gp[i] = a * x[i] + (spec.boundary(xp) - spec.boundary(xm)) / (2.0 * h);
      }
      need = std::max(need, lift(mu[t], k, spec.psi(x, guess_at(x, a, c), gp)));
    }
    return need;
  };

  double a = required(0.0, offset(0.0));
  double c = offset(a);
  for (int pass = 0; pass < 8; ++pass) {
    const double need = required(a, c);
    if (need <= a) break;
    a = need;
    c = offset(a);
  }

  ScalarField u = ScalarField::sample(grid, [&](std::span<const double> p) { return guess_at(p, a, c); });
  apply_boundary(u, spec);
  return u;
}

SolverState newton_solve(const ProblemSpec& spec, std::optional<ScalarField> start) {
  spec.validate();
  ScalarField u = start ? std::move(*start) : initial_guess(spec, spec.make_grid());
  apply_boundary(u, spec);
  const auto interior = u.grid().interior();
  const auto& cfg = spec.solver;

  SolverState state{.u = u, .residual_history = {}, .linear_iterations = {}, .message = {}};
  auto finish = [&](SolverStatus status, const ScalarField& field, const Residual& r, std::string msg) {
    state.u = field;
    state.status = status;
    state.residual_norm = r.max_norm;
    state.admissible_fraction = 1.0 - static_cast<double>(r.inadmissible) / static_cast<double>(interior.size());
    state.message = std::move(msg);
    return state;
  };

  Residual r = residual(u, spec);
  state.residual_history.push_back(r.max_norm);
  if (r.inadmissible > 0)
    return finish(SolverStatus::inadmissible_start, u, r, "initial guess is not admissible at every interior point");

  for (int iter = 0;; ++iter) {
    state.newton_iter = iter;
    if (r.max_norm <= cfg.tol) return finish(SolverStatus::converged, u, r, "");
    if (iter == cfg.max_iter) return finish(SolverStatus::max_iterations, u, r, "Newton iteration cap reached");

    const SparseRM J = assemble_jacobian(u, spec);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t t = 0; t < interior.size(); ++t) rhs[static_cast<Eigen::Index>(t)] = -r.values[t];

    Eigen::BiCGSTAB<SparseRM, Eigen::DiagonalPreconditioner<double>> solver;
    solver.setTolerance(cfg.linear_tol);
    solver.setMaxIterations(cfg.linear_max_iter);
    solver.compute(J);
    const Eigen::VectorXd delta = solver.solve(rhs);
    state.linear_iterations.push_back(static_cast<int>(solver.iterations()));
    const bool usable = delta.allFinite() && (solver.info() == Eigen::Success || solver.error() <= 1e-6);
    if (!usable)
      return finish(SolverStatus::linear_solve, u, r,
                    "linear solve stagnated (relative error " + std::to_string(solver.error()) + " after " +
                        std::to_string(solver.iterations()) + " iterations)");

    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving, alpha *= cfg.damping) {
      ScalarField trial = u;
      for (std::size_t t = 0; t < interior.size(); ++t)
        trial[interior[t]] += alpha * delta[static_cast<Eigen::Index>(t)];
      apply_boundary(trial, spec);
      Residual rt = residual(trial, spec);
      if (rt.inadmissible == 0 && rt.max_norm < r.max_norm) {
        u = std::move(trial);
        r = std::move(rt);
        accepted = true;
        break;
      }
    }
    if (!accepted)
      return finish(SolverStatus::admissibility_barrier, u, r,
                    "line search exhausted " + std::to_string(cfg.max_halvings) +
                        " halvings without an admissible decrease");
    state.damping = alpha;
    state.residual_history.push_back(r.max_norm);
  }
}

Admissibility admissibility_check(const ScalarField& u) {
  const auto& g = u.grid();
  const int k = g.dim() - 1;
  Admissibility a;
  a.worst_margin = std::numeric_limits<double>::infinity();
  std::size_t good = 0;
  for (std::size_t idx : g.interior()) {
    const auto lam = eigen_decompose(hessian_at(u, idx)).lambda;
    const auto s = sigma_all(lam.values(), k);
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= k; ++i) margin = std::min(margin, s[i]);
    a.worst_margin = std::min(a.worst_margin, margin);
    good += in_cone(lam.values(), k);
  }
  a.fraction = static_cast<double>(good) / static_cast<double>(g.interior().size());
  return a;
}

} // namespace hesslab
