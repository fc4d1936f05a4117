#include <cmath>

#include "core/solver.hpp"
#include "support.hpp"

using namespace hesslab;
using testing::error_kind;

namespace {

const double kA3 = 1.0 / std::sqrt(3.0);

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

ProblemSpec box_quadratic(int points) {
  ProblemSpec spec;
  spec.n = 3;
  spec.domain = Domain::make_box({-1, -1, -1}, {1, 1, 1});
  spec.grid_points = points;
  spec.psi = Psi{PsiKind::constant, 3.0, 0.0, {}};
  spec.boundary.kind = BoundaryKind::quadratic;
  spec.boundary.a = {1.0, 1.0, 1.0};
  return spec;
}

double radial_error(const ScalarField& u) {
  double e = 0.0;
  for (std::size_t idx : u.grid().interior())
    e = std::max(e, std::abs(u[idx] - kA3 * (norm2(u.grid().coords(idx)) - 1.0) / 2));
  return e;
}

} // namespace

TEST_CASE("residual examples") {
  auto spec = radial_problem(3, 1.0, 17);
  const auto g = spec.make_grid();
  const auto exact = ScalarField::sample(g, [](std::span<const double> x) { return kA3 * (norm2(x) - 1.0) / 2; });
  const auto r = residual(exact, spec);
  CHECK(r.inadmissible == 0);
  CHECK(r.max_norm <= 1e-12);

  const auto half = ScalarField::sample(g, [](std::span<const double> x) { return norm2(x) / 2; });
  spec.psi.c = 3.0;
  CHECK(residual(half, spec).max_norm <= 1e-12);
  spec.psi.c = 1.0;
  for (double v : residual(half, spec).values) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));

  const auto concave = ScalarField::sample(g, [](std::span<const double> x) { return -norm2(x) / 2; });
  const auto rc = residual(concave, spec);
  CHECK(rc.inadmissible == g->interior().size());
}

TEST_CASE("linearized operator") {
  auto spec = radial_problem(3, 1.0, 17);
  const auto g = spec.make_grid();
  const double a = 0.8;
  const auto u = ScalarField::sample(g, [&](std::span<const double> x) { return a * norm2(x) / 2; });

  const auto zero = linearized_apply(u, spec, ScalarField(g));
  for (double v : zero) CHECK(v == 0.0);

  // Quadratic du has Laplacian 2 + 4 - 1 = 5; the operator is 2a times it.
  const auto du = ScalarField::sample(g, [](std::span<const double> x) {
    return x[0] * x[0] + 2 * x[1] * x[1] - 0.5 * x[2] * x[2] + x[0] * x[2];
  });
  for (double v : linearized_apply(u, spec, du)) CHECK(v == doctest::Approx(2 * a * 5.0).epsilon(1e-9));
}

TEST_CASE("linearized operator matches directional differences") {
  ProblemSpec spec = radial_problem(3, 1.0, 13);
  spec.psi = Psi{PsiKind::gradient_power, 1.0, 0.3, {}};
  const auto g = spec.make_grid();
  const auto u = ScalarField::sample(g, [](std::span<const double> x) {
    return 0.7 * norm2(x) / 2 + 0.1 * x[0] * x[0] * x[1] + 0.2 * x[2];
  });
  const auto du = ScalarField::sample(g, [](std::span<const double> x) { return std::sin(2 * x[0]) * std::cos(x[1] + x[2]); });
  const auto lin = linearized_apply(u, spec, du);
  const double t = 1e-5;
  ScalarField plus = u, minus = u;
  for (std::size_t i = 0; i < u.values().size(); ++i) {
    plus[i] += t * du[i];
    minus[i] -= t * du[i];
  }
  const auto rp = residual(plus, spec), rm = residual(minus, spec);
  for (std::size_t j = 0; j < lin.size(); ++j)
    CHECK((rp.values[j] - rm.values[j]) / (2 * t) == doctest::Approx(lin[j]).epsilon(1e-5));

  spec.psi = Psi{PsiKind::exp_u, 1.0, 0.4, {}};
  const auto lin2 = linearized_apply(u, spec, du);
  const auto rp2 = residual(plus, spec), rm2 = residual(minus, spec);
  for (std::size_t j = 0; j < lin2.size(); ++j)
    CHECK((rp2.values[j] - rm2.values[j]) / (2 * t) == doctest::Approx(lin2[j]).epsilon(1e-5));
}

TEST_CASE("admissibility check") {
  const auto g = std::make_shared<const Grid>(Grid::ball(3, 1.0, 11));
  const auto a = admissibility_check(ScalarField::sample(g, [](std::span<const double> x) { return norm2(x) / 2; }));
  CHECK(a.fraction == 1.0);
  CHECK(a.worst_margin == doctest::Approx(3.0));
  CHECK(admissibility_check(ScalarField::sample(g, [](std::span<const double> x) { return -norm2(x) / 2; })).fraction ==
        0.0);
  const double eps = 0.01;
  const auto s = admissibility_check(ScalarField::sample(g, [&](std::span<const double> x) {
    return x[0] * x[0] - x[1] * x[1] / 4 + eps * x[2] * x[2];
  }));
  // Hessian diag(2, -1/2, 2 eps): sigma_1 > 0 but sigma_2 = -1 + 3 eps < 0.
  CHECK(s.fraction == 0.0);
  CHECK(s.worst_margin == doctest::Approx(-1.0 + 3 * eps).epsilon(1e-9));
}

TEST_CASE("initial guess for the radial problem") {
  const auto spec = radial_problem(3, 1.0, 17);
  const auto u0 = initial_guess(spec, spec.make_grid());
  CHECK(admissibility_check(u0).fraction == 1.0);
  // sigma_2(a I) = 3 a^2 >= 1 with the smallest a.
  const auto idx = u0.grid().interior()[u0.grid().interior().size() / 2];
  CHECK(hessian_at(u0, idx)(0, 0) == doctest::Approx(kA3).epsilon(1e-6));
}

TEST_CASE("radial solve within h^2 of the exact solution") {
  const auto spec = radial_problem(3, 1.0, 33);
  const auto s = newton_solve(spec);
  REQUIRE(s.converged());
  CHECK(s.residual_norm <= 1e-10);
  CHECK(s.admissible_fraction == 1.0);
  const double h = 2.0 / 32;
  CHECK(radial_error(s.u) <= h * h);
  for (std::size_t idx : s.u.grid().interior()) {
    CHECK(s.u[idx] <= 0.0);
    const auto grad = sigma_gradient(eigen_decompose(hessian_at(s.u, idx)).lambda, 2);
    for (double v : grad) CHECK(v > 0.0);
  }
  for (std::size_t j = 1; j < s.residual_history.size(); ++j)
    CHECK(s.residual_history[j] < s.residual_history[j - 1]);
}

TEST_CASE("box quadratic is reproduced exactly") {
  const auto s = newton_solve(box_quadratic(17));
  REQUIRE(s.converged());
  CHECK(s.newton_iter <= 2);
  CHECK(s.residual_norm <= 1e-10);
  for (std::size_t idx : s.u.grid().interior())
    CHECK(s.u[idx] == doctest::Approx(norm2(s.u.grid().coords(idx)) / 2).epsilon(1e-10));
}

TEST_CASE("Newton converges quadratically near the solution") {
  const auto spec = radial_problem(3, 1.0, 17);
  const auto solved = newton_solve(spec);
  REQUIRE(solved.converged());
  ScalarField start = solved.u;
  const auto& g = start.grid();
  for (std::size_t idx : g.interior()) {
    const auto x = g.coords(idx);
    start[idx] += 1e-4 * std::cos(1.3 * x[0]) * (1 - norm2(x));
  }
  const auto s = newton_solve(spec, start);
  REQUIRE(s.converged());
  const auto& r = s.residual_history;
  REQUIRE(r.size() >= 2);
  for (std::size_t j = 0; j + 1 < r.size(); ++j)
    if (r[j + 1] > 1e-12) CHECK(r[j + 1] <= 10.0 * r[j] * r[j]);
}

TEST_CASE("catalog problems converge") {
  for (auto psi : {Psi{PsiKind::radial_power, 1.0, 1.0, {0.3, 0.0, 0.0}}, Psi{PsiKind::exp_u, 1.0, 0.5, {}},
                   Psi{PsiKind::gradient_power, 1.0, 0.5, {}}}) {
    auto spec = radial_problem(3, 1.0, 13);
    spec.psi = psi;
    const auto s = newton_solve(spec);
    CHECK_MESSAGE(s.converged(), to_string(psi.kind));
    CHECK(s.admissible_fraction == 1.0);
  }
  const auto s4 = newton_solve(radial_problem(4, 1.0, 11));
  CHECK(s4.converged());
}

TEST_CASE("invalid specs are rejected before solving") {
  auto spec = radial_problem(3, 1.0, 17);
  spec.psi.c = -1.0;
  CHECK(error_kind([&] { newton_solve(spec); }) == ErrorKind::config);
}

TEST_CASE("solver failure is reported with the iterate") {
  auto spec = radial_problem(3, 1.0, 17);
  spec.solver.max_iter = 1;
  const auto s = newton_solve(spec);
  CHECK(s.status == SolverStatus::max_iterations);
  CHECK(s.u.values().size() == s.u.grid().size());
  CHECK_FALSE(s.message.empty());
}

TEST_CASE("solve is deterministic across thread counts") {
  auto spec = radial_problem(3, 1.0, 17);
  const auto a = newton_solve(spec);
  spec.solver.threads = 4;
  const auto b = newton_solve(spec);
  REQUIRE(a.converged());
  REQUIRE(b.converged());
  for (std::size_t i = 0; i < a.u.values().size(); ++i) CHECK(a.u[i] == doctest::Approx(b.u[i]).epsilon(1e-12));
}
