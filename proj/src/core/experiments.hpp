#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "core/field.hpp"
#include "core/solver.hpp"

namespace hesslab {

/// (-u)^beta lambda_1(D^2 u) over the interior points, in Grid::interior()
/// order.
struct PogorelovScan {
  double beta = 4.0;
  double B = 0.0;
  std::vector<double> values;
  double sup_value = 0.0;
  std::size_t argmax = 0;             // grid index
  std::vector<double> argmax_x;
  bool argmax_strict = false;         // every stencil neighbour of the argmax is interior
};

/// Throws a data error if u >= 0 at some interior point.
PogorelovScan pogorelov_scan(const ScalarField& u, double beta);

inline const std::vector<double> kDefaultBetaSweep = {1.0, 2.0, 4.0, 8.0};

/// P = ln lambda_1 + beta ln(-u) + (B/2) |grad u|^2 over the interior points.
struct TestFunctionField {
  double beta = 4.0;
  double B = 0.0;
  std::vector<double> values;
  double max_value = 0.0;
  std::size_t argmax = 0;
  std::vector<double> argmax_x;
  bool argmax_strict = false;
};

/// Throws a data error if u >= 0 or lambda_1 <= 0 at some interior point.
TestFunctionField test_function_field(const ScalarField& u, double beta, double B);

/// Columns x_1..x_n, u, lambda_1, then one q_beta column per scan.
void write_pogorelov_csv(std::ostream& os, const ScalarField& u, std::span<const PogorelovScan> scans);

/// Least squares u ~ x^T A x / 2 + b.x + c over the interior points.
struct QuadraticFit {
  SymMatrix A;
  std::vector<double> b;
  double c = 0.0;
  double max_residual = 0.0;
};

/// Throws a fit error when the design matrix is rank deficient.
QuadraticFit quadratic_fit(const ScalarField& u);

struct RigidityConfig {
  int n = 3;
  std::vector<double> radii = {1.0, 2.0, 4.0, 8.0};
  double eps = 0.05;
  int points = 33;       // per axis, independent of R
  double growth = 1.0;   // boundary data eps * R^growth * phi(x / R)
  SolverConfig solver;
  int threads = 1;       // concurrent per-R solves
};

struct RigidityRow {
  double R = 0.0;
  int points = 0;
  double h = 0.0;        // spacing in x
  double h_unit = 0.0;   // spacing of the rescaled grid on the unit ball
  SolverStatus status = SolverStatus::max_iterations;
  int newton_iter = 0;
  double residual_norm = 0.0;
  SymMatrix hessian_center;
  double deviation = 0.0;
  double holder_proxy = 0.0;
  double fit_residual = 0.0;
  double fit_bound = 0.0;   // 10 h_unit^2
  std::string message;
  bool solved() const { return status == SolverStatus::converged; }
};

ProblemSpec rigidity_problem(const RigidityConfig& cfg, double R);

/// v(y) = (u(R y) - sup g) / R^2 on the unit-ball grid with the same shape.
ScalarField rescale_to_unit_ball(const ScalarField& u, double R, double sup_boundary);

/// One row per radius, ordered by R. Solver failures produce rows with a
/// non-converged status and NaN statistics.
std::vector<RigidityRow> rigidity_experiment(const RigidityConfig& cfg);

struct RigidityVerdict {
  bool all_solved = false;
  bool holder_nonincreasing = false;
  bool fit_decreasing = false;
  bool fit_within_bound = false;
  /// eps > 0: solved, holder nonincreasing and fit residual decreasing.
  /// eps = 0: solved and fit residual within 10 h_unit^2 at every R.
  bool passed = false;
};

RigidityVerdict rigidity_verdict(std::span<const RigidityRow> rows, double eps);

void write_rigidity_csv(std::ostream& os, std::span<const RigidityRow> rows, double eps);

} // namespace hesslab
