#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/field.hpp"
#include "core/problem.hpp"

namespace hesslab {

/// Residual F(D^2 u) - psi(x, u, grad u) on the interior points, in the
/// order of Grid::interior(). Inadmissible points are evaluated anyway and
/// flagged.
struct Residual {
  std::vector<double> values;
  std::vector<std::uint8_t> admissible;
  std::size_t inadmissible = 0;
  double max_norm = 0.0;
};

Residual residual(const ScalarField& u, const ProblemSpec& spec);

/// Linearization of the residual at u applied to du, using the stored values
/// of du at every stencil point:
///   sum_ij F^{ij}(D^2 u) (D^2 du)_ij - psi_u du - psi_p . grad du.
/// Requires u admissible at every interior point.
std::vector<double> linearized_apply(const ScalarField& u, const ProblemSpec& spec, const ScalarField& du);

/// Overwrites the boundary values of u from the Dirichlet closures.
void apply_boundary(ScalarField& u, const ProblemSpec& spec);

/// u0 = a |x|^2 / 2 + c + g(x), with g the boundary data evaluated by its
/// formula, a >= 0 the smallest value putting a I + D^2 g in Gamma_{n-1} with
/// sigma_{n-1} >= psi at every grid point, and c = min over the boundary of
/// -a |x|^2 / 2. For psi = 1, g = 0 on a ball this is a (|x|^2 - R^2) / 2 with
/// n a^{n-1} = 1. Boundary values are applied.
ScalarField initial_guess(const ProblemSpec& spec, std::shared_ptr<const Grid> grid);

enum class SolverStatus { converged, admissibility_barrier, linear_solve, max_iterations, inadmissible_start };
const char* to_string(SolverStatus s) noexcept;

struct SolverState {
  ScalarField u;
  double residual_norm = 0.0;
  int newton_iter = 0;
  double admissible_fraction = 0.0;
  double damping = 1.0;                // last accepted step length
  SolverStatus status = SolverStatus::max_iterations;
  std::vector<double> residual_history; // max-norm after each accepted iterate, starting with u0
  std::vector<int> linear_iterations;
  std::string message;
  bool converged() const { return status == SolverStatus::converged; }
};

/// Damped Newton with a residual-decrease and Gamma_{n-1} barrier line search.
SolverState newton_solve(const ProblemSpec& spec, std::optional<ScalarField> start = std::nullopt);

struct Admissibility {
  double fraction = 0.0;
  double worst_margin = 0.0; // min over interior points of min_{i<=n-1} sigma_i
};

Admissibility admissibility_check(const ScalarField& u);

} // namespace hesslab
