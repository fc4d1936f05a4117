#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "core/grid.hpp"

namespace hesslab {

enum class PsiKind { constant, radial_power, exp_u, gradient_power };
const char* to_string(PsiKind k) noexcept;

/// Right-hand side catalog, all positive for c > 0:
///   constant        c
///   radial_power    c (1 + |x - center|^2)^s
///   exp_u           c exp(s u)
///   gradient_power  c (1 + |grad u|^2)^s
struct Psi {
  PsiKind kind = PsiKind::constant;
  double c = 1.0;
  double s = 0.0;
  std::vector<double> center; // radial_power; empty means the origin

  struct Value {
    double value = 0.0;
    double du = 0.0;                 // d psi / d u
    std::array<double, 4> dgrad{};   // d psi / d (grad u)_i
  };
  Value eval(std::span<const double> x, double u, std::span<const double> grad) const;
  double operator()(std::span<const double> x, double u, std::span<const double> grad) const {
    return eval(x, u, grad).value;
  }
  bool depends_on_u() const { return kind == PsiKind::exp_u && s != 0.0; }
  bool depends_on_gradient() const { return kind == PsiKind::gradient_power && s != 0.0; }
};

enum class BoundaryKind { zero, quadratic, cubic_perturbation };
const char* to_string(BoundaryKind k) noexcept;

/// Dirichlet data catalog:
///   zero                0
///   quadratic           sum_i a_i x_i^2 / 2 + sum_i b_i x_i + c
///   cubic_perturbation  eps * scale^growth * phi(x / scale),
///                       phi(y) = y_1^3 - 3 y_1 y_2^2 + y_2 y_3 (last term for n >= 3)
struct BoundaryData {
  BoundaryKind kind = BoundaryKind::zero;
  std::vector<double> a, b;
  double c = 0.0;
  double eps = 0.0;
  double scale = 1.0;
  double growth = 1.0;

  double operator()(std::span<const double> x) const;
};

double cubic_phi(std::span<const double> y);

struct SolverConfig {
  double tol = 1e-10;        // max-norm residual
  int max_iter = 50;
  double damping = 0.5;      // backtracking factor
  int max_halvings = 30;
  double linear_tol = 1e-8;  // relative
  int linear_max_iter = 20000;
  int threads = 1;
};

struct ProblemSpec {
  int n = 3;
  Domain domain = Domain::make_ball(1.0);
  int grid_points = 33;
  Psi psi;
  BoundaryData boundary;
  SolverConfig solver;

  int k() const { return n - 1; }
  /// Throws a config error for psi with c <= 0, unsupported n, and similar.
  void validate() const;
  std::shared_ptr<const Grid> make_grid() const;

  static ProblemSpec from_json(const nlohmann::json& j);
  static ProblemSpec load(const std::string& path);
  nlohmann::json to_json() const;
};

/// The radial reference problem: ball of radius R, psi = 1, g = 0.
ProblemSpec radial_problem(int n, double radius, int points);

} // namespace hesslab
