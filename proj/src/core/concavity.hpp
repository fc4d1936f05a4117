#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/symmfunc.hpp"

namespace hesslab {

/// One evaluation point of the (n-1)-Hessian concavity inequality.
/// lambda is descending and in Gamma_{n-1}; lambda_1 has multiplicity m;
/// xi_i = 0 for 1 < i <= m (1-based).
struct ConcavityInstance {
  EigenvalueVector lambda;
  int m = 1;
  std::vector<double> xi;
  double K = 0.0;
  double delta0 = 0.0;
};

/// Constants of the two proof branches. The non-semi-convex branch needs
///   A > (3 Fmax + 1)^{1/(n-1)}   and   delta0 + delta0 Fmax / A^{n-1} < 1/4.
struct BranchConstants {
  double A = 0.0;
  double C_lambda1 = 0.0;
  double delta0 = 0.0;
  double K = 0.0;
  double Fmax = 1.0;

  /// delta0 = min{1/15, 1/((k+1)(k+3))} and K = (k+1)^2 with k = n - 1;
  /// A sits 1% above its lower bound and the lambda_1 threshold equals A.
  static BranchConstants reference(int n, double Fmax = 1.0);

  /// Throws a config error naming the violated constraint.
  void validate(int n) const;
  std::optional<std::string> violation(int n) const;
};

enum class Branch { semiconvex, nonsemiconvex, full_multiplicity };
const char* to_string(Branch b) noexcept;

/// The four summands of the inequality, left side minus right side:
///   mixed  = -sum_{p!=q} F^{pp,qq} xi_p xi_q
///   square = K (sum_i F^{ii} xi_i)^2 / F
///   gap    = 2 sum_{i>m} F^{ii} xi_i^2 / (lambda_1 - lambda_i)
///   rhs    = (1 + delta0) F^{11} xi_1^2 / lambda_1
struct DeficitTerms {
  double mixed = 0.0;
  double square = 0.0;
  double gap = 0.0;
  double rhs = 0.0;
};

struct DeficitReport {
  double deficit = 0.0; // mixed + square + gap - rhs
  Branch branch = Branch::semiconvex;
  DeficitTerms terms;
  std::optional<bool> certificate_ok;
};

/// Relative tolerance used to recognise the lambda_1 cluster in externally
/// supplied spectra.
inline constexpr double kClusterTolerance = 1e-9;

/// Validates the instance (cone membership, cluster structure, xi support)
/// and evaluates the inequality with F = sigma_{n-1}. The branch is
/// nonsemiconvex when lambda_n <= -A; in that branch the rank-one
/// certificate is checked as well.
DeficitReport deficit(const ConcavityInstance& instance, double A);

/// Minimum of the inequality's quadratic form over unit admissible xi.
struct WorstCase {
  double min_deficit = 0.0;
  std::vector<double> xi; // unit minimiser, zero on coordinates 2..m
};

/// The form is B + (K/F) f f^T with f_i = F^{ii}. The rank-one part dominates
/// by many orders of magnitude for stretched spectra, so the minimum is found
/// from the eigenpairs of B and the secular equation of the update rather
/// than by diagonalising the sum.
WorstCase worst_case_deficit(const EigenvalueVector& lambda, int m, double K, double delta0);

/// |(a) - (b)| where (a) = -sum_{p!=q} F^{pp,qq} xi_p xi_q + (sum F^{ii} xi_i)^2 / F
/// from the symmetric-function primitives and (b) is the closed form
///   Lambda^2/F (sum xi_i/lambda_i^2)^2 + F sum xi_i^2/lambda_i^2 + 2 Lambda sum xi_i^2/lambda_i^3
/// with Lambda = -sigma_n. Also returns |b| so callers can scale the residual.
struct RepresentationCheck {
  double difference = 0.0;
  double closed_form = 0.0;
};
RepresentationCheck sigma_n_representation_check(const EigenvalueVector& lambda, std::span<const double> xi);

/// sigma_{n-2}(lambda|i) - (sigma_{n-1}/lambda_i - sigma_n/lambda_i^2), i 0-based.
double fii_lambda_identity(const EigenvalueVector& lambda, std::size_t i);

/// y = sqrt(Lambda/F) (1,...,1) and D = diag(d) of size n - m + 1 with
///   d_1 = (1 - delta0 - delta0 F / A^{n-1}) lambda_1,
///   d_i = 2 lambda_1 lambda_{m+i-1} / (lambda_1 - lambda_{m+i-1}),  2 <= i <= n-m+1.
struct RankOneCertificate {
  std::vector<double> y;
  std::vector<double> d;
};
RankOneCertificate certificate_matrix(const EigenvalueVector& lambda, int m, double delta0, double A);

struct DefiniteDecision {
  bool definite = false;          // from the determinant lemma
  bool eigen_definite = false;    // from the eigenvalues of y^T y + D
  double min_eigenvalue = 0.0;
  double det_lemma = 0.0;         // det D (1 + sum y_i^2 / d_i)
  bool agrees() const { return definite == eigen_definite; }
};

/// Decides whether y^T y + D is positive definite. With no negative d_i it
/// is; with two or more it is not (a rank-one update lifts at most one
/// eigenvalue); with exactly one, ordering that entry last makes every other
/// leading minor positive, so the sign of det D (1 + y D^{-1} y^T) decides.
DefiniteDecision rank_one_update_definite(std::span<const double> y, std::span<const double> d);

/// Leading principal minors of y^T y + D, orders 1..size, via the
/// determinant lemma on each leading block.
std::vector<double> leading_minors(std::span<const double> y, std::span<const double> d);

/// True when the leading minors of orders 1..n-m are positive and the full
/// determinant is positive.
bool certificate_sound(const RankOneCertificate& cert, int n, int m);

} // namespace hesslab
