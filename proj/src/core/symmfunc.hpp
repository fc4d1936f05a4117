#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace hesslab {

/// Largest spectrum length accepted by the symmetric-function kernels.
inline constexpr std::size_t kMaxDim = 32;

/// Ordered spectrum (lambda_1, ..., lambda_n), n >= 2, all entries finite.
/// `sorted()` reports whether the entries are in descending order.
class EigenvalueVector {
public:
  explicit EigenvalueVector(std::vector<double> values);
  EigenvalueVector(std::initializer_list<double> values)
      : EigenvalueVector(std::vector<double>(values)) {}

  /// Same entries, sorted so that values[i] >= values[i+1].
  static EigenvalueVector descending(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  bool sorted() const noexcept { return sorted_; }

  EigenvalueVector scaled(double t) const;

private:
  std::vector<double> values_;
  bool sorted_ = false;
};

double binomial(int n, int k);

/// sigma_k of the entries whose indices are not in `excluded` (0-based).
/// Evaluated by the prefix recurrence e_j <- e_j + x * e_{j-1}; never by
/// dividing characteristic-polynomial coefficients.
double sigma(std::span<const double> lambda, int k, std::span<const std::size_t> excluded = {});
double sigma(const EigenvalueVector& lambda, int k, std::span<const std::size_t> excluded = {});
double sigma(const EigenvalueVector& lambda, int k, std::initializer_list<std::size_t> excluded);

/// sigma_0 .. sigma_kmax in one pass. Entries with j > n are zero.
std::vector<double> sigma_all(std::span<const double> lambda, int kmax);

/// Component i is sigma_{k-1}(lambda | i) = d sigma_k / d lambda_i.
std::vector<double> sigma_gradient(const EigenvalueVector& lambda, int k);
std::vector<double> sigma_gradient(std::span<const double> lambda, int k);

/// Row-major n x n matrix of d^2 sigma_k / d lambda_p d lambda_q:
/// sigma_{k-2}(lambda | p q) off the diagonal, zero on it.
std::vector<double> sigma_hessian(const EigenvalueVector& lambda, int k);

struct ConeMembership {
  int k = 0;
  bool member = false;
  std::optional<int> first_failing_order;
  std::vector<double> margins; // sigma_1, sigma_2, ... up to k or the first failure
};

/// Garding-cone test: member iff sigma_i > tol for every 1 <= i <= k.
ConeMembership in_cone(const EigenvalueVector& lambda, int k, double tol = 0.0);
bool in_cone(std::span<const double> lambda, int k, double tol = 0.0);

/// RHS - LHS of the generalized Newton-Maclaurin inequality
///   [ (s_m/C(n,m)) / (s_l/C(n,l)) ]^{1/(m-l)} <= [ (s_r/C(n,r)) / (s_s/C(n,s)) ]^{1/(r-s)}.
/// Requires lambda in Gamma_m, m > l >= 0, r > s >= 0, m >= r, l >= s.
double newton_maclaurin_gap(const EigenvalueVector& lambda, int m, int l, int r, int s);

/// sigma_k / sigma_{k-1}; requires sigma_{k-1} > 0.
double sigma_quotient(const EigenvalueVector& lambda, int k);

struct Rescaled {
  EigenvalueVector lambda;
  double scale;
};

/// Uses sigma_k(t lambda) = t^k sigma_k(lambda) to hit sigma_k = target.
Rescaled rescale(const EigenvalueVector& lambda, int k, double target);

} // namespace hesslab
