#include "core/symmfunc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "core/error.hpp"

namespace hesslab {

namespace {

void check_order(int k, std::size_t n, const char* op) {
  if (k < 0 || static_cast<std::size_t>(k) > n)
    fail(ErrorKind::argument, std::string(op) + ": order k=" + std::to_string(k) +
                                  " outside [0, " + std::to_string(n) + "]");
}

bool is_excluded(std::span<const std::size_t> excluded, std::size_t i) {
  return std::find(excluded.begin(), excluded.end(), i) != excluded.end();
}

} // namespace

EigenvalueVector::EigenvalueVector(std::vector<double> values) : values_(std::move(values)) {
  require(values_.size() >= 2, ErrorKind::argument, "eigenvalue vector needs n >= 2");
  require(values_.size() <= kMaxDim, ErrorKind::argument, "eigenvalue vector too long");
  for (double v : values_)
    require(std::isfinite(v), ErrorKind::argument, "eigenvalue vector has a non-finite entry");
  sorted_ = std::is_sorted(values_.begin(), values_.end(), std::greater<>());
}

EigenvalueVector EigenvalueVector::descending(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  return EigenvalueVector(std::move(values));
}

EigenvalueVector EigenvalueVector::scaled(double t) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= t;
  return EigenvalueVector(std::move(out));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return std::round(c);
}

double sigma(std::span<const double> lambda, int k, std::span<const std::size_t> excluded) {
  const std::size_t n = lambda.size();
  check_order(k, n, "sigma");
  for (std::size_t i : excluded)
    require(i < n, ErrorKind::argument, "sigma: excluded index " + std::to_string(i) + " out of range");
  if (k == 0) return 1.0;

  std::array<double, kMaxDim + 1> e{};
  e[0] = 1.0;
  int seen = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_excluded(excluded, i)) continue;
    ++seen;
    const double x = lambda[i];
    for (int j = std::min(seen, k); j >= 1; --j) e[j] += x * e[j - 1];
  }
  return seen < k ? 0.0 : e[k];
}

double sigma(const EigenvalueVector& lambda, int k, std::span<const std::size_t> excluded) {
  return sigma(lambda.values(), k, excluded);
}

double sigma(const EigenvalueVector& lambda, int k, std::initializer_list<std::size_t> excluded) {
  return sigma(lambda.values(), k, std::span<const std::size_t>(excluded.begin(), excluded.size()));
}

std::vector<double> sigma_all(std::span<const double> lambda, int kmax) {
  require(kmax >= 0, ErrorKind::argument, "sigma_all: negative order");
  std::vector<double> e(static_cast<std::size_t>(kmax) + 1, 0.0);
  e[0] = 1.0;
  int seen = 0;
  for (double x : lambda) {
    ++seen;
    for (int j = std::min(seen, kmax); j >= 1; --j) e[j] += x * e[j - 1];
  }
  return e;
}

std::vector<double> sigma_gradient(std::span<const double> lambda, int k) {
  const std::size_t n = lambda.size();
  require(k >= 1 && static_cast<std::size_t>(k) <= n, ErrorKind::argument,
          "sigma_gradient: need 1 <= k <= n");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ex[1] = {i};
    g[i] = sigma(lambda, k - 1, ex);
  }
  return g;
}

std::vector<double> sigma_gradient(const EigenvalueVector& lambda, int k) {
  return sigma_gradient(lambda.values(), k);
}

std::vector<double> sigma_hessian(const EigenvalueVector& lambda, int k) {
  const std::size_t n = lambda.size();
  require(k >= 2 && static_cast<std::size_t>(k) <= n, ErrorKind::argument,
          "sigma_hessian: need 2 <= k <= n");
  std::vector<double> h(n * n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const std::size_t ex[2] = {p, q};
      const double v = sigma(lambda.values(), k - 2, ex);
      h[p * n + q] = v;
      h[q * n + p] = v;
    }
  }
  return h;
}

ConeMembership in_cone(const EigenvalueVector& lambda, int k, double tol) {
  require(k >= 1 && static_cast<std::size_t>(k) <= lambda.size(), ErrorKind::argument,
          "in_cone: need 1 <= k <= n");
  const auto e = sigma_all(lambda.values(), k);
  ConeMembership out;
  out.k = k;
  out.member = true;
  for (int i = 1; i <= k; ++i) {
    out.margins.push_back(e[i]);
    if (!(e[i] > tol)) {
      out.member = false;
      out.first_failing_order = i;
      break;
    }
  }
  return out;
}

bool in_cone(std::span<const double> lambda, int k, double tol) {
  const auto e = sigma_all(lambda, k);
  for (int i = 1; i <= k; ++i)
    if (!(e[i] > tol)) return false;
  return true;
}

double newton_maclaurin_gap(const EigenvalueVector& lambda, int m, int l, int r, int s) {
  const int n = static_cast<int>(lambda.size());
  require(m > l && l >= 0 && r > s && s >= 0 && m >= r && l >= s && m <= n, ErrorKind::argument,
          "newton_maclaurin_gap: need m > l >= 0, r > s >= 0, m >= r, l >= s, m <= n");
  require(in_cone(lambda.values(), m), ErrorKind::precondition,
          "newton_maclaurin_gap: lambda is not in Gamma_m");
  const auto e = sigma_all(lambda.values(), m);
  auto normalized = [&](int j) { return e[j] / binomial(n, j); };
  const double lhs = std::pow(normalized(m) / normalized(l), 1.0 / (m - l));
  const double rhs = std::pow(normalized(r) / normalized(s), 1.0 / (r - s));
  return rhs - lhs;
}

double sigma_quotient(const EigenvalueVector& lambda, int k) {
  require(k >= 1 && static_cast<std::size_t>(k) <= lambda.size(), ErrorKind::argument,
          "sigma_quotient: need 1 <= k <= n");
  const double below = sigma(lambda, k - 1);
  require(below > 0.0, ErrorKind::precondition, "sigma_quotient: sigma_{k-1} <= 0");
  return sigma(lambda, k) / below;
}

Rescaled rescale(const EigenvalueVector& lambda, int k, double target) {
  require(k >= 1 && static_cast<std::size_t>(k) <= lambda.size(), ErrorKind::argument,
          "rescale: need 1 <= k <= n");
  require(target > 0.0 && std::isfinite(target), ErrorKind::argument, "rescale: target must be positive");
  require(in_cone(lambda.values(), k), ErrorKind::precondition, "rescale: lambda is not in Gamma_k");
  const double t = std::pow(target / sigma(lambda, k), 1.0 / k);
  return {lambda.scaled(t), t};
}

} // namespace hesslab
