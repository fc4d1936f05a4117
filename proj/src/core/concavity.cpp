#include "core/concavity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"
#include "core/spectral.hpp"

namespace hesslab {

BranchConstants BranchConstants::reference(int n, double Fmax) {
  const int k = n - 1;
  BranchConstants c;
  c.delta0 = std::min(1.0 / 15.0, 1.0 / ((k + 1.0) * (k + 3.0)));
  c.K = (k + 1.0) * (k + 1.0);
  c.Fmax = Fmax;
  c.A = 1.01 * std::pow(3.0 * Fmax + 1.0, 1.0 / (n - 1));
  c.C_lambda1 = c.A;
  return c;
}

std::optional<std::string> BranchConstants::violation(int n) const {
  if (n < 3) return "n must be at least 3";
  if (!(Fmax > 0.0)) return "Fmax must be positive";
  if (!(delta0 > 0.0 && delta0 < 1.0)) return "delta0 must lie in (0, 1)";
  if (!(K >= 0.0)) return "K must be nonnegative";
  if (!(A > 1.0)) return "A must exceed 1";
  if (!(C_lambda1 > 1.0)) return "C_lambda1 must exceed 1";
  const double a_pow = std::pow(A, n - 1);
  if (!(a_pow > 3.0 * Fmax + 1.0)) return "A must exceed (3 Fmax + 1)^{1/(n-1)}";
  if (!(delta0 + delta0 * Fmax / a_pow < 0.25)) return "delta0 + delta0 Fmax / A^{n-1} must be below 1/4";
  return std::nullopt;
}

void BranchConstants::validate(int n) const {
  if (auto v = violation(n)) fail(ErrorKind::config, "branch constants: " + *v);
}

const char* to_string(Branch b) noexcept {
  switch (b) {
  case Branch::semiconvex: return "semiconvex";
  case Branch::nonsemiconvex: return "nonsemiconvex";
  case Branch::full_multiplicity: return "full_multiplicity";
  }
  return "unknown";
}

namespace {

struct Derivatives {
  double F = 0.0;
  std::vector<double> Fi;  // F^{ii}
  std::vector<double> Fpq; // F^{pp,qq}, row-major, zero diagonal
};

Derivatives derivatives(const EigenvalueVector& lambda) {
  const int n = static_cast<int>(lambda.size());
  Derivatives d;
  d.F = sigma(lambda, n - 1);
  d.Fi = sigma_gradient(lambda, n - 1);
  d.Fpq = sigma_hessian(lambda, n - 1);
  return d;
}

void check_instance_shape(const EigenvalueVector& lambda, int m, const char* op) {
  const int n = static_cast<int>(lambda.size());
  require(n >= 3, ErrorKind::argument, std::string(op) + ": need n >= 3");
  require(lambda.sorted(), ErrorKind::argument, std::string(op) + ": lambda must be sorted descending");
  require(m >= 1 && m <= n, ErrorKind::argument, std::string(op) + ": multiplicity out of range");
  require(in_cone(lambda.values(), n - 1), ErrorKind::precondition,
          std::string(op) + ": lambda is not in Gamma_{n-1}");
  const double tol = kClusterTolerance * std::abs(lambda[0]);
  for (int i = 1; i < m; ++i)
    require(lambda[0] - lambda[i] <= tol, ErrorKind::argument,
            std::string(op) + ": entries 1..m are not a cluster");
  if (m < n)
    require(lambda[0] - lambda[m] > tol, ErrorKind::degenerate_gap,
            std::string(op) + ": lambda_1 - lambda_{m+1} within clustering tolerance");
}

} // namespace

DeficitReport deficit(const ConcavityInstance& inst, double A) {
  const auto& lam = inst.lambda;
  const int n = static_cast<int>(lam.size());
  check_instance_shape(lam, inst.m, "deficit");
  require(inst.xi.size() == lam.size(), ErrorKind::argument, "deficit: xi has wrong length");
  for (int i = 1; i < inst.m; ++i)
    require(inst.xi[i] == 0.0, ErrorKind::argument, "deficit: xi_i must vanish for 1 < i <= m");
  require(inst.K >= 0.0, ErrorKind::argument, "deficit: K must be nonnegative");
  require(inst.delta0 >= 0.0 && inst.delta0 < 1.0, ErrorKind::argument, "deficit: delta0 must lie in [0, 1)");

  const auto d = derivatives(lam);
  const auto& xi = inst.xi;
  DeficitReport rep;

  double mixed = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) mixed += d.Fpq[p * n + q] * xi[p] * xi[q];
  rep.terms.mixed = -2.0 * mixed;

  double lin = 0.0;
  for (int i = 0; i < n; ++i) lin += d.Fi[i] * xi[i];
  rep.terms.square = inst.K * lin * lin / d.F;

  for (int i = inst.m; i < n; ++i) rep.terms.gap += 2.0 * d.Fi[i] * xi[i] * xi[i] / (lam[0] - lam[i]);
  rep.terms.rhs = (1.0 + inst.delta0) * d.Fi[0] * xi[0] * xi[0] / lam[0];
  rep.deficit = rep.terms.mixed + rep.terms.square + rep.terms.gap - rep.terms.rhs;

  if (inst.m == n) {
    rep.branch = Branch::full_multiplicity;
  } else if (lam[n - 1] <= -A) {
    rep.branch = Branch::nonsemiconvex;
    rep.certificate_ok = certificate_sound(certificate_matrix(lam, inst.m, inst.delta0, A), n, inst.m);
  } else {
    rep.branch = Branch::semiconvex;
  }
  return rep;
}

WorstCase worst_case_deficit(const EigenvalueVector& lam, int m, double K, double delta0) {
  const int n = static_cast<int>(lam.size());
  check_instance_shape(lam, m, "worst_case_deficit");
  require(K >= 0.0, ErrorKind::argument, "worst_case_deficit: K must be nonnegative");
  const auto d = derivatives(lam);

  std::vector<int> support{0};
  for (int i = m; i < n; ++i) support.push_back(i);
  const std::size_t s = support.size();

  std::vector<double> b(s * s, 0.0), f(s);
  for (std::size_t a = 0; a < s; ++a) {
    const int p = support[a];
    f[a] = d.Fi[p];
    for (std::size_t c = 0; c < s; ++c)
      if (a != c) b[a * s + c] = -d.Fpq[p * n + support[c]];
    b[a * s + a] = p == 0 ? -(1.0 + delta0) * d.Fi[0] / lam[0] : 2.0 * d.Fi[p] / (lam[0] - lam[p]);
  }
  const double c = K / d.F;

  std::vector<double> beta(s), u(s * s);
  jacobi_eigen(b, s, beta, u); // descending; row p is the eigenvector
  std::vector<double> fp(s, 0.0);
  double fnorm2 = 0.0;
  for (std::size_t p = 0; p < s; ++p) {
    for (std::size_t i = 0; i < s; ++i) fp[p] += u[p * s + i] * f[i];
    fnorm2 += f[p] * f[p];
  }

  // ascending order of beta
  std::vector<std::size_t> order(s);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::reverse(order.begin(), order.end());

  const double deflate = 1e-13 * std::sqrt(fnorm2);
  std::vector<std::size_t> active;
  double best = INFINITY;
  std::size_t best_deflated = s;
  for (std::size_t p : order) {
    if (c == 0.0 || std::abs(fp[p]) <= deflate) {
      if (beta[p] < best) {
        best = beta[p];
        best_deflated = p;
      }
    } else {
      active.push_back(p);
    }
  }

  std::vector<double> xi_local(s, 0.0);
  bool from_root = false;
  double root = INFINITY;
  if (!active.empty()) {
    const double b0 = beta[active[0]];
    double active_norm2 = 0.0;
    for (std::size_t p : active) active_norm2 += fp[p] * fp[p];
    double lo = b0;
    double hi = b0 + c * active_norm2;
    if (active.size() > 1) hi = std::min(hi, beta[active[1]]);
    auto g = [&](double mu) {
      double acc = 1.0;
      for (std::size_t p : active) acc += c * fp[p] * fp[p] / (beta[p] - mu);
      return acc;
    };
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (g(mid) < 0.0) lo = mid;
      else hi = mid;
    }
    root = 0.5 * (lo + hi);
    if (root < best) {
      best = root;
      from_root = true;
    }
  }

  if (from_root) {
    std::vector<double> coef(s, 0.0);
    double norm = 0.0;
    for (std::size_t p : active) {
      const double gap = beta[p] - root;
      coef[p] = gap != 0.0 ? fp[p] / gap : 1.0;
      norm += coef[p] * coef[p];
    }
    norm = std::sqrt(norm);
    for (std::size_t p = 0; p < s; ++p)
      for (std::size_t i = 0; i < s; ++i) xi_local[i] += coef[p] / norm * u[p * s + i];
  } else {
    for (std::size_t i = 0; i < s; ++i) xi_local[i] = u[best_deflated * s + i];
  }

  WorstCase out;
  out.min_deficit = best;
  out.xi.assign(n, 0.0);
  for (std::size_t a = 0; a < s; ++a) out.xi[support[a]] = xi_local[a];
  return out;
}

RepresentationCheck sigma_n_representation_check(const EigenvalueVector& lam, std::span<const double> xi) {
  const int n = static_cast<int>(lam.size());
  require(n >= 3, ErrorKind::argument, "sigma_n_representation_check: need n >= 3");
  require(xi.size() == lam.size(), ErrorKind::argument, "sigma_n_representation_check: xi has wrong length");
  for (double v : lam.values())
    require(v != 0.0, ErrorKind::precondition, "sigma_n_representation_check: zero eigenvalue");
  require(in_cone(lam.values(), n - 1), ErrorKind::precondition,
          "sigma_n_representation_check: lambda is not in Gamma_{n-1}");
  const auto d = derivatives(lam);
  require(d.F != 0.0, ErrorKind::precondition, "sigma_n_representation_check: F vanishes");

  double mixed = 0.0, lin = 0.0;
  for (int p = 0; p < n; ++p) {
    lin += d.Fi[p] * xi[p];
    for (int q = 0; q < n; ++q)
      if (p != q) mixed += d.Fpq[p * n + q] * xi[p] * xi[q];
  }
  const double direct = -mixed + lin * lin / d.F;

  const double Lambda = -sigma(lam, n);
  double s2 = 0.0, q2 = 0.0, q3 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double l = lam[i];
    s2 += xi[i] / (l * l);
    q2 += xi[i] * xi[i] / (l * l);
    q3 += xi[i] * xi[i] / (l * l * l);
  }
  const double closed = Lambda * Lambda / d.F * s2 * s2 + d.F * q2 + 2.0 * Lambda * q3;
  return {std::abs(direct - closed), closed};
}

double fii_lambda_identity(const EigenvalueVector& lam, std::size_t i) {
  const int n = static_cast<int>(lam.size());
  require(i < lam.size(), ErrorKind::argument, "fii_lambda_identity: index out of range");
  require(lam[i] != 0.0, ErrorKind::precondition, "fii_lambda_identity: lambda_i = 0");
  const std::size_t ex[1] = {i};
  const double fii = sigma(lam.values(), n - 2, ex);
  const double F = sigma(lam, n - 1);
  const double Lambda = -sigma(lam, n);
  return fii - (F / lam[i] + Lambda / (lam[i] * lam[i]));
}

RankOneCertificate certificate_matrix(const EigenvalueVector& lam, int m, double delta0, double A) {
  const int n = static_cast<int>(lam.size());
  check_instance_shape(lam, m, "certificate_matrix");
  require(m < n, ErrorKind::branch, "certificate_matrix: full multiplicity has no negative entry");
  require(lam[n - 1] <= -A, ErrorKind::branch, "certificate_matrix: lambda_n > -A (semi-convex branch)");
  const double F = sigma(lam, n - 1);
  const double Lambda = -sigma(lam, n);
  require(Lambda > 0.0 && F > 0.0, ErrorKind::precondition, "certificate_matrix: need Lambda > 0 and F > 0");

  RankOneCertificate cert;
  const std::size_t size = static_cast<std::size_t>(n - m + 1);
  cert.y.assign(size, std::sqrt(Lambda / F));
  cert.d.reserve(size);
  cert.d.push_back((1.0 - delta0 - delta0 * F / std::pow(A, n - 1)) * lam[0]);
  for (int j = m; j < n; ++j) cert.d.push_back(2.0 * lam[0] * lam[j] / (lam[0] - lam[j]));
  return cert;
}

std::vector<double> leading_minors(std::span<const double> y, std::span<const double> d) {
  require(y.size() == d.size() && !y.empty(), ErrorKind::argument, "leading_minors: size mismatch");
  std::vector<double> out;
  double det_d = 1.0, acc = 1.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    require(d[j] != 0.0, ErrorKind::precondition, "leading_minors: singular D");
    det_d *= d[j];
    acc += y[j] * y[j] / d[j];
    out.push_back(det_d * acc);
  }
  return out;
}

DefiniteDecision rank_one_update_definite(std::span<const double> y, std::span<const double> d) {
  require(y.size() == d.size() && !y.empty(), ErrorKind::argument, "rank_one_update_definite: size mismatch");
  require(y.size() <= kMaxDim, ErrorKind::argument, "rank_one_update_definite: too large");
  const std::size_t s = d.size();
  DefiniteDecision out;
  int negatives = 0;
  double det_d = 1.0, acc = 1.0;
  for (std::size_t i = 0; i < s; ++i) {
    require(d[i] != 0.0 && std::isfinite(d[i]), ErrorKind::precondition, "rank_one_update_definite: singular D");
    if (d[i] < 0.0) ++negatives;
    det_d *= d[i];
    acc += y[i] * y[i] / d[i];
  }
  out.det_lemma = det_d * acc;
  out.definite = negatives == 0 || (negatives == 1 && out.det_lemma > 0.0);

  std::vector<double> mat(s * s), values(s), vectors(s * s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) mat[i * s + j] = y[i] * y[j] + (i == j ? d[i] : 0.0);
  jacobi_eigen(mat, s, values, vectors);
  out.min_eigenvalue = values[s - 1];
  out.eigen_definite = out.min_eigenvalue > 0.0;
  return out;
}

bool certificate_sound(const RankOneCertificate& cert, int n, int m) {
  const auto minors = leading_minors(cert.y, cert.d);
  const std::size_t through = static_cast<std::size_t>(n - m);
  for (std::size_t j = 0; j < through && j < minors.size(); ++j)
    if (!(minors[j] > 0.0)) return false;
  return minors.back() > 0.0;
}

} // namespace hesslab
