#include "core/props.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "core/concavity.hpp"
#include "core/error.hpp"
#include "core/format.hpp"
#include "core/parallel.hpp"
#include "core/sampler.hpp"
#include "core/spectral.hpp"
#include "core/symmfunc.hpp"

namespace hesslab {

const char* to_string(PropertyGroup g) noexcept {
  switch (g) {
  case PropertyGroup::symmetric: return "symmetric";
  case PropertyGroup::spectral: return "spectral";
  case PropertyGroup::algebra: return "algebra";
  }
  return "unknown";
}

bool PropsReport::passed() const {
  return !records.empty() && std::all_of(records.begin(), records.end(), [](const auto& r) { return r.passed(); });
}

std::vector<const PropertyRecord*> PropsReport::failures() const {
  std::vector<const PropertyRecord*> out;
  for (const auto& r : records)
    if (!r.passed()) out.push_back(&r);
  return out;
}

namespace {

constexpr double kIdentityTol = 1e-12;
constexpr double kSlack = 1e-10;
constexpr double kAlgebraEntryFloor = 1e-3;

// Records of one (group, n, k) cell, in first-use order.
class Cell {
public:
  Cell(PropertyGroup group, int n, int k) : group_(group), n_(n), k_(k) {}

  void check(const char* name, double violation, double tol, std::span<const double> sample) {
    auto& r = record(name, tol);
    ++r.checked;
    if (violation > r.worst || std::isnan(violation)) {
      r.worst = std::isnan(violation) ? std::numeric_limits<double>::infinity() : violation;
      r.worst_sample.assign(sample.begin(), sample.end());
    }
  }

  // Existence-only constant: passes while every observed ratio is positive.
  void constant(const char* name, double ratio, std::span<const double> sample) {
    check(name, -ratio, 0.0, sample);
    auto& r = record(name, 0.0);
    r.empirical_min = r.empirical_min ? std::min(*r.empirical_min, ratio) : ratio;
  }

  std::vector<PropertyRecord> take() { return std::move(records_); }

private:
  PropertyRecord& record(const char* name, double tol) {
    for (auto& r : records_)
      if (r.property == name) return r;
    PropertyRecord r;
    r.property = name;
    r.group = group_;
    r.n = n_;
    r.k = k_;
    r.tolerance = tol;
    records_.push_back(std::move(r));
    return records_.back();
  }

  PropertyGroup group_;
  int n_, k_;
  std::vector<PropertyRecord> records_;
};

std::vector<double> abs_of(std::span<const double> v) {
  std::vector<double> a(v.begin(), v.end());
  for (double& x : a) x = std::abs(x);
  return a;
}

double rel(double err, double scale) { return err / std::max(scale, std::numeric_limits<double>::min()); }

std::uint64_t cell_index(int n, int k, std::size_t i) {
  return (static_cast<std::uint64_t>(n) << 56) ^ (static_cast<std::uint64_t>(k) << 48) ^ i;
}

void symmetric_sample(Cell& cell, const EigenvalueVector& lam, const EigenvalueVector& mu, int k, bool fault) {
  const int n = static_cast<int>(lam.size());
  const auto v = lam.values();
  const auto a = abs_of(v);
  const auto s = sigma_all(v, n);
  const auto sa = sigma_all(a, n);

  // Decomposition along one entry
  {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t ex[1] = {static_cast<std::size_t>(i)};
      double rest = sigma(v, k, ex);
      if (fault) rest = -rest;
      const double lhs = rest + v[i] * sigma(v, k - 1, ex);
      worst = std::max(worst, rel(std::abs(s[k] - lhs), sa[k]));
    }
    cell.check("decomposition", worst, kIdentityTol, v);
  }
  const auto grad = sigma_gradient(v, k);
  const auto grad_abs = sigma_gradient(a, k);
  // Sum of the partial derivatives
  {
    double sum = 0.0;
    for (double g : grad) sum += g;
    const double c = n - k + 1.0;
    cell.check("summation", rel(std::abs(sum - c * s[k - 1]), c * sa[k - 1]), kIdentityTol, v);
  }
  // Lower bound on the gradient sum of sigma_k^{1/k}
  {
    const double total = (n - k + 1.0) * s[k - 1] * std::pow(s[k], 1.0 / k - 1.0) / k;
    const double bound = std::pow(binomial(n, k), 1.0 / k);
    cell.check("gradient_sum_bound", (bound - total) / std::max(1.0, bound), kSlack, v);
  }
  // Concavity of sigma_k^{1/k}
  {
    std::vector<double> mid(n);
    for (int i = 0; i < n; ++i) mid[i] = 0.5 * (v[i] + mu[i]);
    const double fm = std::pow(sigma(mid, k), 1.0 / k);
    const double avg = 0.5 * (std::pow(s[k], 1.0 / k) + std::pow(sigma(mu, k), 1.0 / k));
    cell.check("midpoint_concavity", (avg - fm) / std::max(1.0, avg), kSlack, v);
  }
  // Partial derivatives are positive and ordered opposite to lambda
  {
    double worst = -grad[0] / std::max(1.0, grad_abs[0]);
    for (int i = 0; i + 1 < n; ++i)
      worst = std::max(worst, (grad[i] - grad[i + 1]) / std::max(1.0, grad_abs[i] + grad_abs[i + 1]));
    cell.check("gradient_ordering", worst, kSlack, v);
  }
  // Negative entries are bounded by lambda_1
  {
    double worst = -std::numeric_limits<double>::infinity();
    const double bound = (n - k) / static_cast<double>(k) * v[0];
    for (int i = 0; i < n; ++i)
      if (v[i] <= 0.0) worst = std::max(worst, (-v[i] - bound) / std::max(1.0, v[0]));
    if (std::isfinite(worst)) cell.check("negative_entry_bound", worst, kSlack, v);
  }
  // sigma_l >= C lambda_1 ... lambda_l for l < k with an unnamed C > 0; report the observed one.
  {
    double prod = 1.0;
    for (int l = 1; l < k; ++l) {
      prod *= v[l - 1];
      cell.constant("partial_product_lower", s[l] / prod, v);
    }
  }
  // lambda_1 sigma_{k-1}(lambda|1) >= C sigma_k, same treatment
  cell.constant("lambda1_gradient_ratio", v[0] * grad[0] / s[k], v);
  // Weighted square bound
  {
    double lhs = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
      lhs += v[i] * v[i] * grad[i];
      scale += v[i] * v[i] * grad_abs[i];
    }
    const double rhs = k / static_cast<double>(n) * s[1] * s[k];
    cell.check("weighted_square", (rhs - lhs) / std::max(1.0, scale), kSlack, v);
  }
  // Few negative entries, positive tail
  {
    int negatives = 0;
    double tail = 0.0, tail_abs = 0.0, size = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) negatives += v[i] < 0.0;
    for (int i = k - 1; i < n; ++i) {
      tail += v[i];
      tail_abs += a[i];
    }
    for (int i = k; i < n; ++i) size = std::max(size, (a[i] - n * v[k - 1]) / std::max(1.0, v[0]));
    cell.check("negative_count", negatives - (n - k), 0.0, v);
    cell.check("tail_sum_positive", -tail / std::max(1.0, tail_abs), 0.0, v);
    if (std::isfinite(size)) cell.check("tail_entry_bound", size, kSlack, v);
  }
  // sigma_k <= C(n,k) lambda_1 ... lambda_k
  {
    double prod = 1.0;
    for (int i = 0; i < k; ++i) prod *= v[i];
    const double bound = binomial(n, k) * prod;
    cell.check("product_upper", (s[k] - bound) / std::max(1.0, bound), kSlack, v);
  }
  // Generalized Newton-Maclaurin for every admissible (m, l, r, s) with m <= k.
  {
    std::vector<double> e(k + 1);
    for (int j = 0; j <= k; ++j) e[j] = s[j] / binomial(n, j);
    double worst = -std::numeric_limits<double>::infinity();
    for (int m = 1; m <= k; ++m)
      for (int l = 0; l < m; ++l)
        for (int r = 1; r <= m; ++r)
          for (int q = 0; q < r && q <= l; ++q) {
            const double lhs = std::pow(e[m] / e[l], 1.0 / (m - l));
            const double rhs = std::pow(e[r] / e[q], 1.0 / (r - q));
            worst = std::max(worst, (lhs - rhs) / std::max(1.0, rhs));
          }
    cell.check("newton_maclaurin", worst, kSlack, v);
  }
  // Homogeneity
  {
    double worst = 0.0;
    for (double t : {0.5, 2.0, 10.0}) {
      const double tk = std::pow(t, k);
      worst = std::max(worst, rel(std::abs(sigma(lam.scaled(t), k) - tk * s[k]), tk * sa[k]));
    }
    cell.check("homogeneity", worst, kIdentityTol, v);
  }
}

std::vector<double> random_orthogonal(int n, SampleRng& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  std::vector<double> out(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i * n + j] = q(i, j);
  return out;
}

// Random symmetric matrix Q^T diag(lambda) Q with spectrum gaps of at least 0.1.
SymMatrix separated_matrix(int n, SampleRng& rng, std::vector<double>& spectrum) {
  spectrum.resize(n);
  double x = rng.uniform(-3.0, 0.0);
  for (int i = 0; i < n; ++i) {
    spectrum[i] = x;
    x += rng.uniform(0.1, 1.5);
  }
  const auto q = random_orthogonal(n, rng);
  return SymMatrix::diagonal(spectrum).congruence(q);
}

SymMatrix random_direction(int n, SampleRng& rng) {
  SymMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) a.set(i, j, rng.normal());
  return a;
}

void spectral_sample(Cell& cell, int n, int k, SampleRng& rng) {
  std::vector<double> spectrum;
  const SymMatrix w = separated_matrix(n, rng, spectrum);
  const SymMatrix a = random_direction(n, rng);
  const double abs_scale = sigma(abs_of(spectrum), k);

  const auto eig = eigen_decompose(w);
  {
    double worst = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += eig.vec(p, i) * eig.vec(q, i);
        worst = std::max(worst, std::abs(dot - (p == q ? 1.0 : 0.0)));
      }
    cell.check("eigen_orthonormality", worst, 1e-12, spectrum);
    cell.check("eigen_reconstruction", (eig.reconstruct() - w).frobenius() / w.frobenius(), 1e-10, spectrum);
  }

  // Second-derivative formula against a central second difference.
  {
    const double t = 1e-4;
    const double fp = F_value(w + t * a, k), f0 = F_value(w, k), fm = F_value(w - t * a, k);
    const double fd = (fp - 2.0 * f0 + fm) / (t * t);
    const double form = F_second_quadratic_form(w, k, a);
    const double scale = std::max(F_second_quadratic_form_scale(w, k, a), std::abs(form));
    cell.check("second_derivative_form", rel(std::abs(fd - form), scale), 1e-5, spectrum);

    const double fd1 = (fp - fm) / (2.0 * t);
    const SymMatrix g = F_gradient_matrix(w, k);
    const double inner = frobenius_inner(g, a);
    double inner_scale = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) inner_scale += std::abs(g(i, j) * a(i, j));
    cell.check("gradient_first_derivative", rel(std::abs(fd1 - inner), inner_scale), 1e-6, spectrum);
  }
  {
    const auto q = random_orthogonal(n, rng);
    const double f = F_value(w, k), fq = F_value(w.congruence(q), k);
    cell.check("spectral_invariance", rel(std::abs(f - fq), abs_scale), 1e-10, spectrum);
  }
  // Ordered gradient of sigma_k^{1/k} on a cone sample.
  {
    const auto lam = sample_gamma_k(n, k, rng);
    const auto g = sigma_gradient(lam, k);
    const double factor = std::pow(sigma(lam, k), 1.0 / k - 1.0) / k;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n; ++i)
      worst = std::max(worst, factor * (g[i] - g[i + 1]) / std::max(1.0, factor * (std::abs(g[i]) + std::abs(g[i + 1]))));
    cell.check("concave_gradient_ordering", worst, kSlack, lam.values());
  }
}

bool algebra_sample(Cell& cell, int n, std::uint64_t seed, std::size_t i) {
  static constexpr SamplerProfile profiles[] = {SamplerProfile::interior, SamplerProfile::near_boundary,
                                                SamplerProfile::large_negative};
  SamplerConfig sc;
  sc.n = n;
  sc.profile = profiles[i % 3];
  sc.A = BranchConstants::reference(n).A;
  const auto s = sample_cone(sc, seed, i);
  SampleRng rng(seed ^ 0xa1ba5eedULL, i);
  // The closed form cancels like (lambda_1 / min |lambda_i|)^2; keep the
  // instances where double precision can resolve it.
  for (double x : s.lambda.values())
    if (std::abs(x) < kAlgebraEntryFloor * s.lambda[0]) return false;

  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const std::size_t ex[1] = {static_cast<std::size_t>(j)};
    const double fii = sigma(s.lambda.values(), n - 2, ex);
    worst = std::max(worst, std::abs(fii_lambda_identity(s.lambda, j)) / (1.0 + std::abs(fii)));
  }
  cell.check("fii_identity", worst, 1e-10, s.lambda.values());

  std::vector<double> xi(n);
  for (double& x : xi) x = rng.normal();
  const auto rep = sigma_n_representation_check(s.lambda, xi);
  cell.check("sigma_n_representation", rep.difference / (1.0 + std::abs(rep.closed_form)), 1e-10, s.lambda.values());
  return true;
}

void determinant_sample(Cell& cell, int size, SampleRng& rng) {
  std::vector<double> y(size), d(size);
  for (double& x : y) x = rng.normal();
  for (double& x : d) x = (rng.uniform() < 0.3 ? -1.0 : 1.0) * std::exp(rng.uniform(-2.0, 2.0));

  Eigen::MatrixXd m(size, size);
  double det_d = 1.0, acc = 1.0;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) m(i, j) = y[i] * y[j] + (i == j ? d[i] : 0.0);
    det_d *= d[i];
    acc += y[i] * y[i] / d[i];
  }
  std::vector<double> sample(y);
  sample.insert(sample.end(), d.begin(), d.end());
  const double direct = m.partialPivLu().determinant();
  cell.check("determinant_lemma", std::abs(direct - det_d * acc) / (1.0 + std::abs(det_d)), 1e-10, sample);

  const auto decision = rank_one_update_definite(y, d);
  cell.check("definite_decision_agrees", decision.agrees() ? 0.0 : 1.0, 0.0, sample);
}

bool has_group(const PropsConfig& cfg, PropertyGroup g) {
  return std::find(cfg.groups.begin(), cfg.groups.end(), g) != cfg.groups.end();
}

} // namespace

PropsReport run_property_suite(const PropsConfig& cfg) {
  require(cfg.samples > 0 && cfg.matrix_samples > 0 && cfg.algebra_samples > 0, ErrorKind::config,
          "verify-props: sample counts must be positive");
  require(cfg.n_min >= 3 && cfg.n_max <= 8 && cfg.n_min <= cfg.n_max, ErrorKind::config,
          "verify-props: n range must lie within [3, 8]");

  struct Task {
    PropertyGroup group;
    int n, k;
  };
  std::vector<Task> tasks;
  if (has_group(cfg, PropertyGroup::symmetric))
    for (int n = cfg.n_min; n <= cfg.n_max; ++n)
      for (int k = 1; k <= n; ++k) tasks.push_back({PropertyGroup::symmetric, n, k});
  if (has_group(cfg, PropertyGroup::spectral))
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) tasks.push_back({PropertyGroup::spectral, n, 0});
  if (has_group(cfg, PropertyGroup::algebra)) {
    for (int n = std::max(3, cfg.n_min); n <= std::min(5, cfg.n_max); ++n)
      tasks.push_back({PropertyGroup::algebra, n, 0});
    tasks.push_back({PropertyGroup::algebra, 0, 0}); // determinant lemma, sizes 1..8
  }

  std::vector<std::vector<PropertyRecord>> results(tasks.size());
  const int n_count = cfg.n_max - cfg.n_min + 1;
  parallel_for(tasks.size(), cfg.threads, [&](std::size_t t) {
    const auto& task = tasks[t];
    Cell cell(task.group, task.n, task.k);
    switch (task.group) {
    case PropertyGroup::symmetric:
      for (std::size_t i = 0; i < cfg.samples; ++i) {
        SampleRng rng(cfg.seed, cell_index(task.n, task.k, i));
        const auto lam = sample_gamma_k(task.n, task.k, rng);
        const auto mu = sample_gamma_k(task.n, task.k, rng);
        symmetric_sample(cell, lam, mu, task.k, cfg.inject_fault);
      }
      break;
    case PropertyGroup::spectral: {
      const std::size_t share = std::max<std::size_t>(1, (cfg.matrix_samples + n_count - 1) / n_count);
      for (std::size_t i = 0; i < share; ++i) {
        SampleRng rng(cfg.seed ^ 0x5bec7a1ULL, cell_index(task.n, 0, i));
        const int k = 2 + static_cast<int>(i % (task.n - 1));
        spectral_sample(cell, task.n, k, rng);
      }
      break;
    }
    case PropertyGroup::algebra:
      if (task.n > 0) {
        const int alg_count = std::min(5, cfg.n_max) - std::max(3, cfg.n_min) + 1;
        const std::size_t share = std::max<std::size_t>(1, (cfg.algebra_samples + alg_count - 1) / alg_count);
        // Draw until `share` instances pass the entry floor.
        std::size_t accepted = 0;
        for (std::size_t i = 0; accepted < share && i < 100 * share; ++i)
          accepted += algebra_sample(cell, task.n, cfg.seed ^ cell_index(task.n, 0, 0), i);
      } else {
        for (std::size_t i = 0; i < cfg.algebra_samples; ++i) {
          SampleRng rng(cfg.seed ^ 0xde7e1aULL, i);
          determinant_sample(cell, 1 + static_cast<int>(i % 8), rng);
        }
      }
      break;
    }
    results[t] = cell.take();
  });

  PropsReport report;
  for (auto& r : results)
    for (auto& rec : r) report.records.push_back(std::move(rec));
  return report;
}

void write_props_csv(std::ostream& os, const PropsReport& report) {
  os << "group,property,n,k,checked,worst_violation,tolerance,passed,empirical_min,worst_sample\n";
  for (const auto& r : report.records) {
    os << to_string(r.group) << ',' << r.property << ',' << r.n << ',' << r.k << ',' << r.checked << ','
       << fmt(r.worst) << ',' << fmt(r.tolerance) << ',' << (r.passed() ? "true" : "false") << ','
       << (r.empirical_min ? fmt(*r.empirical_min) : "") << ',';
    write_joined(os, r.worst_sample, ';');
    os << '\n';
  }
}

} // namespace hesslab
