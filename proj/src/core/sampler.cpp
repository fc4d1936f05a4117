#include "core/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "core/error.hpp"

namespace hesslab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t index)
    : engine_(splitmix64(splitmix64(seed) ^ (index * 0x632be59bd9b4e019ULL))) {}

double SampleRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SampleRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double SampleRng::normal() {
  if (spare_normal_) {
    const double v = *spare_normal_;
    spare_normal_.reset();
    return v;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_normal_ = r * std::sin(2.0 * std::numbers::pi * u2);
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

int SampleRng::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

const char* to_string(SamplerProfile p) noexcept {
  switch (p) {
  case SamplerProfile::interior: return "interior";
  case SamplerProfile::near_boundary: return "near_boundary";
  case SamplerProfile::large_negative: return "large_negative";
  case SamplerProfile::clustered_top: return "clustered_top";
  case SamplerProfile::full_multiplicity: return "full_multiplicity";
  }
  return "unknown";
}

std::optional<SamplerProfile> parse_profile(std::string_view name) {
  for (auto p : {SamplerProfile::interior, SamplerProfile::near_boundary, SamplerProfile::large_negative,
                 SamplerProfile::clustered_top, SamplerProfile::full_multiplicity})
    if (name == to_string(p)) return p;
  return std::nullopt;
}

double cone_floor(std::span<const double> top) {
  double inv = 0.0;
  for (double t : top) inv += 1.0 / t;
  return -1.0 / inv;
}

namespace {

std::vector<double> sorted_top(std::vector<double> t) {
  std::sort(t.begin(), t.end(), std::greater<>());
  return t;
}

// One unnormalized candidate, or nullopt if the construction has to be redrawn.
std::optional<ConeSample> candidate(const SamplerConfig& cfg, SampleRng& rng) {
  const int n = cfg.n;
  std::vector<double> lam;
  int m = 1;

  switch (cfg.profile) {
  case SamplerProfile::interior: {
    std::vector<double> t(n - 1);
    for (double& x : t) x = std::exp(rng.uniform(-6.0, 6.0));
    t = sorted_top(std::move(t));
    const double floor = cone_floor(t);
    lam = t;
    lam.push_back(floor + rng.uniform(0.05, 1.0) * (t.back() - floor));
    break;
  }
  case SamplerProfile::near_boundary: {
    // Nearly equal top entries put lambda_n close to -lambda_1/(n-1).
    std::vector<double> t(n - 1, 1.0);
    for (int i = 1; i < n - 1; ++i) t[i] = 1.0 - 0.5 * std::pow(10.0, rng.uniform(-6.0, 0.0));
    t = sorted_top(std::move(t));
    const double floor = cone_floor(t);
    lam = t;
    lam.push_back(floor * (1.0 - std::pow(10.0, rng.uniform(-6.0, -1.0))));
    break;
  }
  case SamplerProfile::large_negative: {
    std::vector<double> t(n - 1);
    for (double& x : t) x = std::exp(rng.uniform(-1.0, 4.0));
    t = sorted_top(std::move(t));
    const double floor = cone_floor(t);
    lam = t;
    lam.push_back(floor * (1.0 - std::pow(10.0, rng.uniform(-6.0, 0.0))));
    break;
  }
  case SamplerProfile::clustered_top: {
    m = rng.integer(2, n);
    lam.assign(m, 1.0);
    if (m < n) {
      std::vector<double> rest(n - m - 1);
      for (double& x : rest) x = rng.uniform(0.02, 0.98);
      rest = sorted_top(std::move(rest));
      lam.insert(lam.end(), rest.begin(), rest.end());
      const double floor = cone_floor(lam);
      const double ceiling = lam.back();
      lam.push_back(floor + rng.uniform(0.02, 0.98) * (std::min(ceiling, 0.98) - floor));
    }
    break;
  }
  case SamplerProfile::full_multiplicity:
    m = n;
    lam.assign(n, 1.0);
    break;
  }

  if (!std::is_sorted(lam.begin(), lam.end(), std::greater<>())) return std::nullopt;
  EigenvalueVector v(std::move(lam));
  if (!in_cone(v.values(), n - 1)) return std::nullopt;
  return ConeSample{std::move(v), m, 1};
}

} // namespace

ConeSample sample_cone(const SamplerConfig& cfg, std::uint64_t seed, std::uint64_t index) {
  require(cfg.n >= 3 && cfg.n <= 16, ErrorKind::argument, "sample_cone: n must lie in [3, 16]");
  require(cfg.target > 0.0, ErrorKind::argument, "sample_cone: target must be positive");
  if (cfg.profile == SamplerProfile::large_negative)
    require(cfg.A > 0.0, ErrorKind::argument, "sample_cone: large_negative needs A > 0");

  SampleRng rng(seed, index);
  for (std::size_t attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    auto c = candidate(cfg, rng);
    if (!c) continue;
    if (cfg.normalize) {
      c->lambda = rescale(c->lambda, cfg.n - 1, cfg.target).lambda;
    } else if (cfg.profile != SamplerProfile::large_negative) {
      c->lambda = c->lambda.scaled(std::exp(rng.uniform(-3.0, 3.0)));
    }
    if (cfg.profile == SamplerProfile::large_negative && !(c->lambda[cfg.n - 1] <= -cfg.A)) continue;
    if (!in_cone(c->lambda.values(), cfg.n - 1)) continue;
    c->attempts = attempt;
    return std::move(*c);
  }
  fail(ErrorKind::sampler, std::string("sample_cone: profile ") + to_string(cfg.profile) +
                               " produced no admissible sample in " + std::to_string(cfg.max_attempts) +
                               " attempts");
}

EigenvalueVector sample_gamma_k(int n, int k, SampleRng& rng) {
  require(n >= 2 && k >= 1 && k <= n, ErrorKind::argument, "sample_gamma_k: need 1 <= k <= n");
  std::vector<double> d(n);
  for (double& x : d) x = rng.normal();
  auto shifted = [&](double t) {
    std::vector<double> v(d);
    for (double& x : v) x += t;
    return v;
  };
  // {t : d + t 1 in Gamma_k} is a half-line (t0, inf) since 1 lies in the convex cone.
  double hi = 1.0;
  while (!in_cone(shifted(hi), k)) hi *= 2.0;
  double lo = -hi;
  while (in_cone(shifted(lo), k)) lo *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (in_cone(shifted(mid), k) ? hi : lo) = mid;
  }
  const double margin = std::pow(10.0, rng.uniform(-6.0, 0.5));
  auto v = shifted(hi + margin);
  const double scale = std::exp(rng.uniform(-2.0, 2.0));
  for (double& x : v) x *= scale;
  std::sort(v.begin(), v.end(), std::greater<>());
  return EigenvalueVector(std::move(v));
}

std::vector<double> sphere_xi(int n, int m, SampleRng& rng) {
  std::vector<double> xi(n, 0.0);
  double norm = 0.0;
  while (norm == 0.0) {
    for (int i = 0; i < n; ++i) {
      if (i >= 1 && i < m) continue;
      xi[i] = rng.normal();
      norm += xi[i] * xi[i];
    }
  }
  norm = std::sqrt(norm);
  for (double& x : xi) x /= norm;
  return xi;
}

} // namespace hesslab
