#include <cmath>
#include <vector>

#include "core/sampler.hpp"
#include "core/spectral.hpp"
#include "support.hpp"

using namespace hesslab;

namespace {

SymMatrix random_sym(std::size_t n, SampleRng& rng, double scale = 1.0) {
  SymMatrix w(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) w.set(i, j, scale * rng.uniform(-1.0, 1.0));
  return w;
}

// Orthogonal matrix from Gram-Schmidt on a random square.
std::vector<double> random_orthogonal(std::size_t n, SampleRng& rng) {
  std::vector<double> q(n * n);
  for (auto& v : q) v = rng.normal();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t p = 0; p < r; ++p) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d += q[r * n + i] * q[p * n + i];
      for (std::size_t i = 0; i < n; ++i) q[r * n + i] -= d * q[p * n + i];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += q[r * n + i] * q[r * n + i];
    for (std::size_t i = 0; i < n; ++i) q[r * n + i] /= std::sqrt(norm);
  }
  return q;
}

} // namespace

TEST_CASE("storage is symmetric") {
  SymMatrix w(3);
  w.set(0, 2, 4.0);
  CHECK(w(2, 0) == 4.0);
  CHECK(testing::error_kind([] { SymMatrix::from_rows({{1.0, 2.0}, {3.0, 1.0}}); }) == ErrorKind::argument);
}

TEST_CASE("eigen_decompose examples") {
  const auto id = eigen_decompose(SymMatrix::identity(3));
  for (double v : id.lambda.values()) CHECK(v == doctest::Approx(1.0));

  const auto d = eigen_decompose(SymMatrix::diagonal({3.0, 1.0, 2.0}));
  CHECK(d.lambda[0] == doctest::Approx(3.0));
  CHECK(d.lambda[1] == doctest::Approx(2.0));
  CHECK(d.lambda[2] == doctest::Approx(1.0));
  CHECK(std::abs(d.vec(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(d.vec(1, 2)) == doctest::Approx(1.0));
  CHECK(std::abs(d.vec(2, 1)) == doctest::Approx(1.0));

  const auto t = eigen_decompose(SymMatrix::from_rows({{2.0, 1.0}, {1.0, 2.0}}));
  CHECK(t.lambda[0] == doctest::Approx(3.0));
  CHECK(t.lambda[1] == doctest::Approx(1.0));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(t.vec(0, 0) == doctest::Approx(r));
  CHECK(t.vec(0, 1) == doctest::Approx(r));
  // First non-negligible component is positive.
  CHECK(t.vec(1, 0) == doctest::Approx(r));
  CHECK(t.vec(1, 1) == doctest::Approx(-r));
}

TEST_CASE("eigen system invariants on random matrices") {
  for (std::size_t n = 2; n <= 8; ++n)
    for (std::uint64_t i = 0; i < 50; ++i) {
      SampleRng rng(21, i);
      const auto w = random_sym(n, rng, 5.0);
      const auto e = eigen_decompose(w);
      CHECK(e.lambda.sorted());
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          double dot = 0.0;
          for (std::size_t j = 0; j < n; ++j) dot += e.vec(a, j) * e.vec(b, j);
          CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-12);
        }
      CHECK((e.reconstruct() - w).frobenius() <= 1e-10 * w.frobenius());
    }
}

TEST_CASE("F_value examples") {
  const double a = 1.7;
  CHECK(F_value(a * SymMatrix::identity(3), 2) == doctest::Approx(3 * a * a));
  CHECK(F_value(SymMatrix::diagonal({1.0, 2.0, 3.0}), 2) == doctest::Approx(11.0));
  SampleRng rng(22, 0);
  const auto q = random_orthogonal(3, rng);
  CHECK(F_value(SymMatrix::diagonal({1.0, 2.0, 3.0}).congruence(q), 2) == doctest::Approx(11.0).epsilon(1e-12));
}

TEST_CASE("F_gradient_matrix") {
  const auto g = F_gradient_matrix(SymMatrix::diagonal({1.0, 2.0, 3.0}), 2);
  CHECK(g(0, 0) == doctest::Approx(5.0));
  CHECK(g(1, 1) == doctest::Approx(4.0));
  CHECK(g(2, 2) == doctest::Approx(3.0));
  CHECK(std::abs(g(0, 1)) < 1e-14);
  const auto gi = F_gradient_matrix(SymMatrix::identity(3), 2);
  CHECK(gi(0, 0) == doctest::Approx(2.0));
  CHECK(std::abs(gi(0, 2)) < 1e-14);

  for (std::uint64_t i = 0; i < 100; ++i) {
    SampleRng rng(23, i);
    const std::size_t n = static_cast<std::size_t>(rng.integer(3, 6));
    const int k = rng.integer(1, static_cast<int>(n));
    const auto w = random_sym(n, rng);
    const auto gm = F_gradient_matrix(w, k);
    double trace = 0.0;
    for (std::size_t j = 0; j < n; ++j) trace += gm(j, j);
    const double want = (n - k + 1) * sigma(eigen_decompose(w).lambda, k - 1);
    CHECK(std::abs(trace - want) <= 1e-10 * std::max(1.0, std::abs(want)));

    // First-derivative consistency.
    const auto dir = random_sym(n, rng);
    const double t = 1e-5;
    const double fd = (F_value(w + t * dir, k) - F_value(w - t * dir, k)) / (2 * t);
    const double exact = frobenius_inner(gm, dir);
    CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("F_second_quadratic_form examples") {
  const auto w = SymMatrix::diagonal({1.0, 2.0, 3.0});
  CHECK(F_second_quadratic_form(w, 2, SymMatrix::identity(3)) == doctest::Approx(6.0));
  SymMatrix e12(3);
  e12.set(0, 1, 1.0);
  CHECK(F_second_quadratic_form(w, 2, e12) == doctest::Approx(-2.0));
  CHECK(F_second_quadratic_form(w, 2, SymMatrix(3)) == 0.0);
}

TEST_CASE("second form handles eigenvalue ties by the analytic limit") {
  // W = I: every pair is tied; the form is d^2/dt^2 sigma_2(I + tA) = 2 sigma_2(A).
  SampleRng rng(24, 0);
  const auto a = random_sym(3, rng);
  const double form = F_second_quadratic_form(SymMatrix::identity(3), 2, a);
  CHECK(std::isfinite(form));
  CHECK(form == doctest::Approx(2.0 * F_value(a, 2)).epsilon(1e-10));
}

TEST_CASE("second form matches finite differences") {
  for (std::uint64_t i = 0; i < 100; ++i) {
    SampleRng rng(25, i);
    const std::size_t n = static_cast<std::size_t>(rng.integer(3, 6));
    const int k = rng.integer(2, static_cast<int>(n));
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = static_cast<double>(j) + 0.3 * rng.uniform();
    const auto q = random_orthogonal(n, rng);
    const auto w = SymMatrix::diagonal(d).congruence(q);
    const auto a = random_sym(n, rng);
    const double t = 1e-4;
    const double fd = (F_value(w + t * a, k) - 2 * F_value(w, k) + F_value(w - t * a, k)) / (t * t);
    const double exact = F_second_quadratic_form(w, k, a);
    const double scale = F_second_quadratic_form_scale(w, k, a);
    CHECK(std::abs(fd - exact) <= 1e-5 * std::max(scale, 1.0));
  }
}

TEST_CASE("spectral invariance") {
  for (std::uint64_t i = 0; i < 100; ++i) {
    SampleRng rng(26, i);
    const std::size_t n = static_cast<std::size_t>(rng.integer(2, 8));
    const int k = rng.integer(1, static_cast<int>(n));
    const auto w = random_sym(n, rng);
    const auto q = random_orthogonal(n, rng);
    const double f = F_value(w, k);
    double mag = 0.0;
    for (double v : eigen_decompose(w).lambda.values()) mag = std::max(mag, std::abs(v));
    CHECK(std::abs(F_value(w.congruence(q), k) - f) <= 1e-10 * std::max(std::abs(f), std::pow(mag, k)));
  }
}
