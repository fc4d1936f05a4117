#include <bit>
#include <cmath>
#include <vector>

#include "core/sampler.hpp"
#include "core/symmfunc.hpp"
#include "support.hpp"

using namespace hesslab;
using testing::error_kind;

TEST_CASE("sigma of small spectra") {
  const EigenvalueVector l123{1.0, 2.0, 3.0};
  CHECK(sigma(l123, 2) == doctest::Approx(11.0).epsilon(1e-15));
  CHECK(sigma(EigenvalueVector{1.0, 1.0, 1.0}, 3) == 1.0);
  CHECK(sigma(l123, 1, {0}) == 5.0);
  CHECK(sigma(EigenvalueVector{-4.0, 7.5, 0.25, 9.0}, 0) == 1.0);
  CHECK(sigma(l123, 3, {1}) == 0.0);
}

TEST_CASE("sigma rejects bad orders and indices") {
  const EigenvalueVector l{1.0, 2.0, 3.0};
  CHECK(error_kind([&] { sigma(l, -1); }) == ErrorKind::argument);
  CHECK(error_kind([&] { sigma(l, 4); }) == ErrorKind::argument);
  CHECK(error_kind([&] { sigma(l, 1, {3}); }) == ErrorKind::argument);
  CHECK(error_kind([] { EigenvalueVector{1.0}; }) == ErrorKind::argument);
  CHECK(error_kind([] { EigenvalueVector{1.0, NAN}; }) == ErrorKind::argument);
}

TEST_CASE("sigma agrees with subset enumeration") {
  SampleRng rng(7, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(2, 9);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-3.0, 3.0);
    for (int k = 0; k <= n; ++k)
      CHECK(testing::rel_err(sigma(std::span<const double>(x), k), testing::sigma_bruteforce(x, k)) < 1e-12);
  }
}

TEST_CASE("sigma_gradient") {
  CHECK(sigma_gradient(EigenvalueVector{1.0, 2.0, 3.0}, 2) == std::vector<double>{5.0, 4.0, 3.0});
  CHECK(sigma_gradient(EigenvalueVector{1.0, 1.0, 1.0}, 3) == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(sigma_gradient(EigenvalueVector{3.0, 2.0, 1.0}, 3) == std::vector<double>{2.0, 3.0, 6.0});
  CHECK(error_kind([] { sigma_gradient(EigenvalueVector{1.0, 2.0}, 0); }) == ErrorKind::argument);
}

TEST_CASE("sigma_hessian") {
  const auto h2 = sigma_hessian(EigenvalueVector{1.0, 2.0, 3.0}, 2);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) CHECK(h2[p * 3 + q] == (p == q ? 0.0 : 1.0));
  const auto h3 = sigma_hessian(EigenvalueVector{1.0, 2.0, 3.0}, 3);
  CHECK(h3[0 * 3 + 1] == 3.0);
  CHECK(h3[1 * 3 + 0] == 3.0);
  CHECK(h3[4] == 0.0);
  CHECK(error_kind([] { sigma_hessian(EigenvalueVector{1.0, 2.0, 3.0}, 1); }) == ErrorKind::argument);
}

TEST_CASE("in_cone") {
  const auto a = in_cone(EigenvalueVector{3.0, 1.0, -0.5}, 2);
  CHECK(a.member);
  CHECK_FALSE(a.first_failing_order);
  REQUIRE(a.margins.size() == 2);
  CHECK(a.margins[0] == doctest::Approx(3.5));
  CHECK(a.margins[1] == doctest::Approx(1.0));

  const auto b = in_cone(EigenvalueVector{5.0, 1.0, -1.0}, 2);
  CHECK_FALSE(b.member);
  REQUIRE(b.first_failing_order);
  CHECK(*b.first_failing_order == 2);
  CHECK(b.margins.back() == doctest::Approx(-1.0));

  CHECK(in_cone(EigenvalueVector{1.0, 1.0, 1.0}, 3).member);
  // The cone is open: a vanishing sigma_k is outside.
  CHECK_FALSE(in_cone(EigenvalueVector{1.0, 0.0, 0.0}, 2).member);
}

TEST_CASE("newton_maclaurin_gap") {
  const EigenvalueVector ones{1.0, 1.0, 1.0};
  CHECK(std::abs(newton_maclaurin_gap(ones, 3, 1, 2, 0)) < 1e-14);
  CHECK(std::abs(newton_maclaurin_gap(ones, 2, 0, 1, 0)) < 1e-14);
  CHECK(newton_maclaurin_gap(EigenvalueVector{1.0, 2.0, 3.0}, 2, 0, 1, 0) ==
        doctest::Approx(2.0 - std::sqrt(11.0 / 3.0)).epsilon(1e-12));
  CHECK(newton_maclaurin_gap(EigenvalueVector{2.0, 1.0}, 2, 1, 1, 0) >= 0.0);
  CHECK(error_kind([] { newton_maclaurin_gap(EigenvalueVector{5.0, 1.0, -1.0}, 2, 0, 1, 0); }) ==
        ErrorKind::precondition);
}

TEST_CASE("sigma_quotient") {
  CHECK(sigma_quotient(EigenvalueVector{1.0, 1.0, 1.0}, 2) == doctest::Approx(1.0));
  CHECK(sigma_quotient(EigenvalueVector{1.0, 2.0, 3.0}, 2) == doctest::Approx(11.0 / 6.0).epsilon(1e-15));
  CHECK(sigma_quotient(EigenvalueVector{3.0, 2.0, 1.0}, 3) == doctest::Approx(6.0 / 11.0).epsilon(1e-15));
  CHECK(error_kind([] { sigma_quotient(EigenvalueVector{-1.0, -2.0, 0.5}, 2); }) == ErrorKind::precondition);
}

TEST_CASE("rescale") {
  const auto same = rescale(EigenvalueVector{1.0, 1.0, 1.0}, 2, 3.0);
  CHECK(same.scale == doctest::Approx(1.0));
  const auto twice = rescale(EigenvalueVector{1.0, 1.0, 1.0}, 2, 12.0);
  CHECK(twice.scale == doctest::Approx(2.0));
  for (double v : twice.lambda.values()) CHECK(v == doctest::Approx(2.0));
  const auto r = rescale(EigenvalueVector{1.0, 2.0, 3.0}, 2, 1.0);
  CHECK(r.scale == doctest::Approx(1.0 / std::sqrt(11.0)).epsilon(1e-14));
  CHECK(sigma(r.lambda, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(error_kind([] { rescale(EigenvalueVector{5.0, 1.0, -1.0}, 2, 1.0); }) == ErrorKind::precondition);
}

TEST_CASE("decomposition, summation and homogeneity on random cone samples") {
  for (int n = 3; n <= 8; ++n) {
    for (int k = 1; k <= n; ++k) {
      for (std::uint64_t i = 0; i < 100; ++i) {
        SampleRng rng(11, i);
        const auto lam = sample_gamma_k(n, k, rng);
        CHECK(in_cone(lam, k).member);
        const double sk = sigma(lam, k);
        std::vector<double> mag(lam.values().begin(), lam.values().end());
        for (auto& v : mag) v = std::abs(v);
        // Condition scale of the sum: sigma_k of the magnitudes.
        const double ska = sigma(std::span<const double>(mag), k), sk1a = sigma(std::span<const double>(mag), k - 1);
        double sum_excl = 0.0;
        for (std::size_t j = 0; j < lam.size(); ++j) {
          const double split = sigma(lam, k, {j}) + lam[j] * sigma(lam, k - 1, {j});
          CHECK(std::abs(split - sk) <= 1e-12 * ska);
          sum_excl += sigma(lam, k - 1, {j});
        }
        const double sk1 = sigma(lam, k - 1);
        CHECK(std::abs(sum_excl - (n - k + 1) * sk1) <= 1e-12 * (n - k + 1) * sk1a);
        for (double t : {0.5, 2.0, 10.0})
          CHECK(std::abs(sigma(lam.scaled(t), k) - std::pow(t, k) * sk) <= 1e-12 * std::pow(t, k) * ska);
      }
    }
  }
}

TEST_CASE("gradient ordering on sorted cone samples") {
  for (int n = 3; n <= 6; ++n)
    for (int k = 2; k <= n; ++k)
      for (std::uint64_t i = 0; i < 200; ++i) {
        SampleRng rng(12, i);
        const auto lam = sample_gamma_k(n, k, rng);
        REQUIRE(lam.sorted());
        const auto g = sigma_gradient(lam, k);
        CHECK(g[0] > 0.0);
        for (int j = 0; j + 1 < n; ++j) CHECK(g[j] <= g[j + 1] * (1 + 1e-12) + 1e-300);
      }
}
