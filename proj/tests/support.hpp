#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <doctest.h>

#include "core/error.hpp"

namespace testing {

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

template <class Fn>
hesslab::ErrorKind error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const hesslab::Error& e) {
    return e.kind();
  }
  FAIL("expected a hesslab::Error");
  return hesslab::ErrorKind::argument;
}

// Brute-force sigma_k: sum over all k-subsets of the kept entries.
inline double sigma_bruteforce(std::span<const double> x, int k) {
  const std::size_t n = x.size();
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) p *= x[i];
    total += p;
  }
  return total;
}

} // namespace testing
