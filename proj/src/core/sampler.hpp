#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "core/symmfunc.hpp"

namespace hesslab {

/// Per-sample random stream. Sample i of a run with seed s always sees the
/// same numbers, independent of how samples are split across threads.
class SampleRng {
public:
  SampleRng(std::uint64_t seed, std::uint64_t index);

  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();
  int integer(int lo, int hi);            // inclusive

private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

std::uint64_t splitmix64(std::uint64_t x);

enum class SamplerProfile { interior, near_boundary, large_negative, clustered_top, full_multiplicity };

const char* to_string(SamplerProfile p) noexcept;
std::optional<SamplerProfile> parse_profile(std::string_view name);

struct SamplerConfig {
  int n = 3;
  SamplerProfile profile = SamplerProfile::interior;
  bool normalize = true;          // rescale to sigma_{n-1} = target
  double target = 1.0;
  double A = 0.0;                 // large_negative emits lambda_n <= -A
  std::size_t max_attempts = 1'000'000;
};

struct ConeSample {
  EigenvalueVector lambda; // descending, in Gamma_{n-1}
  int m = 1;               // lambda_1 = ... = lambda_m exactly
  std::size_t attempts = 1;
};

/// Sample `index` of the stream (seed, config). Every sample lies in
/// Gamma_{n-1}; lambda_n is placed relative to the exact cone boundary
///   lambda_n > -1 / sum_{i<n} 1/lambda_i
/// which is the binding constraint once the top n-1 entries are positive.
ConeSample sample_cone(const SamplerConfig& config, std::uint64_t seed, std::uint64_t index);

/// Lower edge of the admissible lambda_n for positive top entries.
double cone_floor(std::span<const double> top);

/// Sample of Gamma_k for general k: a random direction shifted along
/// (1, ..., 1) past the cone boundary by a log-uniform margin, then scaled.
/// Covers both the deep interior and the boundary layer.
EigenvalueVector sample_gamma_k(int n, int k, SampleRng& rng);

/// Uniform unit vector on the coordinates {0} u {m, ..., n-1}.
std::vector<double> sphere_xi(int n, int m, SampleRng& rng);

} // namespace hesslab
