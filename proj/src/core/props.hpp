#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hesslab {

enum class PropertyGroup { symmetric, spectral, algebra };
const char* to_string(PropertyGroup g) noexcept;

struct PropsConfig {
  std::uint64_t seed = 20240917;
  std::size_t samples = 10000;        // per (n, k) for symmetric-function properties
  std::size_t matrix_samples = 1000;  // per spectral property, spread over n
  std::size_t algebra_samples = 10000;
  int n_min = 3;
  int n_max = 8;
  std::vector<PropertyGroup> groups = {PropertyGroup::symmetric, PropertyGroup::spectral, PropertyGroup::algebra};
  int threads = 1;
  bool inject_fault = false; // test hook: flips the sign of sigma_k(lambda|i) in the decomposition check
};

/// Worst case of one property over the samples of one (n, k) cell. Every
/// check is phrased as a violation that must not exceed the tolerance:
/// identities report their relative error, inequalities the amount by which
/// they fail (negative when they hold with room to spare).
struct PropertyRecord {
  std::string property;
  PropertyGroup group = PropertyGroup::symmetric;
  int n = 0;
  int k = 0; // 0 when the property has no order
  std::size_t checked = 0;
  double worst = -1e300;
  double tolerance = 0.0;
  std::vector<double> worst_sample;
  std::optional<double> empirical_min; // for existence-only constants
  bool passed() const { return checked > 0 && worst <= tolerance; }
};

struct PropsReport {
  std::vector<PropertyRecord> records;
  bool passed() const;
  std::vector<const PropertyRecord*> failures() const;
};

PropsReport run_property_suite(const PropsConfig& config);

void write_props_csv(std::ostream& os, const PropsReport& report);

} // namespace hesslab
