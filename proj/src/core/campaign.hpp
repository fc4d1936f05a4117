#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "core/concavity.hpp"
#include "core/sampler.hpp"

namespace hesslab {

inline constexpr std::uint64_t kDefaultSeed = 20240917;
inline constexpr double kDeficitTolerance = 1e-9;

std::vector<SamplerProfile> default_profiles();

struct CampaignConfig {
  int n = 3;
  std::vector<SamplerProfile> profiles = default_profiles();
  std::size_t samples = 100000; // total, dealt round-robin over the profiles
  std::uint64_t seed = kDefaultSeed;
  BranchConstants constants;    // validated against n before sampling
  int threads = 1;
};

struct CampaignRow {
  SamplerProfile profile = SamplerProfile::interior;
  int m = 1;
  std::vector<double> lambda;
  std::vector<double> xi;
  Branch branch = Branch::semiconvex;
  double deficit = 0.0;        // at the sampled xi
  double worst_deficit = 0.0;  // minimum over unit admissible xi
  double worst_deficit_k1 = 0.0; // same with K = 1, nonsemiconvex rows only (NaN elsewhere)
  std::optional<bool> certificate_ok;
};

struct BranchStats {
  std::size_t count = 0;
  std::size_t gated_count = 0; // rows with lambda_1 >= C_lambda1
  double min_deficit;
  double min_worst;
  double gated_min_deficit;
  double gated_min_worst;
  BranchStats();
};

struct CampaignResult {
  CampaignConfig config;
  std::vector<CampaignRow> rows;
  std::array<BranchStats, 3> branches; // indexed by Branch
  BranchStats overall;
  double min_worst_k1;                 // K = 1 form over nonsemiconvex rows
  std::size_t certificate_failures = 0;
  bool passed = false;
};

/// Samples, evaluates and aggregates. Sample i depends only on (seed, i), so
/// the rows are identical for any thread count.
/// Passes iff every row with lambda_1 >= C_lambda1 has deficit and worst-case
/// deficit >= -kDeficitTolerance and every nonsemiconvex certificate is sound.
CampaignResult run_concavity_campaign(const CampaignConfig& config);

void write_campaign_csv(std::ostream& os, const CampaignResult& result);
void write_campaign_summary(std::ostream& os, const CampaignResult& result);

struct ConstantGrid {
  std::vector<double> delta0 = {1.0 / 30.0, 1.0 / 15.0, 1.0 / 10.0};
  std::vector<double> K_factor = {1.0, 2.0, 10.0}; // multiples of (k+1)^2
  std::vector<double> C_lambda1 = {10.0, 100.0, 1000.0};
};

struct SearchConfig {
  int n = 3;
  std::vector<SamplerProfile> profiles = default_profiles();
  std::size_t samples = 10000;
  std::uint64_t seed = kDefaultSeed;
  ConstantGrid grid;
  int threads = 1;
};

struct GridPoint {
  double delta0 = 0.0;
  double K = 0.0;
  double C_lambda1 = 0.0;
  bool reference = false; // the (delta0, K, C_lambda1 = A) triple of BranchConstants::reference
  std::size_t count = 0;     // samples with lambda_1 >= C_lambda1
  double min_deficit = 0.0;  // worst-case deficit over those samples
  bool verified = false;     // count > 0 and min_deficit >= -kDeficitTolerance
};

struct ConstantSearch {
  std::vector<GridPoint> grid;
  std::size_t chosen = 0;   // least restrictive verified point, else the best one
  bool verified = false;
  BranchConstants constants;
  double min_deficit = 0.0;
};

/// Grid search over (delta0, K, C_lambda1) with the reference pair always
/// included (at C_lambda1 = A). Least restrictive means smallest C_lambda1,
/// then smallest K, then largest delta0.
ConstantSearch search_constants(const SearchConfig& config);

void write_search_csv(std::ostream& os, const ConstantSearch& search);

} // namespace hesslab
