#include "core/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "core/error.hpp"
#include "core/format.hpp"
#include "core/parallel.hpp"

namespace hesslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kXiStream = 0x5851f42d4c957f2dULL;

std::vector<double> sample_xi(int n, int m, std::uint64_t seed, std::uint64_t index) {
  SampleRng rng(seed ^ kXiStream, index);
  // One draw in ten is an admissible axis vector.
  if (rng.uniform() < 0.1) {
    const int free_coords = n - m + 1;
    int pick = rng.integer(0, free_coords - 1);
    std::vector<double> xi(n, 0.0);
    xi[pick == 0 ? 0 : m + pick - 1] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return xi;
  }
  return sphere_xi(n, m, rng);
}

void absorb(BranchStats& s, const CampaignRow& row, double C) {
  ++s.count;
  s.min_deficit = std::min(s.min_deficit, row.deficit);
  s.min_worst = std::min(s.min_worst, row.worst_deficit);
  if (row.lambda[0] >= C) {
    ++s.gated_count;
    s.gated_min_deficit = std::min(s.gated_min_deficit, row.deficit);
    s.gated_min_worst = std::min(s.gated_min_worst, row.worst_deficit);
  }
}

nlohmann::json stats_json(const BranchStats& s) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  return {{"count", s.count},
          {"gated_count", s.gated_count},
          {"min_deficit", num(s.min_deficit)},
          {"min_worst_deficit", num(s.min_worst)},
          {"gated_min_deficit", num(s.gated_min_deficit)},
          {"gated_min_worst_deficit", num(s.gated_min_worst)}};
}

} // namespace

BranchStats::BranchStats()
    : min_deficit(kInf), min_worst(kInf), gated_min_deficit(kInf), gated_min_worst(kInf) {}

std::vector<SamplerProfile> default_profiles() {
  return {SamplerProfile::interior, SamplerProfile::near_boundary, SamplerProfile::large_negative,
          SamplerProfile::clustered_top};
}

CampaignResult run_concavity_campaign(const CampaignConfig& cfg) {
  require(cfg.n >= 3 && cfg.n <= 5, ErrorKind::config, "verify-concavity: n must be 3, 4 or 5");
  require(cfg.samples > 0, ErrorKind::config, "verify-concavity: samples must be positive");
  require(!cfg.profiles.empty(), ErrorKind::config, "verify-concavity: no sampler profiles");
  cfg.constants.validate(cfg.n);

  const auto& bc = cfg.constants;
  CampaignResult result;
  result.config = cfg;
  result.rows.resize(cfg.samples);

  parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
    SamplerConfig sc;
    sc.n = cfg.n;
    sc.profile = cfg.profiles[i % cfg.profiles.size()];
    sc.A = bc.A;
    const auto s = sample_cone(sc, cfg.seed, i);

    CampaignRow row;
    row.profile = sc.profile;
    row.m = s.m;
    row.xi = sample_xi(cfg.n, s.m, cfg.seed, i);
    const auto rep = deficit({s.lambda, s.m, row.xi, bc.K, bc.delta0}, bc.A);
    row.branch = rep.branch;
    row.deficit = rep.deficit;
    row.certificate_ok = rep.certificate_ok;
    row.worst_deficit = worst_case_deficit(s.lambda, s.m, bc.K, bc.delta0).min_deficit;
    row.worst_deficit_k1 = rep.branch == Branch::nonsemiconvex
                               ? worst_case_deficit(s.lambda, s.m, 1.0, bc.delta0).min_deficit
                               : std::numeric_limits<double>::quiet_NaN();
    row.lambda.assign(s.lambda.values().begin(), s.lambda.values().end());
    result.rows[i] = std::move(row);
  });

  result.min_worst_k1 = kInf;
  bool ok = true;
  for (const auto& row : result.rows) {
    absorb(result.branches[static_cast<int>(row.branch)], row, bc.C_lambda1);
    absorb(result.overall, row, bc.C_lambda1);
    if (row.branch == Branch::nonsemiconvex) result.min_worst_k1 = std::min(result.min_worst_k1, row.worst_deficit_k1);
    if (row.certificate_ok && !*row.certificate_ok) {
      ++result.certificate_failures;
      ok = false;
    }
  }
  ok = ok && result.overall.gated_min_deficit >= -kDeficitTolerance &&
       result.overall.gated_min_worst >= -kDeficitTolerance;
  result.passed = ok;
  return result;
}

void write_campaign_csv(std::ostream& os, const CampaignResult& r) {
  const int n = r.config.n;
  os << "n,m,profile";
  for (int i = 1; i <= n; ++i) os << ",lambda_" << i;
  for (int i = 1; i <= n; ++i) os << ",xi_" << i;
  os << ",K,delta0,branch,deficit,worst_deficit,worst_deficit_k1,certificate_ok\n";
  const std::string K = fmt(r.config.constants.K), d0 = fmt(r.config.constants.delta0);
  for (const auto& row : r.rows) {
    os << n << ',' << row.m << ',' << to_string(row.profile) << ',';
    write_joined(os, row.lambda);
    os << ',';
    write_joined(os, row.xi);
    os << ',' << K << ',' << d0 << ',' << to_string(row.branch) << ',' << fmt(row.deficit) << ','
       << fmt(row.worst_deficit) << ',' << fmt(row.worst_deficit_k1) << ','
       << (row.certificate_ok ? (*row.certificate_ok ? "true" : "false") : "") << '\n';
  }
}

void write_campaign_summary(std::ostream& os, const CampaignResult& r) {
  const auto& bc = r.config.constants;
  nlohmann::json j;
  j["n"] = r.config.n;
  j["samples"] = r.config.samples;
  j["seed"] = r.config.seed;
  j["constants"] = {{"A", bc.A}, {"C_lambda1", bc.C_lambda1}, {"delta0", bc.delta0}, {"K", bc.K}, {"Fmax", bc.Fmax}};
  nlohmann::json profiles = nlohmann::json::object();
  for (auto p : r.config.profiles) {
    std::size_t c = 0;
    for (const auto& row : r.rows) c += row.profile == p;
    profiles[to_string(p)] = c;
  }
  j["profiles"] = profiles;
  for (auto b : {Branch::semiconvex, Branch::nonsemiconvex, Branch::full_multiplicity})
    j["branches"][to_string(b)] = stats_json(r.branches[static_cast<int>(b)]);
  j["overall"] = stats_json(r.overall);
  j["min_worst_deficit_k1_nonsemiconvex"] =
      std::isfinite(r.min_worst_k1) ? nlohmann::json(r.min_worst_k1) : nlohmann::json(nullptr);
  j["certificate_failures"] = r.certificate_failures;
  j["tolerance"] = kDeficitTolerance;
  j["passed"] = r.passed;
  os << j.dump(2) << '\n';
}

ConstantSearch search_constants(const SearchConfig& cfg) {
  require(cfg.n >= 3 && cfg.n <= 5, ErrorKind::config, "search_constants: n must be 3, 4 or 5");
  require(cfg.samples >= 10000, ErrorKind::config, "search_constants: need at least 10^4 samples");
  require(!cfg.profiles.empty(), ErrorKind::config, "search_constants: empty sample set");
  require(!cfg.grid.delta0.empty() && !cfg.grid.K_factor.empty() && !cfg.grid.C_lambda1.empty(),
          ErrorKind::config, "search_constants: empty grid");

  const int n = cfg.n;
  const auto ref = BranchConstants::reference(n);

  // Distinct (delta0, K) pairs; C_lambda1 only gates which samples count.
  std::vector<GridPoint> grid;
  for (double c : cfg.grid.C_lambda1)
    for (double kf : cfg.grid.K_factor)
      for (double d : cfg.grid.delta0) grid.push_back({d, kf * n * n, c, false});
  grid.push_back({ref.delta0, ref.K, ref.C_lambda1, true});

  std::vector<std::pair<double, double>> pairs;
  for (const auto& g : grid)
    if (std::find(pairs.begin(), pairs.end(), std::pair{g.delta0, g.K}) == pairs.end())
      pairs.emplace_back(g.delta0, g.K);

  std::vector<double> lambda1(cfg.samples);
  std::vector<double> worst(cfg.samples * pairs.size());
  parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
    SamplerConfig sc;
    sc.n = n;
    sc.profile = cfg.profiles[i % cfg.profiles.size()];
    sc.A = ref.A;
    const auto s = sample_cone(sc, cfg.seed, i);
    lambda1[i] = s.lambda[0];
    for (std::size_t p = 0; p < pairs.size(); ++p)
      worst[i * pairs.size() + p] = worst_case_deficit(s.lambda, s.m, pairs[p].second, pairs[p].first).min_deficit;
  });

  for (auto& g : grid) {
    const auto p = static_cast<std::size_t>(
        std::find(pairs.begin(), pairs.end(), std::pair{g.delta0, g.K}) - pairs.begin());
    g.min_deficit = kInf;
    for (std::size_t i = 0; i < cfg.samples; ++i) {
      if (lambda1[i] < g.C_lambda1) continue;
      ++g.count;
      g.min_deficit = std::min(g.min_deficit, worst[i * pairs.size() + p]);
    }
    g.verified = g.count > 0 && g.min_deficit >= -kDeficitTolerance;
  }

  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto &x = grid[a], &y = grid[b];
    if (x.C_lambda1 != y.C_lambda1) return x.C_lambda1 < y.C_lambda1;
    if (x.K != y.K) return x.K < y.K;
    return x.delta0 > y.delta0;
  });

  ConstantSearch out;
  out.grid = grid;
  auto it = std::find_if(order.begin(), order.end(), [&](std::size_t i) { return grid[i].verified; });
  if (it != order.end()) {
    out.chosen = *it;
    out.verified = true;
  } else {
    out.chosen = 0;
    double best = -kInf;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid[i].count > 0 && grid[i].min_deficit > best) {
        best = grid[i].min_deficit;
        out.chosen = i;
      }
  }
  const auto& g = grid[out.chosen];
  out.constants = ref;
  out.constants.delta0 = g.delta0;
  out.constants.K = g.K;
  out.constants.C_lambda1 = g.C_lambda1;
  out.min_deficit = g.min_deficit;
  return out;
}

void write_search_csv(std::ostream& os, const ConstantSearch& s) {
  os << "delta0,K,C_lambda1,reference,count,min_deficit,verified,chosen\n";
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const auto& g = s.grid[i];
    os << fmt(g.delta0) << ',' << fmt(g.K) << ',' << fmt(g.C_lambda1) << ',' << (g.reference ? "true" : "false") << ','
       << g.count << ',' << fmt(g.min_deficit) << ',' << (g.verified ? "true" : "false") << ','
       << (i == s.chosen ? "true" : "false") << '\n';
  }
}

} // namespace hesslab
