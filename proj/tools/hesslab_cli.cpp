#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hesslab/hesslab.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int {
  kOk = 0,
  kVerifyFailed = 1,
  kConfig = 2,
  kSampler = 3,
  kBarrier = 4,
  kLinearSolve = 5,
  kCorrupt = 6,
  kNotConverged = 7,
};

struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void die(int code, const std::string& msg) { throw Failure{code, msg}; }

int exit_for(hl_status s) {
  switch (s) {
  case HL_OK: return kOk;
  case HL_ERR_SAMPLER: return kSampler;
  case HL_ERR_DATA: return kCorrupt;
  default: return kConfig;
  }
}

void check(hl_status s, const char* what) {
  if (s != HL_OK) die(exit_for(s), std::string(what) + ": " + hl_status_name(s) + ": " + hl_last_error());
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string digest_of(const json& config) {
  const std::string s = config.dump();
  return hex64(hl_fnv1a(s.data(), s.size()));
}

/// Reads a JSON config; a run manifest is accepted in place of the config it
/// embeds, after its digest is checked.
json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) die(kConfig, "cannot open config " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    die(kConfig, path + ": " + e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("config_digest")) {
    const json inner = j.at("config");
    if (digest_of(inner) != j.at("config_digest").get<std::string>())
      die(kConfig, path + ": config digest mismatch");
    return inner;
  }
  if (!j.is_object()) die(kConfig, path + ": config must be a JSON object");
  return j;
}

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  int threads = 1;
  std::string out = "out";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON config or run manifest");
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("--samples", c.samples, "sample count");
  app->add_option("--threads", c.threads, "worker threads (outputs are bitwise reproducible only with 1)")
      ->check(CLI::Range(1, 1024));
  app->add_option("--out", c.out, "output directory (HESSLAB_OUT overrides)");
}

class Run {
public:
  Run(std::string subcommand, const Common& c) : subcommand_(std::move(subcommand)), started_(utc_now()) {
    const char* env = std::getenv("HESSLAB_OUT");
    dir_ = (env && *env) ? fs::path(env) : fs::path(c.out);
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) die(kConfig, "cannot create output directory " + dir_.string() + ": " + ec.message());
    threads_ = c.threads;
  }

  std::string path(const std::string& name) {
    outputs_.push_back(name);
    return (dir_ / name).string();
  }

  void finish(const json& config, std::optional<std::uint64_t> seed, const json& results) {
    json m;
    m["subcommand"] = subcommand_;
    m["config"] = config;
    m["config_digest"] = digest_of(config);
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["version"] = hl_version();
    m["threads"] = threads_;
    m["started"] = started_;
    m["finished"] = utc_now();
    m["outputs"] = outputs_;
    m["results"] = results;
    std::ofstream os(dir_ / "manifest.json");
    os << m.dump(2) << '\n';
    if (!os) die(kConfig, "cannot write manifest in " + dir_.string());
  }

private:
  std::string subcommand_;
  std::string started_;
  fs::path dir_;
  int threads_ = 1;
  std::vector<std::string> outputs_;
};

template <class T>
void take(const json& cfg, const char* key, T& into) {
  if (!cfg.contains(key)) return;
  try {
    into = cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    die(kConfig, std::string("config key '") + key + "': " + e.what());
  }
}

template <class T>
T pick(const json& cfg, const char* key, const std::optional<T>& flag, T fallback) {
  if (flag) return *flag;
  take(cfg, key, fallback);
  return fallback;
}

std::uint64_t resolve_seed(const Common& c, const json& cfg, std::uint64_t fallback) {
  if (c.seed) return *c.seed;
  if (!c.config_path.empty()) {
    if (!cfg.contains("seed")) die(kConfig, "config " + c.config_path + " must set \"seed\"");
    std::uint64_t s = 0;
    take(cfg, "seed", s);
    return s;
  }
  return fallback;
}

// ---- verify-props --------------------------------------------------------

struct PropsArgs {
  int n_min = 3;
  int n_max = 8;
  bool inject_fault = false;
};

int cmd_verify_props(const Common& c, const PropsArgs& a) {
  const json file = c.config_path.empty() ? json::object() : load_config(c.config_path);
  hl_props_options o;
  hl_props_defaults(&o);
  o.seed = resolve_seed(c, file, o.seed);
  take(file, "samples", o.samples);
  take(file, "matrix_samples", o.matrix_samples);
  take(file, "algebra_samples", o.algebra_samples);
  o.n_min = a.n_min;
  o.n_max = a.n_max;
  take(file, "n_min", o.n_min);
  take(file, "n_max", o.n_max);
  if (c.samples) o.samples = o.algebra_samples = *c.samples;
  o.threads = c.threads;
  o.inject_fault = a.inject_fault ? 1 : 0;

  const json config = {{"samples", o.samples},         {"matrix_samples", o.matrix_samples},
                       {"algebra_samples", o.algebra_samples}, {"n_min", o.n_min},
                       {"n_max", o.n_max},             {"seed", o.seed},
                       {"inject_fault", a.inject_fault}};
  Run run("verify-props", c);
  hl_props_summary s{};
  check(hl_verify_props(&o, run.path("props.csv").c_str(), &s), "verify-props");
  std::cout << "verify-props: " << s.properties << " property cells, " << s.failures << " failures\n";
  if (!s.passed) std::cerr << "failing properties (worst sample):\n" << hl_last_error();
  run.finish(config, o.seed, {{"properties", s.properties}, {"failures", s.failures}, {"passed", s.passed != 0}});
  return s.passed ? kOk : kVerifyFailed;
}

// ---- verify-concavity ----------------------------------------------------

struct ConcavityArgs {
  std::optional<int> n;
  std::string profiles;
  std::optional<double> K, delta0, A, lambda1;
  bool search = false;
};

json stats_json(const hl_branch_stats& b) {
  return {{"count", b.count}, {"gated_count", b.gated_count}, {"min_deficit", b.min_deficit},
          {"min_worst_deficit", b.min_worst}};
}

int cmd_verify_concavity(const Common& c, ConcavityArgs a) {
  const json file = c.config_path.empty() ? json::object() : load_config(c.config_path);
  int n = 3;
  take(file, "n", n);
  if (a.n) n = *a.n;
  if (file.contains("profiles") && a.profiles.empty()) {
    std::vector<std::string> names;
    take(file, "profiles", names);
    a.profiles.clear();
    for (const auto& s : names) a.profiles += (a.profiles.empty() ? "" : ",") + s;
  }
  for (auto [key, slot] : {std::pair{"K", &a.K}, std::pair{"delta0", &a.delta0}, std::pair{"A", &a.A},
                           std::pair{"lambda1_threshold", &a.lambda1}}) {
    if (file.contains(key) && !*slot) {
      double v = 0.0;
      take(file, key, v);
      *slot = v;
    }
  }
  if (file.contains("search")) take(file, "search", a.search);

  hl_concavity_options o;
  check(hl_concavity_defaults(n, &o), "verify-concavity");
  o.seed = resolve_seed(c, file, o.seed);
  take(file, "samples", o.samples);
  if (c.samples) o.samples = *c.samples;
  if (!a.profiles.empty()) check(hl_parse_profiles(a.profiles.c_str(), &o.profiles), "--profiles");
  if (a.K) o.constants.K = *a.K;
  if (a.delta0) o.constants.delta0 = *a.delta0;
  if (a.A) o.constants.A = *a.A;
  o.constants.C_lambda1 = a.lambda1 ? *a.lambda1 : o.constants.A;
  o.search = a.search ? 1 : 0;
  o.threads = c.threads;

  json profiles = json::array();
  {
    std::stringstream ss(a.profiles.empty() ? "interior,near_boundary,large_negative,clustered_top" : a.profiles);
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty()) profiles.push_back(item);
  }
  const json config = {{"n", n},
                       {"profiles", profiles},
                       {"samples", o.samples},
                       {"seed", o.seed},
                       {"K", o.constants.K},
                       {"delta0", o.constants.delta0},
                       {"A", o.constants.A},
                       {"lambda1_threshold", o.constants.C_lambda1},
                       {"search", a.search}};
  Run run("verify-concavity", c);
  const std::string stem = "concavity_n" + std::to_string(n);
  const std::string csv = run.path(stem + ".csv");
  const std::string summary = run.path(stem + "_summary.json");
  const std::string search = a.search ? run.path(stem + "_search.csv") : std::string();
  hl_concavity_summary s{};
  check(hl_verify_concavity(&o, csv.c_str(), summary.c_str(), a.search ? search.c_str() : nullptr, &s),
        "verify-concavity");

  const char* names[] = {"semiconvex", "nonsemiconvex", "full_multiplicity"};
  std::cout << "verify-concavity n=" << n << " samples=" << o.samples << " K=" << s.constants.K
            << " delta0=" << s.constants.delta0 << " A=" << s.constants.A
            << " lambda1_threshold=" << s.constants.C_lambda1 << '\n';
  for (int b = 0; b < 3; ++b) {
    if (s.branches[b].count == 0) continue;
    std::cout << "  " << names[b] << ": count=" << s.branches[b].count
              << " min_deficit=" << s.branches[b].min_deficit << " min_worst=" << s.branches[b].min_worst << '\n';
  }
  std::cout << "  min deficit (gated)=";
  if (s.overall.gated_count > 0) std::cout << s.gated_min_deficit;
  else std::cout << "n/a (no sample above the lambda_1 threshold)";
  std::cout << " certificate failures=" << s.certificate_failures
            << " -> " << (s.passed ? "PASS" : "FAIL") << '\n';

  json branches = json::object();
  for (int b = 0; b < 3; ++b) branches[names[b]] = stats_json(s.branches[b]);
  run.finish(config, o.seed,
             {{"passed", s.passed != 0}, {"overall", stats_json(s.overall)}, {"branches", branches},
              {"gated_min_deficit", s.gated_min_deficit}, {"certificate_failures", s.certificate_failures}});
  return s.passed ? kOk : kVerifyFailed;
}

// ---- solve -----------------------------------------------------------------

struct Problem {
  hl_problem* p = nullptr;
  ~Problem() { hl_problem_free(p); }
};

struct Field {
  hl_field* f = nullptr;
  ~Field() { hl_field_free(f); }
};

/// Exact solution a (|x|^2 - R^2) / 2 for psi = c on a ball with zero data.
std::optional<std::pair<double, double>> radial_exact(const json& problem) {
  try {
    const int n = problem.at("n").get<int>();
    const auto& d = problem.at("domain");
    if (d.at("type") != "ball") return std::nullopt;
    if (problem.at("psi").at("kind") != "constant") return std::nullopt;
    if (problem.at("boundary").at("kind") != "zero") return std::nullopt;
    const double c = problem.at("psi").at("params").at("c").get<double>();
    return std::pair{std::pow(c / n, 1.0 / (n - 1)), d.at("radius").get<double>()};
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

int cmd_solve(const Common& c) {
  if (c.config_path.empty()) die(kConfig, "solve requires --config");
  const json file = load_config(c.config_path);
  Problem prob;
  check(hl_problem_from_json(file.dump().c_str(), &prob.p), "solve");
  check(hl_problem_set_threads(prob.p, c.threads), "solve");
  std::size_t needed = 0;
  check(hl_problem_json(prob.p, nullptr, 0, &needed), "solve");
  std::string text(needed, '\0');
  check(hl_problem_json(prob.p, text.data(), needed, &needed), "solve");
  text.resize(needed - 1);
  const json config = json::parse(text);

  Run run("solve", c);
  Field field;
  hl_solve_report r{};
  check(hl_solve(prob.p, &field.f, &r), "solve");
  check(hl_field_write(field.f, run.path("solution.hess").c_str()), "solve");
  check(hl_field_write_csv(field.f, run.path("solution.csv").c_str()), "solve");

  std::vector<double> history(hl_last_residual_history(nullptr, 0));
  hl_last_residual_history(history.data(), history.size());

  json results = {{"status", hl_solver_status_name(r.status)}, {"newton_iter", r.newton_iter},
                  {"residual_norm", r.residual_norm},          {"admissible_fraction", r.admissible_fraction},
                  {"interior_points", r.interior_points},      {"residual_history", history}};
  std::cout << "solve: " << hl_solver_status_name(r.status) << " after " << r.newton_iter
            << " Newton iterations, residual " << r.residual_norm << ", admissible fraction "
            << r.admissible_fraction << '\n';
  if (r.message[0]) std::cout << "  " << r.message << '\n';
  if (const auto exact = radial_exact(config); exact && r.status == HL_SOLVER_CONVERGED) {
    double err = 0.0;
    check(hl_field_radial_error(field.f, exact->first, exact->second, &err), "solve");
    const double h = hl_field_spacing(field.f);
    std::cout << "  max error vs exact radial solution " << err << " (h^2 = " << h * h << ")\n";
    results["max_error"] = err;
    results["h"] = h;
  }
  run.finish(config, std::nullopt, results);

  switch (r.status) {
  case HL_SOLVER_CONVERGED: return kOk;
  case HL_SOLVER_ADMISSIBILITY_BARRIER:
  case HL_SOLVER_INADMISSIBLE_START: return kBarrier;
  case HL_SOLVER_LINEAR_SOLVE: return kLinearSolve;
  case HL_SOLVER_MAX_ITERATIONS: return kNotConverged;
  }
  return kNotConverged;
}

// ---- scan-pogorelov --------------------------------------------------------

struct ScanArgs {
  std::string solution;
  std::optional<std::vector<double>> betas;
  std::optional<double> B;
};

int cmd_scan(const Common& c, ScanArgs a) {
  const json file = c.config_path.empty() ? json::object() : load_config(c.config_path);
  if (a.solution.empty()) take(file, "solution", a.solution);
  const std::vector<double> betas = pick(file, "betas", a.betas, std::vector<double>{1.0, 2.0, 4.0, 8.0});
  const double B = pick(file, "B", a.B, 0.0);
  if (a.solution.empty()) die(kConfig, "scan-pogorelov requires --solution");
  if (betas.empty()) die(kConfig, "at least one beta required");

  Field field;
  const hl_status read = hl_field_read(a.solution.c_str(), &field.f);
  if (read != HL_OK) die(read == HL_ERR_DATA || read == HL_ERR_IO ? kCorrupt : exit_for(read),
                         std::string("cannot read solution: ") + hl_last_error());

  const json config = {{"solution", a.solution}, {"betas", betas}, {"B", B}};
  Run run("scan-pogorelov", c);
  std::vector<hl_scan_result> scans(betas.size());
  const hl_status s = hl_scan_pogorelov(field.f, betas.data(), betas.size(),
                                        run.path("pogorelov.csv").c_str(), scans.data());
  if (s == HL_ERR_DATA) die(kVerifyFailed, std::string("scan precondition violated: ") + hl_last_error());
  check(s, "scan-pogorelov");

  json rows = json::array();
  bool strict = true;
  const int n = hl_field_dim(field.f);
  for (const auto& r : scans) {
    hl_scan_result p{};
    check(hl_test_function(field.f, r.beta, B, &p), "scan-pogorelov");
    std::vector<double> at(r.argmax, r.argmax + n), pat(p.argmax, p.argmax + n);
    rows.push_back({{"beta", r.beta},
                    {"sup", r.sup_value},
                    {"argmax", at},
                    {"argmax_strict", r.argmax_strict != 0},
                    {"P_max", p.sup_value},
                    {"P_argmax", pat},
                    {"P_argmax_strict", p.argmax_strict != 0}});
    strict = strict && r.argmax_strict && p.argmax_strict;
    std::cout << "beta=" << r.beta << " sup (-u)^beta lambda_1 = " << r.sup_value
              << (r.argmax_strict ? " (interior argmax)" : " (argmax next to the boundary)") << '\n';
  }
  std::ofstream(run.path("pogorelov_summary.json")) << rows.dump(2) << '\n';
  run.finish(config, std::nullopt, {{"scans", rows}, {"argmax_strict", strict}});
  return kOk;
}

// ---- experiment-rigidity ---------------------------------------------------

struct RigidityArgs {
  std::optional<int> n;
  std::optional<std::vector<double>> radii;
  std::optional<double> eps;
  std::optional<int> points;
  std::optional<double> growth;
};


int cmd_rigidity(const Common& c, RigidityArgs a) {
  const json file = c.config_path.empty() ? json::object() : load_config(c.config_path);
  hl_rigidity_options o;
  hl_rigidity_defaults(&o);
  const std::vector<double> radii =
      pick(file, "radii", a.radii, std::vector<double>(o.radii, o.radii + o.radii_count));
  o.n = pick(file, "n", a.n, o.n);
  o.radii = radii.data();
  o.radii_count = radii.size();
  o.eps = pick(file, "eps", a.eps, o.eps);
  o.points = pick(file, "points", a.points, o.points);
  o.growth = pick(file, "growth", a.growth, o.growth);
  o.threads = c.threads;

  const json config = {{"n", o.n}, {"radii", radii}, {"eps", o.eps}, {"points", o.points}, {"growth", o.growth}};
  Run run("experiment-rigidity", c);
  std::vector<hl_rigidity_row> rows(radii.size());
  hl_rigidity_verdict v{};
  check(hl_rigidity(&o, run.path("rigidity.csv").c_str(), rows.data(), &v), "experiment-rigidity");

  json table = json::array();
  for (const auto& r : rows) {
    std::cout << "R=" << r.R << " " << hl_solver_status_name(r.status) << " deviation=" << r.deviation
              << " holder_proxy=" << r.holder_proxy << " fit_residual=" << r.fit_residual << '\n';
    table.push_back({{"R", r.R},
                     {"status", hl_solver_status_name(r.status)},
                     {"deviation", r.deviation},
                     {"holder_proxy", r.holder_proxy},
                     {"fit_residual", r.fit_residual},
                     {"fit_bound", r.fit_bound}});
  }
  std::cout << (v.passed ? "decay invariant holds" : "decay invariant FAILS") << '\n';
  run.finish(config, std::nullopt,
             {{"rows", table},
              {"all_solved", v.all_solved != 0},
              {"holder_nonincreasing", v.holder_nonincreasing != 0},
              {"fit_decreasing", v.fit_decreasing != 0},
              {"fit_within_bound", v.fit_within_bound != 0},
              {"passed", v.passed != 0}});
  return v.passed ? kOk : kVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hesslab: (n-1)-Hessian numerical laboratory"};
  app.set_version_flag("--version", std::string(hl_version()));
  app.require_subcommand(1);

  Common props_c, conc_c, solve_c, scan_c, rig_c;
  PropsArgs props_a;
  ConcavityArgs conc_a;
  ScanArgs scan_a;
  RigidityArgs rig_a;

  auto* props = app.add_subcommand("verify-props", "check the symmetric-function and spectral invariants");
  add_common(props, props_c);
  props->add_option("--n-min", props_a.n_min, "smallest n")->check(CLI::Range(3, 8));
  props->add_option("--n-max", props_a.n_max, "largest n")->check(CLI::Range(3, 8));
  props->add_flag("--inject-fault", props_a.inject_fault, "harness self-test: negate one sigma")->group("");

  auto* conc = app.add_subcommand("verify-concavity", "sample the concavity inequality over Gamma_{n-1}");
  add_common(conc, conc_c);
  conc->add_option("--n", conc_a.n, "dimension (3, 4 or 5)");
  conc->add_option("--profiles", conc_a.profiles,
                   "comma list of interior, near_boundary, large_negative, clustered_top, full_multiplicity, all");
  conc->add_option("--K", conc_a.K, "coefficient K");
  conc->add_option("--delta0", conc_a.delta0, "coefficient delta0");
  conc->add_option("--A", conc_a.A, "large-negative threshold A");
  conc->add_option("--lambda1-threshold", conc_a.lambda1, "lambda_1 gate (defaults to A)");
  conc->add_flag("--search", conc_a.search, "grid-search the constants first and use the least restrictive");

  auto* solve = app.add_subcommand("solve", "solve sigma_{n-1}(D^2 u) = psi with Dirichlet data");
  add_common(solve, solve_c);

  auto* scan = app.add_subcommand("scan-pogorelov", "scan (-u)^beta lambda_1 and the test function P");
  add_common(scan, scan_c);
  scan->add_option("--solution", scan_a.solution, "solution file written by solve");
  scan->add_option("--beta", scan_a.betas, "beta sweep")->delimiter(',');
  scan->add_option("--B", scan_a.B, "gradient weight of P");

  auto* rig = app.add_subcommand("experiment-rigidity", "Hessian statistics on growing balls");
  add_common(rig, rig_c);
  rig->add_option("--n", rig_a.n, "dimension");
  rig->add_option("--radii", rig_a.radii, "increasing radii")->delimiter(',');
  rig->add_option("--eps", rig_a.eps, "boundary perturbation amplitude");
  rig->add_option("--points", rig_a.points, "grid points per axis");
  rig->add_option("--growth", rig_a.growth, "boundary data eps R^growth phi(x/R)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*props) return cmd_verify_props(props_c, props_a);
    if (*conc) return cmd_verify_concavity(conc_c, conc_a);
    if (*solve) return cmd_solve(solve_c);
    if (*scan) return cmd_scan(scan_c, scan_a);
    if (*rig) return cmd_rigidity(rig_c, rig_a);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kConfig;
}
