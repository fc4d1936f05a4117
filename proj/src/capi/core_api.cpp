#include <fstream>
#include <sstream>
#include <vector>

#include "capi/common.hpp"
#include "core/campaign.hpp"
#include "core/concavity.hpp"
#include "core/props.hpp"
#include "core/sampler.hpp"
#include "core/spectral.hpp"
#include "core/symmfunc.hpp"

using namespace hesslab;
using capi::guard;
using capi::need;

namespace hesslab::capi {

namespace {
thread_local std::string g_last_error;
}

void set_error(std::string msg) { g_last_error = std::move(msg); }
void clear_error() { g_last_error.clear(); }

hl_status status_of(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::argument: return HL_ERR_ARGUMENT;
  case ErrorKind::precondition: return HL_ERR_PRECONDITION;
  case ErrorKind::degenerate_gap: return HL_ERR_DEGENERATE_GAP;
  case ErrorKind::branch: return HL_ERR_BRANCH;
  case ErrorKind::numerical: return HL_ERR_NUMERICAL;
  case ErrorKind::config: return HL_ERR_CONFIG;
  case ErrorKind::discretization: return HL_ERR_DISCRETIZATION;
  case ErrorKind::data: return HL_ERR_DATA;
  case ErrorKind::io: return HL_ERR_IO;
  case ErrorKind::sampler: return HL_ERR_SAMPLER;
  case ErrorKind::fit: return HL_ERR_FIT;
  }
  return HL_ERR_INTERNAL;
}

} // namespace hesslab::capi

namespace {

std::vector<double> vec(const double* p, std::size_t n) {
  need(p, "input array");
  return std::vector<double>(p, p + n);
}

SymMatrix matrix(const double* w, std::size_t n) {
  need(w, "matrix");
  return SymMatrix::from_dense(std::span<const double>(w, n * n), n);
}

BranchConstants constants_of(const hl_constants& c) {
  BranchConstants b;
  b.A = c.A;
  b.C_lambda1 = c.C_lambda1;
  b.delta0 = c.delta0;
  b.K = c.K;
  b.Fmax = c.Fmax;
  return b;
}

hl_constants constants_of(const BranchConstants& b) { return {b.A, b.C_lambda1, b.delta0, b.K, b.Fmax}; }

std::vector<SamplerProfile> profiles_of(unsigned mask) {
  if (mask == 0) return default_profiles();
  std::vector<SamplerProfile> out;
  const SamplerProfile all[] = {SamplerProfile::interior, SamplerProfile::near_boundary,
                                SamplerProfile::large_negative, SamplerProfile::clustered_top,
                                SamplerProfile::full_multiplicity};
  for (unsigned bit = 0; bit < 5; ++bit)
    if (mask & (1u << bit)) out.push_back(all[bit]);
  return out;
}

template <class Writer>
void write_file(const char* path, Writer&& w) {
  if (!path) return;
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::io, std::string("cannot open ") + path + " for writing");
  w(os);
  if (!os) fail(ErrorKind::io, std::string("write failed for ") + path);
}

hl_branch_stats stats_of(const BranchStats& s) { return {s.count, s.gated_count, s.min_deficit, s.min_worst}; }

} // namespace

extern "C" {

const char* hl_version(void) { return HESSLAB_VERSION; }

const char* hl_status_name(hl_status s) {
  switch (s) {
  case HL_OK: return "ok";
  case HL_ERR_ARGUMENT: return "argument";
  case HL_ERR_PRECONDITION: return "precondition";
  case HL_ERR_DEGENERATE_GAP: return "degenerate_gap";
  case HL_ERR_BRANCH: return "branch";
  case HL_ERR_NUMERICAL: return "numerical";
  case HL_ERR_CONFIG: return "config";
  case HL_ERR_DISCRETIZATION: return "discretization";
  case HL_ERR_DATA: return "data";
  case HL_ERR_IO: return "io";
  case HL_ERR_SAMPLER: return "sampler";
  case HL_ERR_FIT: return "fit";
  case HL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* hl_last_error(void) { return capi::g_last_error.c_str(); }

uint64_t hl_fnv1a(const char* data, size_t len) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ull;
  }
  return h;
}

hl_status hl_sigma(const double* lambda, size_t n, int k, double* out) {
  return guard([&] {
    need(out, "out");
    *out = sigma(std::span<const double>(vec(lambda, n)), k);
  });
}

hl_status hl_sigma_excluding(const double* lambda, size_t n, int k, const size_t* excluded, size_t n_excluded,
                             double* out) {
  return guard([&] {
    need(out, "out");
    if (n_excluded) need(excluded, "excluded");
    const auto l = vec(lambda, n);
    const std::vector<std::size_t> ex(excluded, excluded + n_excluded);
    *out = sigma(std::span<const double>(l), k, ex);
  });
}

hl_status hl_sigma_gradient(const double* lambda, size_t n, int k, double* out) {
  return guard([&] {
    need(out, "out");
    const auto g = sigma_gradient(std::span<const double>(vec(lambda, n)), k);
    std::copy(g.begin(), g.end(), out);
  });
}

hl_status hl_in_cone(const double* lambda, size_t n, int k, int* out) {
  return guard([&] {
    need(out, "out");
    *out = in_cone(std::span<const double>(vec(lambda, n)), k) ? 1 : 0;
  });
}

hl_status hl_eigen(const double* w, size_t n, double* values, double* vectors) {
  return guard([&] {
    need(values, "values");
    const auto eig = eigen_decompose(matrix(w, n));
    const auto v = eig.lambda.values();
    std::copy(v.begin(), v.end(), values);
    if (vectors) std::copy(eig.frame.begin(), eig.frame.end(), vectors);
  });
}

hl_status hl_F_value(const double* w, size_t n, int k, double* out) {
  return guard([&] {
    need(out, "out");
    *out = F_value(matrix(w, n), k);
  });
}

hl_status hl_F_second_form(const double* w, const double* a, size_t n, int k, double* out) {
  return guard([&] {
    need(out, "out");
    *out = F_second_quadratic_form(matrix(w, n), k, matrix(a, n));
  });
}

hl_status hl_reference_constants(int n, double Fmax, hl_constants* out) {
  return guard([&] {
    need(out, "out");
    *out = constants_of(BranchConstants::reference(n, Fmax));
  });
}

hl_status hl_validate_constants(int n, const hl_constants* c) {
  return guard([&] {
    need(c, "constants");
    constants_of(*c).validate(n);
  });
}

hl_status hl_deficit(const double* lambda, size_t n, int m, const double* xi, double K, double delta0, double A,
                     double* deficit_out, hl_branch* branch, int* certificate_ok) {
  return guard([&] {
    need(deficit_out, "deficit");
    ConcavityInstance inst{EigenvalueVector(vec(lambda, n)), m, vec(xi, n), K, delta0};
    const auto r = deficit(inst, A);
    *deficit_out = r.deficit;
    if (branch) *branch = static_cast<hl_branch>(r.branch);
    if (certificate_ok) *certificate_ok = r.certificate_ok ? (*r.certificate_ok ? 1 : 0) : -1;
  });
}

hl_status hl_worst_case_deficit(const double* lambda, size_t n, int m, double K, double delta0, double* out,
                                double* xi_out) {
  return guard([&] {
    need(out, "out");
    const auto w = worst_case_deficit(EigenvalueVector(vec(lambda, n)), m, K, delta0);
    *out = w.min_deficit;
    if (xi_out) std::copy(w.xi.begin(), w.xi.end(), xi_out);
  });
}

hl_status hl_rank_one_definite(const double* y, const double* d, size_t n, int* out) {
  return guard([&] {
    need(out, "out");
    const auto yy = vec(y, n), dd = vec(d, n);
    *out = rank_one_update_definite(yy, dd).definite ? 1 : 0;
  });
}

void hl_props_defaults(hl_props_options* o) {
  if (!o) return;
  const PropsConfig d;
  *o = {d.seed, d.samples, d.matrix_samples, d.algebra_samples, d.n_min, d.n_max, d.threads, 0};
}

hl_status hl_verify_props(const hl_props_options* o, const char* csv_path, hl_props_summary* out) {
  return guard([&] {
    need(o, "options");
    need(out, "out");
    PropsConfig cfg;
    cfg.seed = o->seed;
    cfg.samples = o->samples;
    cfg.matrix_samples = o->matrix_samples;
    cfg.algebra_samples = o->algebra_samples;
    cfg.n_min = o->n_min;
    cfg.n_max = o->n_max;
    cfg.threads = o->threads;
    cfg.inject_fault = o->inject_fault != 0;
    require(cfg.threads >= 1, ErrorKind::config, "threads must be >= 1");
    const auto report = run_property_suite(cfg);
    write_file(csv_path, [&](std::ostream& os) { write_props_csv(os, report); });
    const auto failures = report.failures();
    *out = {report.records.size(), failures.size(), report.passed() ? 1 : 0};
    if (!failures.empty()) {
      std::ostringstream msg;
      for (const auto* r : failures) {
        msg << r->property << " n=" << r->n << " k=" << r->k << " worst=" << r->worst << " sample=[";
        for (std::size_t i = 0; i < r->worst_sample.size(); ++i) msg << (i ? ";" : "") << r->worst_sample[i];
        msg << "]\n";
      }
      capi::set_error(msg.str());
    }
  });
}

hl_status hl_parse_profiles(const char* names, unsigned* mask) {
  return guard([&] {
    need(names, "names");
    need(mask, "mask");
    unsigned m = 0;
    std::string s(names);
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const auto comma = s.find(',', pos);
      const auto item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (!item.empty()) {
        if (item == "all") {
          m |= 31u;
        } else {
          const auto p = parse_profile(item);
          if (!p) fail(ErrorKind::config, "unknown sampler profile '" + item + "'");
          m |= 1u << static_cast<unsigned>(*p);
        }
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (m == 0) fail(ErrorKind::config, "no sampler profiles given");
    *mask = m;
  });
}

hl_status hl_concavity_defaults(int n, hl_concavity_options* o) {
  return guard([&] {
    need(o, "options");
    const CampaignConfig d;
    *o = {n, 0u, d.samples, d.seed, constants_of(BranchConstants::reference(n)), 0, 1};
  });
}

hl_status hl_verify_concavity(const hl_concavity_options* o, const char* csv_path, const char* summary_path,
                              const char* search_csv, hl_concavity_summary* out) {
  return guard([&] {
    need(o, "options");
    need(out, "out");
    require(o->samples > 0, ErrorKind::config, "samples must be positive");
    CampaignConfig cfg;
    cfg.n = o->n;
    cfg.profiles = profiles_of(o->profiles);
    cfg.samples = o->samples;
    cfg.seed = o->seed;
    cfg.threads = o->threads;
    cfg.constants = constants_of(o->constants);
    cfg.constants.validate(cfg.n);
    if (o->search) {
      SearchConfig sc;
      sc.n = cfg.n;
      sc.profiles = cfg.profiles;
      sc.seed = cfg.seed;
      sc.threads = cfg.threads;
      const auto search = search_constants(sc);
      write_file(search_csv, [&](std::ostream& os) { write_search_csv(os, search); });
      cfg.constants = search.constants;
    }
    const auto result = run_concavity_campaign(cfg);
    write_file(csv_path, [&](std::ostream& os) { write_campaign_csv(os, result); });
    write_file(summary_path, [&](std::ostream& os) { write_campaign_summary(os, result); });
    hl_concavity_summary s{};
    s.constants = constants_of(result.config.constants);
    for (int b = 0; b < 3; ++b) s.branches[b] = stats_of(result.branches[b]);
    s.overall = stats_of(result.overall);
    s.gated_min_deficit = result.overall.gated_min_deficit;
    s.gated_min_worst = result.overall.gated_min_worst;
    s.min_worst_k1 = result.min_worst_k1;
    s.certificate_failures = result.certificate_failures;
    s.passed = result.passed ? 1 : 0;
    *out = s;
  });
}

} // extern "C"
