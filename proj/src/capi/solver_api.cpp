#include <algorithm>
#include <cmath>
#include <fstream>

#include "capi/common.hpp"
#include "core/experiments.hpp"
#include "core/solver.hpp"

using namespace hesslab;
using capi::guard;
using capi::need;

namespace {

thread_local std::vector<double> g_history;

hl_solver_status status_of(SolverStatus s) {
  switch (s) {
  case SolverStatus::converged: return HL_SOLVER_CONVERGED;
  case SolverStatus::admissibility_barrier: return HL_SOLVER_ADMISSIBILITY_BARRIER;
  case SolverStatus::linear_solve: return HL_SOLVER_LINEAR_SOLVE;
  case SolverStatus::max_iterations: return HL_SOLVER_MAX_ITERATIONS;
  case SolverStatus::inadmissible_start: return HL_SOLVER_INADMISSIBLE_START;
  }
  return HL_SOLVER_MAX_ITERATIONS;
}

hl_problem* make_problem(ProblemSpec spec) { return new hl_problem{std::move(spec)}; }

void copy_scan(hl_scan_result* out, double beta, double B, double value, const std::vector<double>& x, bool strict) {
  *out = {};
  out->beta = beta;
  out->B = B;
  out->sup_value = value;
  std::copy(x.begin(), x.end(), out->argmax);
  out->argmax_strict = strict ? 1 : 0;
}

} // namespace

extern "C" {

hl_status hl_problem_load(const char* path, hl_problem** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = make_problem(ProblemSpec::load(path));
  });
}

hl_status hl_problem_from_json(const char* json, hl_problem** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::config, e.what());
    }
    *out = make_problem(ProblemSpec::from_json(j));
  });
}

hl_status hl_problem_radial(int n, double radius, int points, hl_problem** out) {
  return guard([&] {
    need(out, "out");
    require(std::isfinite(radius) && radius > 0.0, ErrorKind::config, "radius must be positive");
    auto spec = radial_problem(n, radius, points);
    spec.validate();
    *out = make_problem(std::move(spec));
  });
}

void hl_problem_free(hl_problem* p) { delete p; }

hl_status hl_problem_set_threads(hl_problem* p, int threads) {
  return guard([&] {
    need(p, "problem");
    require(threads >= 1, ErrorKind::config, "threads must be >= 1");
    p->spec.solver.threads = threads;
  });
}

int hl_problem_dim(const hl_problem* p) { return p ? p->spec.n : 0; }

hl_status hl_problem_json(const hl_problem* p, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    need(p, "problem");
    const std::string s = p->spec.to_json().dump();
    if (needed) *needed = s.size() + 1;
    if (buf && cap > 0) {
      const std::size_t count = std::min(cap - 1, s.size());
      std::memcpy(buf, s.data(), count);
      buf[count] = '\0';
    }
  });
}

const char* hl_solver_status_name(hl_solver_status s) {
  switch (s) {
  case HL_SOLVER_CONVERGED: return "converged";
  case HL_SOLVER_ADMISSIBILITY_BARRIER: return "admissibility_barrier";
  case HL_SOLVER_LINEAR_SOLVE: return "linear_solve";
  case HL_SOLVER_MAX_ITERATIONS: return "max_iterations";
  case HL_SOLVER_INADMISSIBLE_START: return "inadmissible_start";
  }
  return "unknown";
}

hl_status hl_solve(const hl_problem* p, hl_field** field, hl_solve_report* report) {
  return guard([&] {
    need(p, "problem");
    need(field, "field");
    need(report, "report");
    auto st = newton_solve(p->spec);
    g_history = st.residual_history;
    hl_solve_report r{};
    r.status = status_of(st.status);
    r.newton_iter = st.newton_iter;
    r.residual_norm = st.residual_norm;
    r.admissible_fraction = st.admissible_fraction;
    r.damping = st.damping;
    r.interior_points = st.u.grid().interior().size();
    const auto len = std::min(st.message.size(), sizeof r.message - 1);
    std::memcpy(r.message, st.message.data(), len);
    r.message[len] = '\0';
    *field = new hl_field{std::move(st.u)};
    *report = r;
  });
}

size_t hl_last_residual_history(double* out, size_t cap) {
  if (out) std::copy_n(g_history.begin(), std::min(cap, g_history.size()), out);
  return g_history.size();
}

void hl_field_free(hl_field* f) { delete f; }

hl_status hl_field_read(const char* path, hl_field** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new hl_field{read_snapshot(path)};
  });
}

hl_status hl_field_write(const hl_field* f, const char* path) {
  return guard([&] {
    need(f, "field");
    need(path, "path");
    write_snapshot(path, f->u);
  });
}

hl_status hl_field_write_csv(const hl_field* f, const char* path) {
  return guard([&] {
    need(f, "field");
    need(path, "path");
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::io, std::string("cannot open ") + path + " for writing");
    write_field_csv(os, f->u);
    if (!os) fail(ErrorKind::io, std::string("write failed for ") + path);
  });
}

int hl_field_dim(const hl_field* f) { return f ? f->u.grid().dim() : 0; }
double hl_field_spacing(const hl_field* f) { return f ? f->u.grid().h() : 0.0; }
size_t hl_field_size(const hl_field* f) { return f ? f->u.grid().size() : 0; }
size_t hl_field_interior_count(const hl_field* f) { return f ? f->u.grid().interior().size() : 0; }

hl_status hl_field_values(const hl_field* f, double* out, size_t cap) {
  return guard([&] {
    need(f, "field");
    need(out, "out");
    const auto v = f->u.values();
    require(cap >= v.size(), ErrorKind::argument, "output buffer too small");
    std::copy(v.begin(), v.end(), out);
  });
}

hl_status hl_field_radial_error(const hl_field* f, double a, double R, double* out) {
  return guard([&] {
    need(f, "field");
    need(out, "out");
    const auto& g = f->u.grid();
    std::vector<double> x(g.dim());
    double err = 0.0;
    for (std::size_t idx : g.interior()) {
      g.coords(idx, x);
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      err = std::max(err, std::abs(f->u[idx] - 0.5 * a * (r2 - R * R)));
    }
    *out = err;
  });
}

hl_status hl_scan_pogorelov(const hl_field* f, const double* betas, size_t count, const char* csv_path,
                            hl_scan_result* out) {
  return guard([&] {
    need(f, "field");
    need(betas, "betas");
    need(out, "out");
    require(count > 0, ErrorKind::config, "at least one beta required");
    std::vector<PogorelovScan> scans;
    for (size_t i = 0; i < count; ++i) scans.push_back(pogorelov_scan(f->u, betas[i]));
    if (csv_path) {
      std::ofstream os(csv_path, std::ios::binary);
      if (!os) fail(ErrorKind::io, std::string("cannot open ") + csv_path + " for writing");
      write_pogorelov_csv(os, f->u, scans);
    }
    for (size_t i = 0; i < count; ++i)
      copy_scan(&out[i], scans[i].beta, 0.0, scans[i].sup_value, scans[i].argmax_x, scans[i].argmax_strict);
  });
}

hl_status hl_test_function(const hl_field* f, double beta, double B, hl_scan_result* out) {
  return guard([&] {
    need(f, "field");
    need(out, "out");
    const auto t = test_function_field(f->u, beta, B);
    copy_scan(out, beta, B, t.max_value, t.argmax_x, t.argmax_strict);
  });
}

hl_status hl_quadratic_fit(const hl_field* f, double* A, double* b, double* c, double* max_residual) {
  return guard([&] {
    need(f, "field");
    const auto fit = quadratic_fit(f->u);
    const std::size_t n = fit.A.dim();
    if (A) {
      const auto d = fit.A.dense();
      std::copy(d.begin(), d.end(), A);
    }
    if (b) std::copy_n(fit.b.begin(), n, b);
    if (c) *c = fit.c;
    if (max_residual) *max_residual = fit.max_residual;
  });
}

void hl_rigidity_defaults(hl_rigidity_options* o) {
  if (!o) return;
  static const double radii[] = {1.0, 2.0, 4.0, 8.0};
  const RigidityConfig d;
  *o = {d.n, radii, 4, d.eps, d.points, d.growth, 1};
}

hl_status hl_rigidity(const hl_rigidity_options* o, const char* csv_path, hl_rigidity_row* rows,
                      hl_rigidity_verdict* verdict) {
  return guard([&] {
    need(o, "options");
    need(rows, "rows");
    RigidityConfig cfg;
    cfg.n = o->n;
    require(o->radii_count > 0, ErrorKind::config, "at least one radius required");
    need(o->radii, "radii");
    cfg.radii.assign(o->radii, o->radii + o->radii_count);
    cfg.eps = o->eps;
    cfg.points = o->points;
    cfg.growth = o->growth;
    cfg.threads = o->threads;
    rigidity_problem(cfg, cfg.radii.front()).validate();
    const auto table = rigidity_experiment(cfg);
    if (csv_path) {
      std::ofstream os(csv_path, std::ios::binary);
      if (!os) fail(ErrorKind::io, std::string("cannot open ") + csv_path + " for writing");
      write_rigidity_csv(os, table, cfg.eps);
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
      const auto& r = table[i];
      hl_rigidity_row row{};
      row.R = r.R;
      row.h = r.h;
      row.h_unit = r.h_unit;
      row.status = status_of(r.status);
      row.newton_iter = r.newton_iter;
      const auto d = r.hessian_center.dense();
      std::copy(d.begin(), d.end(), row.hessian_center);
      row.deviation = r.deviation;
      row.holder_proxy = r.holder_proxy;
      row.fit_residual = r.fit_residual;
      row.fit_bound = r.fit_bound;
      rows[i] = row;
    }
    if (verdict) {
      const auto v = rigidity_verdict(table, cfg.eps);
      *verdict = {v.all_solved, v.holder_nonincreasing, v.fit_decreasing, v.fit_within_bound, v.passed};
    }
  });
}

} // extern "C"
