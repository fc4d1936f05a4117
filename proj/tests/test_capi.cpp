#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include <hesslab/hesslab.h>

extern "C" int hl_c_header_sigma(double* out);

namespace {

std::string scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "hesslab_capi";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

} // namespace

TEST_CASE("header compiles as C") {
  double s = 0.0;
  CHECK(hl_c_header_sigma(&s) == 0);
  CHECK(s == 11.0);
}

TEST_CASE("version and status names") {
  CHECK(std::strlen(hl_version()) > 0);
  CHECK(std::string(hl_status_name(HL_OK)) == "ok");
  CHECK(std::string(hl_solver_status_name(HL_SOLVER_CONVERGED)) == "converged");
  CHECK(hl_fnv1a("", 0) == 0xcbf29ce484222325ULL);
  CHECK(hl_fnv1a("a", 1) == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("symmetric functions through the C API") {
  const double lam[] = {1.0, 2.0, 3.0};
  double v = 0.0;
  REQUIRE(hl_sigma(lam, 3, 2, &v) == HL_OK);
  CHECK(v == 11.0);
  const size_t ex[] = {0};
  REQUIRE(hl_sigma_excluding(lam, 3, 1, ex, 1, &v) == HL_OK);
  CHECK(v == 5.0);
  double g[3];
  REQUIRE(hl_sigma_gradient(lam, 3, 2, g) == HL_OK);
  CHECK(g[0] == 5.0);
  CHECK(g[2] == 3.0);
  int member = -1;
  const double out_of_cone[] = {5.0, 1.0, -1.0};
  REQUIRE(hl_in_cone(out_of_cone, 3, 2, &member) == HL_OK);
  CHECK(member == 0);

  v = -7.0;
  CHECK(hl_sigma(lam, 3, 4, &v) == HL_ERR_ARGUMENT);
  CHECK(v == -7.0);
  CHECK(std::strlen(hl_last_error()) > 0);
  CHECK(hl_sigma(nullptr, 3, 1, &v) == HL_ERR_ARGUMENT);
}

TEST_CASE("spectral functions through the C API") {
  const double w[] = {2.0, 1.0, 1.0, 2.0};
  double vals[2], vecs[4];
  REQUIRE(hl_eigen(w, 2, vals, vecs) == HL_OK);
  CHECK(vals[0] == doctest::Approx(3.0));
  CHECK(vals[1] == doctest::Approx(1.0));
  CHECK(vecs[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  const double d[] = {1, 0, 0, 0, 2, 0, 0, 0, 3};
  const double e12[] = {0, 1, 0, 1, 0, 0, 0, 0, 0};
  double f = 0.0;
  REQUIRE(hl_F_value(d, 3, 2, &f) == HL_OK);
  CHECK(f == doctest::Approx(11.0));
  REQUIRE(hl_F_second_form(d, e12, 3, 2, &f) == HL_OK);
  CHECK(f == doctest::Approx(-2.0));
  const double asym[] = {1.0, 2.0, 0.0, 1.0};
  CHECK(hl_F_value(asym, 2, 1, &f) == HL_ERR_ARGUMENT);
}

TEST_CASE("concavity through the C API") {
  hl_constants c;
  REQUIRE(hl_reference_constants(3, 1.0, &c) == HL_OK);
  CHECK(c.delta0 == doctest::Approx(1.0 / 15.0));
  CHECK(c.K == 9.0);
  CHECK(hl_validate_constants(3, &c) == HL_OK);
  hl_constants bad = c;
  bad.delta0 = 0.9;
  CHECK(hl_validate_constants(3, &bad) == HL_ERR_CONFIG);

  const double lam[] = {2.0, 2.0, 2.0}, xi[] = {1.0, 0.0, 0.0};
  double def = 0.0;
  hl_branch br = HL_SEMICONVEX;
  int cert = 5;
  REQUIRE(hl_deficit(lam, 3, 3, xi, 2.0, 0.05, c.A, &def, &br, &cert) == HL_OK);
  CHECK(def == doctest::Approx(4.0 * 2.0 / 3.0 - 2.0 * 1.05));
  CHECK(br == HL_FULL_MULTIPLICITY);
  CHECK(cert == -1);
  double worst = 0.0;
  REQUIRE(hl_worst_case_deficit(lam, 3, 3, 9.0, 1.0 / 15.0, &worst, nullptr) == HL_OK);
  CHECK(worst == doctest::Approx(12.0 - 2.0 * 16.0 / 15.0));

  const double gap[] = {2.0, 2.0, 1.0};
  CHECK(hl_deficit(gap, 3, 1, xi, 9.0, 0.05, c.A, &def, &br, &cert) == HL_ERR_DEGENERATE_GAP);

  const double y[] = {1.0, 1.0}, dpos[] = {2.0, 3.0}, dneg[] = {1.0, -5.0};
  int definite = -1;
  REQUIRE(hl_rank_one_definite(y, dpos, 2, &definite) == HL_OK);
  CHECK(definite == 1);
  REQUIRE(hl_rank_one_definite(y, dneg, 2, &definite) == HL_OK);
  CHECK(definite == 0);
}

TEST_CASE("campaign drivers through the C API") {
  hl_props_options po;
  hl_props_defaults(&po);
  po.samples = 200;
  po.matrix_samples = 50;
  po.algebra_samples = 200;
  hl_props_summary ps;
  REQUIRE(hl_verify_props(&po, scratch("props.csv").c_str(), &ps) == HL_OK);
  CHECK(ps.passed == 1);
  CHECK(ps.properties > 0);
  po.inject_fault = 1;
  REQUIRE(hl_verify_props(&po, nullptr, &ps) == HL_OK);
  CHECK(ps.passed == 0);
  CHECK(ps.failures > 0);
  po.samples = 0;
  CHECK(hl_verify_props(&po, nullptr, &ps) == HL_ERR_CONFIG);

  unsigned mask = 0;
  REQUIRE(hl_parse_profiles("interior,large_negative", &mask) == HL_OK);
  CHECK(mask == (HL_PROFILE_INTERIOR | HL_PROFILE_LARGE_NEGATIVE));
  CHECK(hl_parse_profiles("sideways", &mask) == HL_ERR_CONFIG);

  hl_concavity_options co;
  REQUIRE(hl_concavity_defaults(3, &co) == HL_OK);
  co.samples = 2000;
  hl_concavity_summary cs;
  REQUIRE(hl_verify_concavity(&co, nullptr, nullptr, nullptr, &cs) == HL_OK);
  CHECK(cs.passed == 1);
  CHECK(cs.overall.count == 2000);
  CHECK(cs.certificate_failures == 0);
  co.constants.delta0 = 0.9;
  CHECK(hl_verify_concavity(&co, nullptr, nullptr, nullptr, &cs) == HL_ERR_CONFIG);
}

TEST_CASE("solve, snapshot and scan through the C API") {
  hl_problem* p = nullptr;
  REQUIRE(hl_problem_radial(3, 1.0, 17, &p) == HL_OK);
  CHECK(hl_problem_dim(p) == 3);
  size_t needed = 0;
  REQUIRE(hl_problem_json(p, nullptr, 0, &needed) == HL_OK);
  std::vector<char> buf(needed);
  REQUIRE(hl_problem_json(p, buf.data(), buf.size(), &needed) == HL_OK);
  hl_problem* q = nullptr;
  REQUIRE(hl_problem_from_json(buf.data(), &q) == HL_OK);
  hl_problem_free(q);

  hl_field* f = nullptr;
  hl_solve_report rep;
  REQUIRE(hl_solve(p, &f, &rep) == HL_OK);
  CHECK(rep.status == HL_SOLVER_CONVERGED);
  CHECK(rep.residual_norm <= 1e-10);
  CHECK(rep.admissible_fraction == 1.0);
  CHECK(rep.interior_points == hl_field_interior_count(f));
  double hist[64];
  const size_t nh = hl_last_residual_history(hist, 64);
  CHECK(nh == static_cast<size_t>(rep.newton_iter) + 1);

  double err = 0.0;
  REQUIRE(hl_field_radial_error(f, 1.0 / std::sqrt(3.0), 1.0, &err) == HL_OK);
  CHECK(err <= hl_field_spacing(f) * hl_field_spacing(f));

  const std::string path = scratch("radial.hess");
  REQUIRE(hl_field_write(f, path.c_str()) == HL_OK);
  REQUIRE(hl_field_write_csv(f, scratch("radial.csv").c_str()) == HL_OK);
  hl_field* g = nullptr;
  REQUIRE(hl_field_read(path.c_str(), &g) == HL_OK);
  std::vector<double> a(hl_field_size(f)), b(hl_field_size(g));
  REQUIRE(hl_field_values(f, a.data(), a.size()) == HL_OK);
  REQUIRE(hl_field_values(g, b.data(), b.size()) == HL_OK);
  CHECK(a == b);

  const double betas[] = {1.0, 4.0};
  hl_scan_result sr[2];
  REQUIRE(hl_scan_pogorelov(g, betas, 2, nullptr, sr) == HL_OK);
  CHECK(sr[0].sup_value == doctest::Approx(1.0 / 6.0).epsilon(0.02));
  CHECK(sr[1].argmax_strict == 1);
  hl_scan_result tf;
  REQUIRE(hl_test_function(g, 4.0, 0.0, &tf) == HL_OK);
  CHECK(tf.argmax_strict == 1);

  double A[9], bb[3], c = 0.0, res = 0.0;
  REQUIRE(hl_quadratic_fit(g, A, bb, &c, &res) == HL_OK);
  CHECK(A[0] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-2));

  hl_field_free(g);
  hl_field_free(f);
  hl_problem_free(p);

  std::ofstream(scratch("junk.hess"), std::ios::binary) << "garbage";
  hl_field* h = nullptr;
  CHECK(hl_field_read(scratch("junk.hess").c_str(), &h) == HL_ERR_DATA);
  CHECK(h == nullptr);
  CHECK(std::string(hl_last_error()).find("magic") != std::string::npos);

  CHECK(hl_problem_from_json(R"({"n": 3, "psi": {"kind": "constant", "params": {"c": -2}}})", &q) == HL_ERR_CONFIG);
  CHECK(hl_problem_from_json("{not json", &q) == HL_ERR_CONFIG);
  CHECK(hl_problem_load(scratch("nowhere.json").c_str(), &q) == HL_ERR_CONFIG);
}

TEST_CASE("rigidity through the C API") {
  hl_rigidity_options o;
  hl_rigidity_defaults(&o);
  const double radii[] = {1.0, 2.0};
  o.radii = radii;
  o.radii_count = 2;
  o.eps = 0.0;
  o.points = 17;
  hl_rigidity_row rows[2];
  hl_rigidity_verdict v;
  REQUIRE(hl_rigidity(&o, nullptr, rows, &v) == HL_OK);
  CHECK(v.passed == 1);
  CHECK(rows[1].R == 2.0);
  CHECK(rows[0].hessian_center[0] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-3));
}
