#ifndef HESSLAB_HESSLAB_H
#define HESSLAB_HESSLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define HL_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define HL_API __attribute__((visibility("default")))
#else
#  define HL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every function returns HL_OK or an error code; hl_last_error() then holds
 * a message for the calling thread. Output parameters are untouched on
 * error. */
typedef enum hl_status {
  HL_OK = 0,
  HL_ERR_ARGUMENT = 1,
  HL_ERR_PRECONDITION = 2,
  HL_ERR_DEGENERATE_GAP = 3,
  HL_ERR_BRANCH = 4,
  HL_ERR_NUMERICAL = 5,
  HL_ERR_CONFIG = 6,
  HL_ERR_DISCRETIZATION = 7,
  HL_ERR_DATA = 8,
  HL_ERR_IO = 9,
  HL_ERR_SAMPLER = 10,
  HL_ERR_FIT = 11,
  HL_ERR_INTERNAL = 12
} hl_status;

HL_API const char* hl_version(void);
HL_API const char* hl_status_name(hl_status s);
HL_API const char* hl_last_error(void);

/* 64-bit FNV-1a of a byte string. */
HL_API uint64_t hl_fnv1a(const char* data, size_t len);

/* ---- symmetric functions ------------------------------------------------ */

HL_API hl_status hl_sigma(const double* lambda, size_t n, int k, double* out);
/* sigma_k with the 0-based indices in `excluded` removed. */
HL_API hl_status hl_sigma_excluding(const double* lambda, size_t n, int k, const size_t* excluded,
                                   size_t n_excluded, double* out);
/* out[i] = sigma_{k-1}(lambda|i). */
HL_API hl_status hl_sigma_gradient(const double* lambda, size_t n, int k, double* out);
/* *out = 1 iff sigma_1..sigma_k are all positive. */
HL_API hl_status hl_in_cone(const double* lambda, size_t n, int k, int* out);

/* ---- spectral ----------------------------------------------------------- */

/* Row-major symmetric n x n input; eigenvalues descending, eigenvectors as
 * rows of `vectors` (n*n). */
HL_API hl_status hl_eigen(const double* w, size_t n, double* values, double* vectors);
HL_API hl_status hl_F_value(const double* w, size_t n, int k, double* out);
/* d^2/dt^2 sigma_k(lambda(W + tA)) at t = 0. */
HL_API hl_status hl_F_second_form(const double* w, const double* a, size_t n, int k, double* out);

/* ---- concavity ---------------------------------------------------------- */

typedef struct hl_constants {
  double A;
  double C_lambda1;
  double delta0;
  double K;
  double Fmax;
} hl_constants;

HL_API hl_status hl_reference_constants(int n, double Fmax, hl_constants* out);
/* HL_ERR_CONFIG if the constants violate the branch constraints for n. */
HL_API hl_status hl_validate_constants(int n, const hl_constants* c);

typedef enum hl_branch { HL_SEMICONVEX = 0, HL_NONSEMICONVEX = 1, HL_FULL_MULTIPLICITY = 2 } hl_branch;

/* lambda descending in Gamma_{n-1}, lambda_1 of multiplicity m, xi zero on
 * indices 1..m-1. certificate_ok is -1 outside the nonsemiconvex branch. */
HL_API hl_status hl_deficit(const double* lambda, size_t n, int m, const double* xi, double K, double delta0,
                           double A, double* deficit, hl_branch* branch, int* certificate_ok);
/* Minimum over unit admissible xi; xi_out (n entries) may be NULL. */
HL_API hl_status hl_worst_case_deficit(const double* lambda, size_t n, int m, double K, double delta0,
                                      double* out, double* xi_out);
/* *out = 1 iff y^T y + D is positive definite (determinant lemma). */
HL_API hl_status hl_rank_one_definite(const double* y, const double* d, size_t n, int* out);

/* ---- verification campaigns ----------------------------------------------- */

typedef struct hl_props_options {
  uint64_t seed;
  size_t samples;        /* per (n, k) */
  size_t matrix_samples;
  size_t algebra_samples;
  int n_min;
  int n_max;
  int threads;
  int inject_fault;
} hl_props_options;

typedef struct hl_props_summary {
  size_t properties;
  size_t failures;
  int passed;
} hl_props_summary;

HL_API void hl_props_defaults(hl_props_options* o);
/* Writes the per-property CSV to csv_path (NULL to skip). Failures are
 * listed in hl_last_error() when passed == 0. */
HL_API hl_status hl_verify_props(const hl_props_options* o, const char* csv_path, hl_props_summary* out);

typedef enum hl_profile {
  HL_PROFILE_INTERIOR = 1,
  HL_PROFILE_NEAR_BOUNDARY = 2,
  HL_PROFILE_LARGE_NEGATIVE = 4,
  HL_PROFILE_CLUSTERED_TOP = 8,
  HL_PROFILE_FULL_MULTIPLICITY = 16
} hl_profile;

/* Comma-separated profile names to a bit mask. */
HL_API hl_status hl_parse_profiles(const char* names, unsigned* mask);

typedef struct hl_concavity_options {
  int n;
  unsigned profiles;     /* hl_profile bits; 0 means the four default profiles */
  size_t samples;
  uint64_t seed;
  hl_constants constants;
  int search;            /* run the constant grid search first and use its choice */
  int threads;
} hl_concavity_options;

typedef struct hl_branch_stats {
  size_t count;
  size_t gated_count;
  double min_deficit;
  double min_worst;
} hl_branch_stats;

typedef struct hl_concavity_summary {
  hl_constants constants;  /* the constants actually used */
  hl_branch_stats branches[3];
  hl_branch_stats overall;
  double gated_min_deficit;
  double gated_min_worst;
  double min_worst_k1;
  size_t certificate_failures;
  int passed;
} hl_concavity_summary;

/* Fills n-dependent defaults: reference constants, 1e5 samples, default seed. */
HL_API hl_status hl_concavity_defaults(int n, hl_concavity_options* o);
/* Any path may be NULL. search_csv is written only when o->search is set. */
HL_API hl_status hl_verify_concavity(const hl_concavity_options* o, const char* csv_path, const char* summary_path,
                                    const char* search_csv, hl_concavity_summary* out);

/* ---- problems, fields and the solver -------------------------------------- */

typedef struct hl_problem hl_problem;
typedef struct hl_field hl_field;

HL_API hl_status hl_problem_load(const char* path, hl_problem** out);
HL_API hl_status hl_problem_from_json(const char* json, hl_problem** out);
HL_API hl_status hl_problem_radial(int n, double radius, int points, hl_problem** out);
HL_API void hl_problem_free(hl_problem* p);
HL_API hl_status hl_problem_set_threads(hl_problem* p, int threads);
HL_API int hl_problem_dim(const hl_problem* p);
/* Canonical JSON of the problem. Copies at most cap bytes including the
 * terminator; *needed receives the full size including the terminator. */
HL_API hl_status hl_problem_json(const hl_problem* p, char* buf, size_t cap, size_t* needed);

typedef enum hl_solver_status {
  HL_SOLVER_CONVERGED = 0,
  HL_SOLVER_ADMISSIBILITY_BARRIER = 1,
  HL_SOLVER_LINEAR_SOLVE = 2,
  HL_SOLVER_MAX_ITERATIONS = 3,
  HL_SOLVER_INADMISSIBLE_START = 4
} hl_solver_status;

HL_API const char* hl_solver_status_name(hl_solver_status s);

typedef struct hl_solve_report {
  hl_solver_status status;
  int newton_iter;
  double residual_norm;
  double admissible_fraction;
  double damping;
  size_t interior_points;
  char message[256];
} hl_solve_report;

/* Runs damped Newton. Returns HL_OK whenever a field was produced, including
 * non-converged runs; report->status tells them apart. */
HL_API hl_status hl_solve(const hl_problem* p, hl_field** field, hl_solve_report* report);
/* Residual max-norms of the accepted iterates of the last hl_solve on this
 * thread, starting with the initial guess. */
HL_API size_t hl_last_residual_history(double* out, size_t cap);

HL_API void hl_field_free(hl_field* f);
HL_API hl_status hl_field_read(const char* path, hl_field** out);
HL_API hl_status hl_field_write(const hl_field* f, const char* path);
HL_API hl_status hl_field_write_csv(const hl_field* f, const char* path);
HL_API int hl_field_dim(const hl_field* f);
HL_API double hl_field_spacing(const hl_field* f);
HL_API size_t hl_field_size(const hl_field* f);
HL_API size_t hl_field_interior_count(const hl_field* f);
HL_API hl_status hl_field_values(const hl_field* f, double* out, size_t cap);
/* max over interior points of |u - a (|x|^2 - R^2) / 2|. */
HL_API hl_status hl_field_radial_error(const hl_field* f, double a, double R, double* out);

/* ---- experiments ---------------------------------------------------------- */

typedef struct hl_scan_result {
  double beta;
  double B;
  double sup_value;
  double argmax[4];
  int argmax_strict;
} hl_scan_result;

/* One scan per beta; the CSV (optional) holds all of them side by side. */
HL_API hl_status hl_scan_pogorelov(const hl_field* f, const double* betas, size_t count, const char* csv_path,
                                  hl_scan_result* out);
HL_API hl_status hl_test_function(const hl_field* f, double beta, double B, hl_scan_result* out);

/* A is n*n row-major, b has n entries. */
HL_API hl_status hl_quadratic_fit(const hl_field* f, double* A, double* b, double* c, double* max_residual);

typedef struct hl_rigidity_options {
  int n;
  const double* radii;
  size_t radii_count;
  double eps;
  int points;
  double growth;
  int threads;
} hl_rigidity_options;

typedef struct hl_rigidity_row {
  double R;
  double h;
  double h_unit;
  hl_solver_status status;
  int newton_iter;
  double hessian_center[16]; /* n*n row-major */
  double deviation;
  double holder_proxy;
  double fit_residual;
  double fit_bound;
} hl_rigidity_row;

typedef struct hl_rigidity_verdict {
  int all_solved;
  int holder_nonincreasing;
  int fit_decreasing;
  int fit_within_bound;
  int passed;
} hl_rigidity_verdict;

HL_API void hl_rigidity_defaults(hl_rigidity_options* o);
/* rows must hold radii_count entries. */
HL_API hl_status hl_rigidity(const hl_rigidity_options* o, const char* csv_path, hl_rigidity_row* rows,
                            hl_rigidity_verdict* verdict);

#ifdef __cplusplus
}
#endif

#endif
