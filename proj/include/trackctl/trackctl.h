/*
 * trackctl C interface.
 *
 * Handles are opaque and owned by the caller once returned; release them
 * with the matching *_free function. Every fallible call returns a
 * tc_status; on failure tc_last_error() describes the problem (the message is
 * thread-local and valid until the next failing call on the same thread).
 * Matrices are passed row-major.
 */
#ifndef TRACKCTL_TRACKCTL_H_
#define TRACKCTL_TRACKCTL_H_

#include <stddef.h>

#if defined(_WIN32)
#  if defined(TRACKCTL_BUILDING)
#    define TRACKCTL_API __declspec(dllexport)
#  else
#    define TRACKCTL_API __declspec(dllimport)
#  endif
#else
#  define TRACKCTL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tc_status {
  TC_OK = 0,
  TC_ERR_INVALID = 1,           /* malformed input; tc_last_error names the field */
  TC_ERR_NO_CONVERGENCE = 2,    /* solver hit its iteration cap; result still returned */
  TC_ERR_REGULARITY = 3,        /* target lacks the required derivatives */
  TC_ERR_COMPATIBILITY = 4,     /* target inconsistent with the initial state */
  TC_ERR_NOT_CONTROLLABLE = 5,
  TC_ERR_ALL_ZERO_OUTPUT = 6,
  TC_ERR_ZERO_COEFFICIENT = 7,
  TC_ERR_TOO_LARGE = 8,
  TC_ERR_SINGULAR = 9,
  TC_ERR_IO = 10,
  TC_ERR_INTERNAL = 11
} tc_status;

typedef struct tc_problem tc_problem;
typedef struct tc_result tc_result;

/* Optional command-line style overrides applied on top of the problem file.
 * Zero-initialize and set the has_* flags for fields to replace. */
typedef struct tc_overrides {
  int has_T;
  double T;
  int has_N;
  int N;
  int has_alpha;
  double alpha;
  int has_beta;
  double beta;
  int has_cg_tol;
  double cg_tol;
} tc_overrides;

TRACKCTL_API const char* tc_version(void);
TRACKCTL_API const char* tc_last_error(void);
TRACKCTL_API const char* tc_status_name(tc_status status);

/* Problem documents (JSON text). overrides may be NULL. */
TRACKCTL_API tc_status tc_problem_parse(const char* json_text, const tc_overrides* overrides,
                                        tc_problem** out);
TRACKCTL_API void tc_problem_free(tc_problem* problem);
/* Canonical JSON with 17 significant digits per real. Owned by the problem. */
TRACKCTL_API const char* tc_problem_json(const tc_problem* problem);

/* Runs one of: brunovsky, track, hum, pde-heat, pde-wave, gramian, moment,
 * sweep. threads caps the sweep fan-out (0: TRACKCTL_THREADS or all cores).
 * On TC_ERR_NO_CONVERGENCE *out is still populated. */
TRACKCTL_API tc_status tc_run(const tc_problem* problem, const char* subcommand,
                              unsigned threads, tc_result** out);
TRACKCTL_API void tc_result_free(tc_result* result);

TRACKCTL_API size_t tc_result_rows(const tc_result* result);
TRACKCTL_API size_t tc_result_cols(const tc_result* result);
TRACKCTL_API const char* tc_result_column_name(const tc_result* result, size_t col);
TRACKCTL_API double tc_result_value(const tc_result* result, size_t row, size_t col);
/* Value of a named metric (MSE, MAXERR, ITERS, ...); TC_ERR_INVALID if absent. */
TRACKCTL_API tc_status tc_result_metric(const tc_result* result, const char* name, double* value);
/* "MSE=<v> MAXERR=<v> ITERS=<n>" style summary. */
TRACKCTL_API const char* tc_result_metrics_line(const tc_result* result);
/* Default CSV file name for this result (e.g. "trajectory.csv"). */
TRACKCTL_API const char* tc_result_csv_name(const tc_result* result);
/* Extra details as JSON text. */
TRACKCTL_API const char* tc_result_details_json(const tc_result* result);
TRACKCTL_API int tc_result_converged(const tc_result* result);

TRACKCTL_API tc_status tc_result_write_csv(const tc_result* result, const char* path);
/* Gnuplot script reading csv_relpath (relative to the script's directory). */
TRACKCTL_API tc_status tc_result_write_plot_script(const tc_result* result, const char* csv_relpath,
                                                   const char* path);

/* Dense kernels. */
TRACKCTL_API tc_status tc_mat_exp(const double* a, size_t n, double t, double* out);
TRACKCTL_API tc_status tc_char_poly(const double* a, size_t n, double* alpha_out);
/* Brunovsky transform of (A, b): writes P (n x n) and alpha (n). */
TRACKCTL_API tc_status tc_brunovsky(const double* a, const double* b, size_t n, double* p_out,
                                    double* alpha_out);

#ifdef __cplusplus
}
#endif

#endif /* TRACKCTL_TRACKCTL_H_ */
