#ifndef TODA_TODA_H
#define TODA_TODA_H

/* C interface to the periodic Toda lattice library.
 *
 * Every function returns a toda_status. On failure the message is available
 * from toda_last_error() on the calling thread until the next call. Objects
 * returned through out-parameters are owned by the caller and released with
 * the matching destroy function. Matrices are written row-major. */

#include <stddef.h>

#if defined(TODA_BUILDING_LIBRARY)
#define TODA_API __attribute__((visibility("default")))
#else
#define TODA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum toda_status {
    TODA_OK = 0,
    TODA_ERR_INVALID_ARGUMENT = 1,
    TODA_ERR_DOMAIN = 2,
    TODA_ERR_CONFIG = 3,
    TODA_ERR_NUMERICAL = 4,
    TODA_ERR_NO_CONVERGENCE = 5,
    TODA_ERR_IO = 6,
    TODA_ERR_INTERNAL = 7
} toda_status;

typedef enum toda_lax_class { TODA_EVEN = 0, TODA_ODD = 1 } toda_lax_class;

typedef struct toda_point toda_point;
typedef struct toda_context toda_context;
typedef struct toda_text toda_text;

TODA_API const char* toda_version(void);
TODA_API const char* toda_status_name(toda_status status);
/* Message of the last failure on this thread, "" after a success. */
TODA_API const char* toda_last_error(void);

/* Phase points. q and p hold n values each. */
TODA_API toda_status toda_point_create(int n, const double* q, const double* p, toda_point** out);
/* Relative equilibrium q_k = q0, p_k = p0. */
TODA_API toda_status toda_point_create_omega(int n, double q0, double p0, toda_point** out);
TODA_API void toda_point_destroy(toda_point* point);
TODA_API int toda_point_size(const toda_point* point);

/* n*n entries of L (TODA_EVEN) or Lbar (TODA_ODD). */
TODA_API toda_status toda_lax_matrix(const toda_point* point, toda_lax_class c, double* out);
/* n*n entries of the generator M_(j), 1 <= j <= n. */
TODA_API toda_status toda_generator_matrix(const toda_point* point, int j, toda_lax_class c, double* out);
/* F_1..F_n with F_j = Tr L^j / j. */
TODA_API toda_status toda_integrals(const toda_point* point, double* out);
/* n eigenvalues, descending. */
TODA_API toda_status toda_eigenvalues(const toda_point* point, toda_lax_class c, double* out);
/* n*n matrix of brackets {F_i, F_j}. */
TODA_API toda_status toda_poisson_integrals(const toda_point* point, double* out);
/* Numerical corank of dF and the degenerate pair counts of L and Lbar.
 * Pass 0 for either tolerance to use the default. */
TODA_API toda_status toda_corank(const toda_point* point, double rank_tol, double degeneracy_tol, int* corank,
                                 int* nu, int* nubar, int* inconclusive);

/* Verification context. config_json may be NULL for the defaults; the worker
 * count starts from TODA_LAX_THREADS. */
TODA_API toda_status toda_context_create(const char* config_json, toda_context** out);
/* Keys: n, n_min, n_max, seed, random_points, suite, flow_t_final,
 * tol.<name>, threads, timings. */
TODA_API toda_status toda_context_set(toda_context* ctx, const char* key, const char* value);
TODA_API void toda_context_destroy(toda_context* ctx);

/* Runs the configured suites. Check failures are reported through *failures,
 * not the status. */
TODA_API toda_status toda_run_verify(toda_context* ctx, toda_text** report_json, int* failures, int* inconclusive);
TODA_API toda_status toda_run_singular(const char* request_json, toda_text** result_json);
/* trace_csv may be NULL. */
TODA_API toda_status toda_run_maslov(const char* curve_json, toda_text** result_json, toda_text** trace_csv);
/* summary_json may be NULL. */
TODA_API toda_status toda_run_integrate(const char* request_json, toda_text** trajectory_csv, toda_text** summary_json);

TODA_API const char* toda_text_data(const toda_text* text);
TODA_API size_t toda_text_size(const toda_text* text);
TODA_API void toda_text_destroy(toda_text* text);

#ifdef __cplusplus
}
#endif

#endif
