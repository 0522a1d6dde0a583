/*
 * C API for the density ratio permutation test library.
 *
 * All functions return a drpt_status; every non-OK status leaves a
 * human-readable message retrievable with drpt_last_error() (thread-local).
 * Objects are opaque handles created by *_new/*_from_* constructors and
 * released with the matching *_free; strings returned through char** are
 * heap-allocated and must be released with drpt_string_free.
 */
#ifndef DRPT_H
#define DRPT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DRPT_API __declspec(dllexport)
#else
#define DRPT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum drpt_status {
    DRPT_OK = 0,
    DRPT_ERR_INVALID_ARGUMENT,
    DRPT_ERR_PARSE,
    DRPT_ERR_IO,
    DRPT_ERR_NON_POSITIVE_RATIO,
    DRPT_ERR_DOMAIN_MISMATCH,
    DRPT_ERR_NO_BRACKET,
    DRPT_ERR_NO_CONVERGENCE,
    DRPT_ERR_TOO_LARGE,
    DRPT_ERR_TOO_FEW_POINTS,
    DRPT_ERR_LAMBDA_MISMATCH,
    DRPT_ERR_EMPTY_DICTIONARY,
    DRPT_ERR_DEGENERATE_SAMPLE,
    DRPT_ERR_INVALID_TABLE,
    DRPT_ERR_INFEASIBLE_TOTALS,
    DRPT_ERR_OUT_OF_RANGE,
    DRPT_ERR_ZERO_CELL,
    DRPT_ERR_EMPTY_CANDIDATES,
    DRPT_ERR_SEPARABLE_DATA,
    DRPT_ERR_ESTIMATOR_FAILURE,
    DRPT_ERR_INTERNAL
} drpt_status;

typedef enum drpt_statistic {
    DRPT_STAT_V = 0,
    DRPT_STAT_U = 1,
    DRPT_STAT_DISCRETE = 2,
    DRPT_STAT_IPM = 3
} drpt_statistic;

typedef enum drpt_kernel {
    DRPT_KERNEL_GAUSSIAN = 0,
    DRPT_KERNEL_LAPLACE = 1,
    DRPT_KERNEL_COLLISION = 2
} drpt_kernel;

typedef enum drpt_path {
    DRPT_PATH_AUTO = 0,
    DRPT_PATH_MCMC = 1,
    DRPT_PATH_EXACT = 2
} drpt_path;

typedef struct drpt_sample drpt_sample;
typedef struct drpt_ratio drpt_ratio;
typedef struct drpt_config drpt_config;
typedef struct drpt_result drpt_result;

DRPT_API const char* drpt_version(void);
DRPT_API const char* drpt_last_error(void);
DRPT_API const char* drpt_status_name(drpt_status status);
DRPT_API void drpt_string_free(char* text);

/* ---- samples ---------------------------------------------------------- */

/* Continuous pooled sample: first n rows are the first sample. */
DRPT_API drpt_status drpt_sample_continuous(const double* coords, size_t dim, size_t n,
                                            size_t m, drpt_sample** out);
/* Categorical pooled sample with codes in {0..J}. */
DRPT_API drpt_status drpt_sample_categorical(const int* codes, size_t n, size_t m,
                                             drpt_sample** out);
/* CSV with header x1..xd (or cat), sample in {1,2}, optional r column. */
DRPT_API drpt_status drpt_sample_from_csv(const char* path, drpt_sample** out);
DRPT_API void drpt_sample_free(drpt_sample* sample);

DRPT_API size_t drpt_sample_n(const drpt_sample* sample);
DRPT_API size_t drpt_sample_m(const drpt_sample* sample);
DRPT_API size_t drpt_sample_dim(const drpt_sample* sample);
DRPT_API int drpt_sample_is_categorical(const drpt_sample* sample);
/* 1 when the CSV carried an `r` column; fills it into the ratio handle. */
DRPT_API int drpt_sample_has_csv_ratio(const drpt_sample* sample);
DRPT_API drpt_status drpt_sample_csv_ratio(const drpt_sample* sample, drpt_ratio** out);

/* ---- ratio functions --------------------------------------------------- */

DRPT_API drpt_status drpt_ratio_expression(const char* text, drpt_ratio** out);
DRPT_API drpt_status drpt_ratio_table(const double* values, size_t count, drpt_ratio** out);
DRPT_API drpt_status drpt_ratio_precomputed(const double* values, size_t count,
                                            drpt_ratio** out);
/* JSON file holding either an array [r0, r1, ...] or {"r": [...]}. */
DRPT_API drpt_status drpt_ratio_table_from_json_file(const char* path, drpt_ratio** out);
DRPT_API drpt_status drpt_ratio_eval(const drpt_ratio* ratio, const drpt_sample* sample,
                                     size_t index, double* out);
DRPT_API void drpt_ratio_free(drpt_ratio* ratio);

/* ---- configuration ----------------------------------------------------- */

DRPT_API drpt_status drpt_config_new(drpt_config** out);
DRPT_API drpt_status drpt_config_set_sweeps(drpt_config* config, size_t sweeps);
DRPT_API drpt_status drpt_config_set_copies(drpt_config* config, size_t copies);
DRPT_API drpt_status drpt_config_set_seed(drpt_config* config, uint64_t seed);
DRPT_API drpt_status drpt_config_set_alpha(drpt_config* config, double alpha);
DRPT_API drpt_status drpt_config_set_statistic(drpt_config* config, drpt_statistic statistic);
DRPT_API drpt_status drpt_config_set_kernel(drpt_config* config, drpt_kernel kernel);
/* bandwidth <= 0 selects the median heuristic. */
DRPT_API drpt_status drpt_config_set_bandwidth(drpt_config* config, double bandwidth);
DRPT_API drpt_status drpt_config_set_path(drpt_config* config, drpt_path path);
/* 0 = plain acceptance, 1 = lambda-weighted. */
DRPT_API drpt_status drpt_config_set_variant(drpt_config* config, int weighted);
DRPT_API drpt_status drpt_config_set_threads(drpt_config* config, unsigned threads);
DRPT_API void drpt_config_free(drpt_config* config);

/* ---- running tests ------------------------------------------------------ */

DRPT_API drpt_status drpt_run_test(const drpt_sample* sample, const drpt_ratio* ratio,
                                   const drpt_config* config, drpt_result** out);

DRPT_API drpt_status drpt_result_p_value(const drpt_result* result, double* out);
DRPT_API drpt_status drpt_result_statistic(const drpt_result* result, double* out);
DRPT_API drpt_status drpt_result_lambda_hat(const drpt_result* result, double* out);
DRPT_API drpt_status drpt_result_reject(const drpt_result* result, int* out);
DRPT_API drpt_status drpt_result_elapsed_ms(const drpt_result* result, double* out);
DRPT_API drpt_status drpt_result_permuted_count(const drpt_result* result, size_t* out);
DRPT_API drpt_status drpt_result_permuted(const drpt_result* result, double* buffer,
                                          size_t capacity, size_t* written);
/* Deterministic JSON payload (no wall-clock fields). */
DRPT_API drpt_status drpt_result_to_json(const drpt_result* result, char** out);
DRPT_API void drpt_result_free(drpt_result* result);

/* ---- confidence sets and baselines -------------------------------------- */

/*
 * Tests the expression template (free parameter `t`) at every grid value and
 * returns CSV "candidate,p_value,accepted" rows. Each candidate receives an
 * independent seed derived from the configured master seed.
 */
DRPT_API drpt_status drpt_invert_grid(const drpt_sample* sample, const char* expr_template,
                                      const double* grid, size_t grid_len,
                                      const drpt_config* config, double alpha, char** csv_out);

/* Wald interval for the odds multiplier from two binary samples. */
DRPT_API drpt_status drpt_wald_odds_interval(int64_t x1, int64_t n, int64_t y1, int64_t m,
                                             double alpha, double* lo, double* hi);

/* ---- simulation harness -------------------------------------------------- */

/*
 * Runs a named scenario ("e1", "e1prime", "e2", "e3", "misspec", "causal",
 * "gamma1") and writes power.csv / power.svg / manifest.json / timings.csv
 * into out_dir. config_json fields: grid (array), n, m, replicates, alpha,
 * seed, sweeps, copies, threads, train_size, estimator, mu.
 */
DRPT_API drpt_status drpt_run_scenario(const char* scenario, const char* config_json,
                                       const char* out_dir, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* DRPT_H */
