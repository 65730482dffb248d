/* C interface to the interval scan library. All entry points return a
 * status code; outputs are written through pointers. Handles are opaque and
 * released with the matching _destroy/_free call. A failed call stores a
 * human-readable message retrievable with mmdscan_last_error() (per thread).
 */
#ifndef MMDSCAN_H
#define MMDSCAN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmdscan_status {
    MMDSCAN_OK = 0,
    MMDSCAN_ERR_INVALID_ARGUMENT = 1,
    MMDSCAN_ERR_INSUFFICIENT_SAMPLES = 2,
    MMDSCAN_ERR_BOUNDS = 3,
    MMDSCAN_ERR_CAPACITY = 4,
    MMDSCAN_ERR_IO = 5,
    MMDSCAN_ERR_PARSE = 6,
    MMDSCAN_ERR_INTERNAL = 7
} mmdscan_status;

const char* mmdscan_status_name(mmdscan_status status);
const char* mmdscan_last_error(void);
const char* mmdscan_version(void);

/* ---- kernels ---- */

typedef struct mmdscan_kernel mmdscan_kernel;

/* kind is "gaussian" or "laplace"; sigma is the bandwidth. */
mmdscan_status mmdscan_kernel_create(const char* kind, double sigma,
                                     mmdscan_kernel** out_kernel);
void mmdscan_kernel_destroy(mmdscan_kernel* kernel);
mmdscan_status mmdscan_kernel_evaluate(const mmdscan_kernel* kernel, double x, double y,
                                       double* out_value);
mmdscan_status mmdscan_kernel_bound(const mmdscan_kernel* kernel, double* out_bound);

/* ---- discrepancy estimates ---- */

mmdscan_status mmdscan_mmd2_unbiased(const mmdscan_kernel* kernel, const double* x,
                                     size_t x_len, const double* y, size_t y_len,
                                     int threads, double* out_value);
mmdscan_status mmdscan_mmd2_population_gaussian(double mean1, double var1, double mean2,
                                                double var2, double sigma,
                                                double* out_value);

/* ---- thresholds and length bounds ---- */

mmdscan_status mmdscan_threshold_known(double mmd2, double delta, double* out_value);
mmdscan_status mmdscan_threshold_decaying(size_t n, double* out_value);
mmdscan_status mmdscan_i_min_bound(double kernel_bound, double threshold, double eta,
                                   size_t n, size_t* out_length);

/* ---- scans ---- */

enum {
    MMDSCAN_ALGORITHM_EXHAUSTIVE = 0,
    MMDSCAN_ALGORITHM_MULTISCALE = 1
};
enum {
    MMDSCAN_THRESHOLD_FIXED = 0,
    MMDSCAN_THRESHOLD_KNOWN_MMD = 1,
    MMDSCAN_THRESHOLD_DECAYING = 2
};
enum {
    MMDSCAN_MODE_AUTO = -1,
    MMDSCAN_MODE_DENSE = 0,
    MMDSCAN_MODE_STREAMING = 1
};

typedef struct mmdscan_scan_config {
    int algorithm;       /* MMDSCAN_ALGORITHM_* */
    size_t i_min;        /* minimum candidate interval length, >= 2 */
    int threshold_mode;  /* MMDSCAN_THRESHOLD_* */
    double threshold;    /* fixed mode */
    double known_mmd2;   /* known-discrepancy mode */
    double known_delta;  /* known-discrepancy mode */
    double eta;          /* > 0 */
    double t_prime;      /* multiscale pre-scan threshold; <= 0 means t / 2 */
    double delta_alg;    /* multiscale cardinality slack; <= 0 means eta */
    int levels;          /* extension level; <= 0 means the eta-derived value */
    int summary_mode;    /* MMDSCAN_MODE_* */
    size_t dense_limit;  /* dense-table size guard */
    int threads;         /* 0 = auto */
} mmdscan_scan_config;

void mmdscan_scan_config_init(mmdscan_scan_config* config);

typedef struct mmdscan_scan_result mmdscan_scan_result;

mmdscan_status mmdscan_scan(const double* reference, size_t reference_len,
                            const double* observed, size_t observed_len,
                            const mmdscan_kernel* kernel,
                            const mmdscan_scan_config* config,
                            mmdscan_scan_result** out_result);
void mmdscan_scan_result_destroy(mmdscan_scan_result* result);

/* 0 = H0, 1 = H1 */
int mmdscan_scan_result_decision(const mmdscan_scan_result* result);
int mmdscan_scan_result_has_best_interval(const mmdscan_scan_result* result);
size_t mmdscan_scan_result_best_start(const mmdscan_scan_result* result);
size_t mmdscan_scan_result_best_length(const mmdscan_scan_result* result);
double mmdscan_scan_result_best_statistic(const mmdscan_scan_result* result);
uint64_t mmdscan_scan_result_evaluations(const mmdscan_scan_result* result);
/* "none", "cardinality", "prescan_max", "extension_max" or "exhaustive_max" */
const char* mmdscan_scan_result_trigger(const mmdscan_scan_result* result);
double mmdscan_scan_result_threshold(const mmdscan_scan_result* result);

/* ---- interval structure dumps (CSV: level,start,length) ---- */

mmdscan_status mmdscan_dyadic_grid_csv(size_t n, char** out_csv);
mmdscan_status mmdscan_extensions_csv(size_t n, size_t start, size_t length, int level,
                                      char** out_csv);

/* ---- experiment plans ---- */

typedef struct mmdscan_plan mmdscan_plan;
typedef struct mmdscan_results mmdscan_results;

mmdscan_status mmdscan_plan_parse(const char* json_text, mmdscan_plan** out_plan);
mmdscan_status mmdscan_plan_load(const char* path, mmdscan_plan** out_plan);
void mmdscan_plan_destroy(mmdscan_plan* plan);
mmdscan_status mmdscan_plan_set_seed(mmdscan_plan* plan, uint64_t seed);
mmdscan_status mmdscan_plan_get_seed(const mmdscan_plan* plan, uint64_t* out_seed);

mmdscan_status mmdscan_plan_run(const mmdscan_plan* plan, int threads,
                                mmdscan_results** out_results);
void mmdscan_results_destroy(mmdscan_results* results);
size_t mmdscan_results_rows(const mmdscan_results* results);
mmdscan_status mmdscan_results_csv(const mmdscan_results* results, char** out_text);
mmdscan_status mmdscan_results_json(const mmdscan_results* results, char** out_text);

/* ---- series files (one real per line) ---- */

mmdscan_status mmdscan_read_series(const char* path, double** out_values,
                                   size_t* out_len);

void mmdscan_buffer_free(double* values);
void mmdscan_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* MMDSCAN_H */
