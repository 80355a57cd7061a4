/*
 * C interface to the truncated beta percentile chart library.
 *
 * Every fallible call returns a tbeta_status; on failure the calling thread's
 * message is available from tbeta_last_error() until its next failing call.
 * Output parameters are written only on TBETA_OK.
 */
#ifndef TBETA_TBETA_H
#define TBETA_TBETA_H

#include <stddef.h>
#include <stdint.h>

#if defined(TBETA_BUILDING_LIBRARY)
#define TBETA_API __attribute__((visibility("default")))
#else
#define TBETA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tbeta_status {
    TBETA_OK = 0,
    TBETA_ERR_ARGUMENT = 1,    /* null pointer, bad enum, short buffer */
    TBETA_ERR_DOMAIN = 2,      /* invalid parameter or configuration */
    TBETA_ERR_DATA = 3,        /* unusable observations or input file */
    TBETA_ERR_CONVERGENCE = 4, /* numerical method failed */
    TBETA_ERR_INTERNAL = 5
} tbeta_status;

TBETA_API const char* tbeta_version(void);
TBETA_API const char* tbeta_last_error(void);
TBETA_API const char* tbeta_status_name(tbeta_status status);

/* ---- distribution ---------------------------------------------------- */

typedef struct tbeta_params {
    double theta1;
    double theta2;
    double a; /* lower truncation point */
    double b; /* upper truncation point */
} tbeta_params;

TBETA_API tbeta_status tbeta_validate_params(const tbeta_params* params);
/* int_0^c u^(theta1-1) (1-u)^(theta2-1) du */
TBETA_API tbeta_status tbeta_incomplete_beta(double c, double theta1, double theta2, double* out);
TBETA_API tbeta_status tbeta_pdf(double x, const tbeta_params* params, double* out);
TBETA_API tbeta_status tbeta_cdf(double x, const tbeta_params* params, double* out);
TBETA_API tbeta_status tbeta_quantile(double p, const tbeta_params* params, double* out);
/* Writes count draws into out. */
TBETA_API tbeta_status tbeta_sample(const tbeta_params* params, size_t count, uint64_t seed, double* out);

/* ---- observations ---------------------------------------------------- */

typedef struct tbeta_data tbeta_data;

TBETA_API tbeta_status tbeta_data_from_values(const double* values, size_t count, tbeta_data** out);
/* Observation CSV: one value per line, optional header. */
TBETA_API tbeta_status tbeta_data_from_csv(const char* path, tbeta_data** out);
TBETA_API tbeta_status tbeta_data_from_embedded(const char* name, tbeta_data** out);
TBETA_API void tbeta_data_free(tbeta_data* data);
TBETA_API size_t tbeta_data_size(const tbeta_data* data);
TBETA_API const double* tbeta_data_values(const tbeta_data* data);
/* Removes the first `count` observations. */
TBETA_API tbeta_status tbeta_data_drop_first(tbeta_data* data, size_t count);

TBETA_API size_t tbeta_embedded_count(void);
TBETA_API const char* tbeta_embedded_name(size_t index);
TBETA_API const char* tbeta_embedded_description(size_t index);

/* Header "x" then one value per line in round-trip decimal form. A null path
 * writes to standard output. */
TBETA_API tbeta_status tbeta_write_observations_csv(const double* values, size_t count, const char* path);
/* Shortest round-trip decimal form; needs capacity >= 32. */
TBETA_API tbeta_status tbeta_format_double(double value, char* buffer, size_t capacity);

/* ---- estimation ------------------------------------------------------ */

typedef struct tbeta_fit_result {
    tbeta_params params;
    double loglik;
    int converged;
    int iterations;
} tbeta_fit_result;

TBETA_API tbeta_status tbeta_log_likelihood(const double* values, size_t count, const tbeta_params* params,
                                            double* out);
/* init: null or two positive starting shapes. */
TBETA_API tbeta_status tbeta_fit(const double* values, size_t count, double a, double b, const double* init,
                                 tbeta_fit_result* out);
TBETA_API tbeta_status tbeta_percentile(const tbeta_fit_result* fit, double p, double* out);
TBETA_API tbeta_status tbeta_ks_statistic(const double* values, size_t count, const tbeta_params* params,
                                          double* out);

typedef struct tbeta_ks_pvalue_result {
    double pvalue;
    size_t used;
    size_t failed;
} tbeta_ks_pvalue_result;

/* threads = 0 uses every hardware thread; results do not depend on it. */
TBETA_API tbeta_status tbeta_ks_pvalue(double stat, size_t sample_size, const tbeta_params* params, size_t reps,
                                       uint64_t seed, unsigned threads, tbeta_ks_pvalue_result* out);
/* Asymptotic Kolmogorov p-value with the parameters treated as known. */
TBETA_API tbeta_status tbeta_ks_asymptotic_pvalue(double stat, size_t sample_size, double* out);

/* ---- chart ----------------------------------------------------------- */

typedef enum tbeta_boot_mode { TBETA_BOOT_PARAMETRIC = 0, TBETA_BOOT_POOLED_RESAMPLE = 1 } tbeta_boot_mode;

typedef enum tbeta_center_mode {
    TBETA_CENTER_BOOTSTRAP_MEAN = 0,
    TBETA_CENTER_PHASE1_ESTIMATE = 1
} tbeta_center_mode;

typedef struct tbeta_chart_config {
    double p;
    double far;
    size_t boot_reps;
    int boot_mode;   /* tbeta_boot_mode */
    int center_mode; /* tbeta_center_mode */
    uint64_t seed;
    unsigned threads;
} tbeta_chart_config;

TBETA_API void tbeta_chart_config_default(tbeta_chart_config* config);

typedef struct tbeta_limits {
    double lcl;
    double cl;
    double ucl;
    double boot_mean;
    double boot_se;
    double t_lower;
    double t_upper;
    double phase1_estimate;
    tbeta_params phase1_params;
    double p;
    double far;
    size_t boot_reps;
    size_t failed_attempts;
    int lcl_outside_support;
    int ucl_outside_support;
} tbeta_limits;

/* Phase-I values in order, split into subgroups of size n. */
TBETA_API tbeta_status tbeta_build_limits(const double* values, size_t count, size_t n, double a, double b,
                                          const tbeta_chart_config* config, tbeta_limits* out);

typedef enum tbeta_breach {
    TBETA_BREACH_NONE = 0,
    TBETA_BREACH_BELOW_LCL = 1,
    TBETA_BREACH_ABOVE_UCL = 2,
    TBETA_BREACH_INDETERMINATE = 3
} tbeta_breach;

typedef struct tbeta_verdict {
    double statistic; /* NaN when indeterminate */
    int in_control;
    int breach; /* tbeta_breach */
    size_t subgroup_index;
} tbeta_verdict;

TBETA_API tbeta_status tbeta_evaluate_subgroup(const double* values, size_t n, const tbeta_limits* limits, double a,
                                               double b, double p, size_t index, tbeta_verdict* out);
/* One verdict per size-n block, indices from 1. *out_count receives the
 * number of subgroups; TBETA_ERR_ARGUMENT if capacity is too small. */
TBETA_API tbeta_status tbeta_monitor(const double* values, size_t count, size_t n, const tbeta_limits* limits,
                                     double a, double b, double p, tbeta_verdict* out, size_t capacity,
                                     size_t* out_count);

/* ---- run length ------------------------------------------------------ */

typedef struct tbeta_shift {
    double d_theta1;
    double d_theta2;
} tbeta_shift;

typedef enum tbeta_limits_protocol {
    TBETA_LIMITS_PER_REPLICATION = 0,
    TBETA_LIMITS_FIXED = 1
} tbeta_limits_protocol;

typedef enum tbeta_phase2_source {
    TBETA_PHASE2_TRUE_PARAMETERS = 0,
    TBETA_PHASE2_PHASE1_ESTIMATE = 1
} tbeta_phase2_source;

typedef struct tbeta_sim_options {
    size_t n;
    size_t k;
    size_t replications;
    size_t run_cap;
    uint64_t seed;
    int protocol;      /* tbeta_limits_protocol */
    int phase2_source; /* tbeta_phase2_source */
    unsigned threads;
} tbeta_sim_options;

TBETA_API void tbeta_sim_options_default(tbeta_sim_options* options);

typedef struct tbeta_run_length_summary {
    double arl;
    double sdrl;
    size_t replications;
    size_t truncated_runs;
    size_t failed_replications;
} tbeta_run_length_summary;

/* config->seed is ignored; all randomness derives from options->seed. */
TBETA_API tbeta_status tbeta_simulate_run_length(const tbeta_params* ic, const tbeta_shift* shift,
                                                 const tbeta_chart_config* config, const tbeta_sim_options* options,
                                                 tbeta_run_length_summary* out);
TBETA_API tbeta_status tbeta_simulate_run_length_fixed(const tbeta_params* process, const tbeta_limits* limits,
                                                       double p, const tbeta_sim_options* options,
                                                       tbeta_run_length_summary* out);

typedef struct tbeta_grid tbeta_grid;

typedef struct tbeta_grid_cell {
    tbeta_shift shift;
    double p;
    double far;
    uint64_t seed;
    tbeta_run_length_summary summary;
    int ok;
    const char* error; /* empty when ok; owned by the grid */
} tbeta_grid_cell;

/* Empty percentile or FAR lists fall back to config->p / config->far. */
TBETA_API tbeta_status tbeta_shift_grid(const tbeta_params* ic, const tbeta_shift* shifts, size_t shift_count,
                                        const double* percentiles, size_t percentile_count, const double* fars,
                                        size_t far_count, const tbeta_chart_config* config,
                                        const tbeta_sim_options* options, tbeta_grid** out);
TBETA_API size_t tbeta_grid_size(const tbeta_grid* grid);
TBETA_API tbeta_status tbeta_grid_cell_at(const tbeta_grid* grid, size_t index, tbeta_grid_cell* out);
/* Run-length CSV; a null path writes to standard output. */
TBETA_API tbeta_status tbeta_grid_write_csv(const tbeta_grid* grid, const char* path);
TBETA_API void tbeta_grid_free(tbeta_grid* grid);
TBETA_API uint64_t tbeta_cell_seed(uint64_t seed, const tbeta_shift* shift, double p, double far);

typedef struct tbeta_geometric_check {
    double arl_target;
    double sdrl_target;
    double arl_z;
    double sdrl_z;
    double sdrl_ratio;
} tbeta_geometric_check;

TBETA_API tbeta_status tbeta_sdrl_check(const tbeta_run_length_summary* summary, double far,
                                        tbeta_geometric_check* out);

#ifdef __cplusplus
}
#endif

#endif /* TBETA_TBETA_H */
