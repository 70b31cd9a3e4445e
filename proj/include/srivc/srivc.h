/* C interface to the SRIVC estimation library.
 *
 * All functions return srivc_status; SRIVC_OK means success. On failure a
 * thread-local message is available through srivc_last_error(). Objects are
 * created through *_new/*_load functions and released with the matching
 * *_free; handles are opaque.
 */
#ifndef SRIVC_SRIVC_H
#define SRIVC_SRIVC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srivc_status {
    SRIVC_OK = 0,
    SRIVC_ERR_INVALID_ARGUMENT = 1,
    SRIVC_ERR_PARSE = 2,
    SRIVC_ERR_SINGULAR = 3,
    SRIVC_ERR_NOT_HURWITZ = 4,
    SRIVC_ERR_IO = 5,
    SRIVC_ERR_INTERNAL = 6
} srivc_status;

typedef enum srivc_hold {
    SRIVC_HOLD_ZOH = 0,
    SRIVC_HOLD_FOH = 1
} srivc_hold;

typedef struct srivc_config srivc_config;
typedef struct srivc_estimate srivc_estimate;
typedef struct srivc_report srivc_report;
typedef struct srivc_mc_result srivc_mc_result;

/* Message describing the most recent failure on this thread. */
const char* srivc_last_error(void);

const char* srivc_version(void);

/* --- configuration ------------------------------------------------------ */

srivc_status srivc_config_load(const char* path, srivc_config** out);
srivc_status srivc_config_parse(const char* json_text, srivc_config** out);
void srivc_config_free(srivc_config* cfg);

srivc_status srivc_config_set_seed(srivc_config* cfg, uint64_t seed);
/* Number of model parameters n+m+1. */
int srivc_config_param_count(const srivc_config* cfg);

/* --- estimation --------------------------------------------------------- */

/* Runs the estimator on a t,u,y CSV file using the config's srivc section.
 * Non-convergence is not an error: inspect srivc_estimate_converged. */
srivc_status srivc_estimate_csv(const srivc_config* cfg, const char* data_csv_path,
                                srivc_estimate** out);
int srivc_estimate_converged(const srivc_estimate* est);
int srivc_estimate_iterations(const srivc_estimate* est);
int srivc_estimate_param_count(const srivc_estimate* est);
srivc_status srivc_estimate_theta(const srivc_estimate* est, double* buf, int len);
/* Norm of the converging-point residual, and the acceptance bound
 * 1e-8 * ||y|| / sqrt(N) it is compared against. */
double srivc_estimate_residual_norm(const srivc_estimate* est);
double srivc_estimate_residual_bound(const srivc_estimate* est);
/* Writes estimate.json into out_dir. */
srivc_status srivc_estimate_write_report(const srivc_estimate* est, const char* out_dir);
void srivc_estimate_free(srivc_estimate* est);

/* --- covariance bounds --------------------------------------------------- */

srivc_status srivc_crlb(const srivc_config* cfg, srivc_report** out);
srivc_status srivc_literature_crlb(const srivc_config* cfg, srivc_hold output_hold_assumption,
                                   srivc_report** out);
srivc_status srivc_cov(const srivc_config* cfg, srivc_hold instrument_hold,
                       srivc_report** out);
int srivc_report_dim(const srivc_report* report);
srivc_status srivc_report_entry(const srivc_report* report, int row, int col, double* out);
/* Matrix CSV plus a .meta.json sidecar. */
srivc_status srivc_report_write_csv(const srivc_report* report, const char* csv_path);
void srivc_report_free(srivc_report* report);

/* --- Monte Carlo --------------------------------------------------------- */

srivc_status srivc_mc_run(const srivc_config* cfg, srivc_mc_result** out);
double srivc_mc_convergence_rate(const srivc_mc_result* mc);
int srivc_mc_failed_runs(const srivc_mc_result* mc);
srivc_status srivc_mc_empirical_entry(const srivc_mc_result* mc, int row, int col,
                                      double* value, double* stderr_out);
/* Writes runs_vs_cov.csv and config.meta.json into out_dir. */
srivc_status srivc_mc_write(const srivc_mc_result* mc, const srivc_config* cfg,
                            const char* out_dir);
void srivc_mc_result_free(srivc_mc_result* mc);

/* Full sweep over the config's sample-size list; writes variance_vs_N.csv
 * and config.meta.json into out_dir. */
srivc_status srivc_sweep_run(const srivc_config* cfg, const char* out_dir);

/* One-command reproduction of the two simulation studies.
 * sim is 1 or 2, scale "full" or "desk"; pass NULL to keep the canned seed. */
srivc_status srivc_repro(int sim, const char* scale, const uint64_t* seed_override,
                         const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SRIVC_SRIVC_H */
