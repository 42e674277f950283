/* C interface to the split two-mode-squeezed Bell-test simulator. */
#ifndef SPLITBELL_H
#define SPLITBELL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SB_API __declspec(dllexport)
#elif defined(__GNUC__)
#define SB_API __attribute__((visibility("default")))
#else
#define SB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sb_status {
  SB_OK = 0,
  SB_ERR_INVALID_ARGUMENT = 1,
  SB_ERR_RANGE = 2,
  SB_ERR_INTEGRATION = 3,
  SB_ERR_UNDEFINED_CORRELATOR = 4,
  SB_ERR_INTERNAL = 5
} sb_status;

typedef enum sb_approach { SB_APPROACH_I = 1, SB_APPROACH_II = 2, SB_APPROACH_III = 3 } sb_approach;

typedef enum sb_loss_kind { SB_LOSS = 0, SB_DETECTOR = 1 } sb_loss_kind;

/* Message of the last failed call on this thread ("" if none). */
SB_API const char* sb_last_error(void);
SB_API const char* sb_version(void);

SB_API sb_status sb_exact_chsh(double r, double* out);
SB_API sb_status sb_violation_threshold(double* out);

/* r_min, r_min + step, ... up to r_max. Writes at most `capacity` values and
   always stores the full count. */
SB_API sb_status sb_make_grid(double r_min, double r_max, double r_step, double* out,
                              size_t capacity, size_t* count);

typedef struct sb_integrator {
  double rtol;
  double atol;
  uint64_t max_steps;
} sb_integrator;

SB_API void sb_integrator_init(sb_integrator* cfg);

/* ---- prepared states ---------------------------------------------------- */

typedef struct sb_state sb_state;

typedef struct sb_state_info {
  int k_cut;
  uint64_t dimension;
  double r;
  double desqueeze_scale;
  double norm_drift;
  double boundary_mass;
  double max_stage_boundary_mass;
} sb_state_info;

/* integrator may be NULL for defaults. */
SB_API sb_status sb_prepare(double r, double desqueeze_scale, int k_cut,
                            const sb_integrator* integrator, sb_state** out);
SB_API void sb_state_free(sb_state* state);
SB_API sb_status sb_state_get_info(const sb_state* state, sb_state_info* out);
SB_API sb_status sb_state_amplitude(const sb_state* state, int k_a, int l_a, int k_b, int l_b,
                                    double* re, double* im);
SB_API sb_status sb_state_sector_probability(const sb_state* state, int n_a, int n_b, double* out);

/* Row-major (n_a + 1) x (n_b + 1) matrix p(k_A, k_B) of the sector
   (N_A, N_B) = (n_a, n_b) after rotating by (theta_a, theta_b). */
SB_API sb_status sb_state_sector_matrix(const sb_state* state, int n_a, int n_b, double theta_a,
                                        double theta_b, double* out, size_t len);

/* ---- probability tables ------------------------------------------------- */

typedef struct sb_table sb_table;

SB_API sb_status sb_table_create(const sb_state* state, double theta_a, double theta_b,
                                 sb_table** out);
/* probs has (k_cut + 1)^4 entries in label order. */
SB_API sb_status sb_table_from_probs(int k_cut, const double* probs, size_t len, sb_table** out);
SB_API void sb_table_free(sb_table* table);
SB_API sb_status sb_table_probability(const sb_table* table, int k_a, int l_a, int k_b, int l_b,
                                      double* out);
SB_API sb_status sb_correlator(const sb_table* table, sb_approach approach, double gamma,
                               sb_loss_kind kind, double* out);

/* ---- sweeps ------------------------------------------------------------- */

typedef struct sb_sweep_config {
  const double* r_values;
  size_t r_count;
  const double* gammas; /* NULL -> {1.0} */
  size_t gamma_count;
  const int* approaches; /* sb_approach values; NULL -> I, II, III */
  size_t approach_count;
  int k_cut;
  double angles[4]; /* theta_A, theta_A', theta_B, theta_B' */
  double desqueeze_scale;
  int loss_kind;
  sb_integrator integrator;
  int jobs;
} sb_sweep_config;

/* Defaults: optimal angles, k_cut 12, desqueeze_scale 1, loss, one job. */
SB_API void sb_sweep_config_init(sb_sweep_config* cfg);

typedef struct sb_record {
  int approach;
  double r;
  double gamma;
  int k_cut;
  int atoms; /* 0 for the four-mode model */
  double E[4];
  double B;
  double boundary_mass;
  double norm_drift;
  int error_flag; /* 0 ok, 1 undefined correlator, 2 integration failure */
} sb_record;

typedef struct sb_sweep sb_sweep;

SB_API sb_status sb_sweep_run(const sb_sweep_config* cfg, sb_sweep** out);
/* Exact six-mode model with `atoms` atoms; cfg->k_cut is ignored. */
SB_API sb_status sb_fullham_run(const sb_sweep_config* cfg, int atoms, sb_sweep** out);
SB_API size_t sb_sweep_size(const sb_sweep* sweep);
SB_API sb_status sb_sweep_record(const sb_sweep* sweep, size_t index, sb_record* out);
SB_API const char* sb_sweep_record_message(const sb_sweep* sweep, size_t index);
SB_API void sb_sweep_free(sb_sweep* sweep);

/* ---- acceptance suite --------------------------------------------------- */

typedef struct sb_report sb_report;

/* only may be NULL to run every criterion. */
SB_API sb_status sb_validate(int jobs, int k_cut, const int* only, size_t only_count,
                             sb_report** out);
SB_API int sb_report_passed(const sb_report* report);
SB_API size_t sb_report_size(const sb_report* report);
SB_API sb_status sb_report_check(const sb_report* report, size_t index, int* id, int* passed,
                                 double* seconds, const char** name);
SB_API const char* sb_report_json(const sb_report* report);
SB_API void sb_report_free(sb_report* report);

#ifdef __cplusplus
}
#endif

#endif
