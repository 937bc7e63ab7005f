/*
 * vibrokit - input-shaping vibration control toolkit.
 *
 * C interface to the shared library: ZVD shaper design, second-order plant
 * simulation, Kalman-filter parameter identification, residual-network
 * error compensation, and the combined identification pipeline.
 *
 * Conventions:
 *   - every fallible call returns vbk_status; on failure the thread-local
 *     message from vbk_last_error() describes the cause;
 *   - angular frequencies in the API are rad/s; file formats carry Hz;
 *   - objects returned through vbk_*_create/load/generate calls are owned
 *     by the caller and released with the matching vbk_*_free.
 */
#ifndef VIBROKIT_VIBROKIT_H
#define VIBROKIT_VIBROKIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vbk_status {
    VBK_OK = 0,
    VBK_ERR_INVALID_ARGUMENT = 1, /* bad inputs or domain violations */
    VBK_ERR_IO = 2,               /* file open / parse failures */
    VBK_ERR_NUMERICAL = 3,        /* numerically impossible state reached */
    VBK_ERR_INTERNAL = 4
} vbk_status;

const char* vbk_version(void);
const char* vbk_last_error(void);

/* ------------------------------------------------------------------ */
/* System parameters                                                    */

typedef struct vbk_params {
    double omega_rad_s; /* natural frequency, rad/s; > 0 */
    double zeta;        /* damping ratio; in [0, 1) */
} vbk_params;

vbk_params vbk_params_from_hz(double omega_hz, double zeta);
double vbk_params_omega_hz(vbk_params p);

/* ------------------------------------------------------------------ */
/* ZVD shaper design                                                    */

typedef struct vbk_zvd {
    double amplitude[3];
    double time_s[3];
} vbk_zvd;

vbk_status vbk_zvd_design(vbk_params p, vbk_zvd* out);
/* CSV schema: header `A,t_s`, one row per impulse. */
vbk_status vbk_zvd_save_csv(vbk_params p, const char* path);
/* Residual vibration ratio of the ZVD designed at `design` acting on
 * `plant`; zero when the two coincide. */
vbk_status vbk_residual_ratio(vbk_params plant, vbk_params design, double* out);

/* ------------------------------------------------------------------ */
/* Shaped-move simulation                                               */

typedef struct vbk_shaper_eval {
    double mts_mm;           /* peak |displacement| over the move */
    double residual_peak_mm; /* peak |displacement - target| after settling */
} vbk_shaper_eval;

/* Simulates a step move of move_mm through the ZVD designed at `design`
 * on `plant`. dt_s <= 0 selects damped period / 200. horizon_s <= 0
 * selects shaper duration + 8 damped periods. When trace_csv is non-NULL
 * the trace is written there (`t_s,displacement_mm`). */
vbk_status vbk_eval_shaper(vbk_params design, vbk_params plant, double move_mm, double dt_s,
                           double horizon_s, const char* trace_csv, vbk_shaper_eval* out);
/* Same move without shaping. */
vbk_status vbk_eval_unshaped(vbk_params plant, double move_mm, double dt_s, double horizon_s,
                             const char* trace_csv, vbk_shaper_eval* out);

/* ------------------------------------------------------------------ */
/* Datasets                                                             */

typedef struct vbk_dataset vbk_dataset;

typedef struct vbk_gen_options {
    int n;
    vbk_params truth;   /* actual plant mode */
    vbk_params nominal; /* believed mode; trials scatter around it */
    double obs_bias_omega_rad_s; /* systematic observation error, added to truth */
    double obs_bias_zeta;
    double noise_sigma_mm;
    double scatter_omega_rel;
    double scatter_zeta;
    double move_mm;
    uint64_t seed;
} vbk_gen_options;

void vbk_gen_options_init(vbk_gen_options* opt);

vbk_status vbk_dataset_generate(const vbk_gen_options* opt, const char* name, vbk_dataset** out);
/* CSV schema: header `id,omega_hz,zeta,theta_mm`, LF endings. */
vbk_status vbk_dataset_load_csv(const char* path, vbk_dataset** out);
vbk_status vbk_dataset_save_csv(const vbk_dataset* data, const char* path);
size_t vbk_dataset_size(const vbk_dataset* data);
vbk_status vbk_dataset_sample(const vbk_dataset* data, size_t index, double* omega_hz,
                              double* zeta, double* theta_mm);
void vbk_dataset_free(vbk_dataset* data);

/* ------------------------------------------------------------------ */
/* Pipeline configuration (flat `key = value` files)                    */

typedef struct vbk_config vbk_config;

vbk_status vbk_config_create(vbk_config** out);
vbk_status vbk_config_load(const char* path, vbk_config** out);
vbk_status vbk_config_set(vbk_config* cfg, const char* key, const char* value);
void vbk_config_free(vbk_config* cfg);

typedef struct vbk_noise {
    double q_omega; /* per-step process noise on omega_n, (rad/s)^2 */
    double q_zeta;  /* per-step process noise on zeta */
    double r_mm2;   /* measurement noise variance */
} vbk_noise;

vbk_status vbk_config_nominal(const vbk_config* cfg, vbk_params* out);
vbk_status vbk_config_noise(const vbk_config* cfg, vbk_noise* out);
vbk_status vbk_config_seed(const vbk_config* cfg, uint64_t* out);
vbk_status vbk_config_move_mm(const vbk_config* cfg, double* out);

/* ------------------------------------------------------------------ */
/* Parameter identification (filter stage)                              */

/* Runs the extended Kalman filter once over the samples in order,
 * starting from `initial`, with the given noise model and measurement
 * gain. */
vbk_status vbk_identify(vbk_params initial, const vbk_dataset* data, vbk_noise noise,
                        double kappa_mm, vbk_params* out);

/* Same, but nominal parameters, noise, and gain policy come from the
 * config; kappa_used receives the calibrated gain. */
vbk_status vbk_identify_with_config(const vbk_config* cfg, const vbk_dataset* data,
                                    vbk_params* out, double* kappa_used);

/* ------------------------------------------------------------------ */
/* Error compensator (network stage)                                    */

typedef struct vbk_model vbk_model;

typedef struct vbk_train_options {
    double rho;
    int max_rounds;
    double tol;
    uint64_t seed;
    int penult_width;
    double alpha;
    double delta_scale_omega_rel;
    double delta_scale_zeta;
    int normalize_targets; /* nonzero: map targets to [0, 1] while training */
} vbk_train_options;

void vbk_train_options_init(vbk_train_options* opt);
vbk_status vbk_config_train_options(const vbk_config* cfg, vbk_train_options* out);

/* Trains the compensator on `data` around the parameter estimate.
 * delta_out (when non-NULL) receives the correction (rad/s, zeta units);
 * log_csv (when non-NULL) receives the per-round objective log. */
vbk_status vbk_train(const vbk_dataset* data, vbk_params estimate,
                     const vbk_train_options* opt, const char* log_csv, vbk_model** out_model,
                     double delta_out[2]);

vbk_status vbk_model_save(const vbk_model* model, const char* path);
vbk_status vbk_model_load(const char* path, vbk_model** out);
vbk_status vbk_model_predict(const vbk_model* model, double omega_hz, double zeta,
                             double* theta_mm);
void vbk_model_free(vbk_model* model);

/* ------------------------------------------------------------------ */
/* Full pipeline run                                                    */

#define VBK_RUN_MODELS 3
#define VBK_MODEL_NAME_MAX 16

typedef struct vbk_model_scores {
    char model[VBK_MODEL_NAME_MAX];
    double mts_mean, mts_std;
    double max_mean, max_std;
    double rmse_mean, rmse_std;
    double mean_mean, mean_std;
    double rmse_median;
} vbk_model_scores;

typedef struct vbk_run_summary {
    int repeats;
    vbk_model_scores models[VBK_RUN_MODELS]; /* cascade, ekf-only, nominal-zvd */
    double ekf_seconds;
    double train_seconds;
    double total_seconds; /* sum of the two stages */
    int train_rounds;
    double kappa_mm;
    vbk_params t_ekf;
    vbk_params t_r;
    double delta_omega_rad_s;
    double delta_zeta;
} vbk_run_summary;

/* Seeded split, identification stage, compensation stage, test-split
 * comparison against both baselines, repeated `repeats` times with
 * consecutive seeds. Writes tables, predictions, identified parameters,
 * shapers, the trained model, the training log, and traces under
 * out_dir (created if missing). Emitted bytes depend only on
 * (config, data, seed). */
vbk_status vbk_run(const vbk_config* cfg, const vbk_dataset* data, const char* out_dir,
                   int repeats, vbk_run_summary* out);

/* ------------------------------------------------------------------ */
/* Metrics                                                              */

typedef struct vbk_metrics {
    double mts_mm;
    double max_mm;
    double rmse_mm;
    double mean_mm;
    size_t n;
} vbk_metrics;

vbk_status vbk_metrics_compute(const double* measured, const double* predicted, size_t n,
                               vbk_metrics* out);
/* Predictions CSV schema: header `id,measured_mm,predicted_mm`. */
vbk_status vbk_metrics_from_csv(const char* predictions_csv, vbk_metrics* out);

#ifdef __cplusplus
}
#endif

#endif /* VIBROKIT_VIBROKIT_H */
