/* greentherm — chip-level thermal simulation with variation-aware
 * Green's functions behind a plain C interface.
 *
 * All functions return gt_status; on failure gt_last_error() /
 * gt_last_error_stage() describe the fault (thread-local). Objects returned
 * through out-parameters are owned by the caller and released with the
 * matching *_free function.
 */
#ifndef GREENTHERM_H
#define GREENTHERM_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gt_status {
    GT_OK = 0,
    GT_ERR_CONFIG = 2,      /* bad files, unknown keys, shape mismatches */
    GT_ERR_SOLVER = 3,      /* non-convergence, thermal runaway, calibration */
    GT_ERR_VALIDATION = 4,  /* physical validity or acceptance failure */
    GT_ERR_INTERNAL = 5
} gt_status;

const char* gt_status_name(gt_status s);
const char* gt_last_error(void);
const char* gt_last_error_stage(void);

/* ---- scalar grids (FieldMap text format: "n pitch unit" + n rows) ---- */

typedef struct gt_field gt_field;

gt_status gt_field_create(int n, double pitch, const char* unit, gt_field** out);
gt_status gt_field_load(const char* path, gt_field** out);
gt_status gt_field_save(const gt_field* f, const char* path);
void gt_field_free(gt_field* f);

int gt_field_n(const gt_field* f);
double gt_field_pitch(const gt_field* f);
const char* gt_field_unit(const gt_field* f);
double gt_field_get(const gt_field* f, int i, int j);
void gt_field_set(gt_field* f, int i, int j, double value);
const double* gt_field_data(const gt_field* f); /* row-major n*n */
double gt_field_max(const gt_field* f);
double gt_field_sum(const gt_field* f);

/* PPM (P6) heatmap with a fixed cold-to-hot ramp; legend in header comments. */
gt_status gt_field_render(const gt_field* f, const char* path, int cell_px);

/* ---- default input files (Table-2-class chip) ---- */

gt_status gt_write_default_stack(const char* path);
gt_status gt_write_default_variation(const char* path);

/* ---- calibration: baseline response + modified Green's functions ---- */

typedef struct gt_greens gt_greens;

/* nominal_leak may be NULL: a uniform map of leak_total watts is used. */
gt_status gt_calibrate(const char* stack_path, const char* variation_path,
                       const gt_field* nominal_leak, double leak_total,
                       gt_greens** out, double* offline_ms);
gt_status gt_greens_save(const gt_greens* g, const char* dir);
gt_status gt_greens_load(const char* dir, gt_greens** out);
void gt_greens_free(gt_greens* g);

int gt_greens_n(const gt_greens* g);
double gt_greens_alpha(const gt_greens* g);
double gt_greens_beta(const gt_greens* g);
double gt_greens_mu(const gt_greens* g);
double gt_greens_capacitance(const gt_greens* g);
double gt_greens_kappa_inf(const gt_greens* g);
/* which: f_sp0 | g_sp0 | f_det | f_rand | p_var */
gt_status gt_greens_field(const gt_greens* g, const char* which, gt_field** out);

/* ---- solves on a calibrated set ---- */

typedef struct gt_result gt_result;

int gt_result_count(const gt_result* r);
double gt_result_time(const gt_result* r, int idx);
gt_status gt_result_map(const gt_result* r, int idx, gt_field** out);
void gt_result_free(gt_result* r);

/* Steady composition; with_rand = 0 reproduces the f_rand-omission ablation. */
gt_status gt_solve_steady(const gt_greens* g, const gt_field* p_dyn, int with_rand,
                          gt_field** out, double* online_ms);

gt_status gt_solve_step(const gt_greens* g, const gt_field* p_dyn, const double* times,
                        int n_times, int with_rand, gt_result** out, double* online_ms);

typedef struct gt_trace gt_trace;

gt_status gt_trace_load(const char* dir, gt_trace** out);
gt_status gt_trace_create(double dt, gt_trace** out);
gt_status gt_trace_push(gt_trace* t, const gt_field* frame);
gt_status gt_trace_save(const gt_trace* t, const char* dir);
int gt_trace_frames(const gt_trace* t);
double gt_trace_dt(const gt_trace* t);
void gt_trace_free(gt_trace* t);

/* window <= 0 selects ceil(5 ms / dt). */
gt_status gt_solve_trace(const gt_greens* g, const gt_trace* trace, int window,
                         int with_rand, gt_result** out, double* online_ms);

/* ---- finite-difference reference solver ---- */

/* variation_path may be NULL (no conductivity randomness). leak may be NULL.
 * Solves for the steady die temperature rise above ambient. */
gt_status gt_oracle_steady(const char* stack_path, const char* variation_path,
                           const gt_field* p_dyn, const gt_field* nominal_leak,
                           int temp_dep_leakage, int temp_dep_conductivity,
                           gt_field** out, int* outer_iterations);

/* Backward-Euler transient of a held power map, sampled at `times`. */
gt_status gt_oracle_transient(const char* stack_path, const char* variation_path,
                              const gt_field* p_dyn, const gt_field* nominal_leak,
                              int temp_dep_leakage, const double* times, int n_times,
                              double dt, gt_result** out);

/* ---- error metrics ---- */

typedef struct gt_error_report {
    double mae;
    double max_err;
    double pct_of_max_rise;
    double max_pct_of_max_rise;
    int hotspot_hit;
} gt_error_report;

gt_status gt_error_metrics(const gt_field* calc, const gt_field* ref,
                           gt_error_report* out);

/* ---- Monte Carlo sweep over variation seeds ---- */

gt_status gt_monte_carlo(const gt_greens* g, const char* variation_path,
                         const gt_field* nominal_leak, double leak_total,
                         const gt_field* p_dyn, const unsigned long long* seeds,
                         int n_seeds, int jobs, const char* csv_path,
                         double* mean_max, double* std_max);

/* ---- validation suite ---- */

/* Writes the five built-in steady scenarios under dir (stack may be NULL for
 * the default chip). */
gt_status gt_write_builtin_suite(const char* stack_path, const char* dir);

/* Runs every scenario.txt under suite_dir against the oracle; reports are
 * written to out_dir when non-NULL. Returns GT_ERR_VALIDATION when any
 * scenario exceeds the thresholds. */
gt_status gt_validate_suite(const char* suite_dir, const char* out_dir, int jobs,
                            int* n_scenarios, int* n_passed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GREENTHERM_H */
