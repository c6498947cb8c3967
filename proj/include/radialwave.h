/* radialwave.h - C API of the radialwave shared library.
 *
 * A numerical laboratory for the radial defocusing semilinear wave equation
 * in 3D, solved through its exact 1D reduction w = r*u at unit Courant
 * number, with hyperboloidal-transform diagnostics.
 *
 * Conventions:
 *   - Every function returns rw_status; outputs go through pointers.
 *   - Objects are opaque handles freed with their rw_*_free function.
 *   - On error, rw_last_error() returns a thread-local message valid until
 *     the next failing call on the same thread.
 */
#ifndef RADIALWAVE_H
#define RADIALWAVE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rw_status {
    RW_OK = 0,
    RW_ERR_INVALID_ARGUMENT = 1,
    RW_ERR_CONFIG = 2,
    RW_ERR_NUMERICAL = 3,
    RW_ERR_NO_CONTRACTION = 4,
    RW_ERR_COVERAGE = 5,
    RW_ERR_IO = 6,
    RW_ERR_UNKNOWN = 7
} rw_status;

const char* rw_version(void);
const char* rw_last_error(void);
void rw_string_free(char* s);

/* ---- opaque handles --------------------------------------------------- */

typedef struct rw_grid rw_grid;
typedef struct rw_state rw_state;       /* one reduced time slice (w, wdot) */
typedef struct rw_profile rw_profile;   /* coefficient profile phi, kappa, p */
typedef struct rw_traj rw_traj;         /* strided evolution record */
typedef struct rw_chart rw_chart;       /* hyperboloidal chart */
typedef struct rw_vtraj rw_vtraj;       /* transformed trajectory */

/* ---- grids and states -------------------------------------------------- */

rw_status rw_grid_create(double r_max, size_t J, rw_grid** out);
void rw_grid_free(rw_grid* g);
double rw_grid_dr(const rw_grid* g);
size_t rw_grid_points(const rw_grid* g);

/* data_json: {"u0": {"family": "gaussian"|"tail"|"zero", ...}, "u1": {...}}
 * with the same fields as the run-config data section. */
rw_status rw_state_synthesize(const rw_grid* g, const char* data_json, double epsilon,
                              rw_state** out);
rw_status rw_state_create(const rw_grid* g, double t, const double* w, const double* wdot,
                          rw_state** out);
void rw_state_free(rw_state* s);
size_t rw_state_size(const rw_state* s);
double rw_state_time(const rw_state* s);
rw_status rw_state_fields(const rw_state* s, double* w_out, double* wdot_out);

rw_status rw_weighted_data_norm(const rw_state* s, const rw_grid* g, double epsilon,
                                double* norm_mu, double* norm_r);
rw_status rw_pointwise_tail_check(const rw_state* s, const rw_grid* g, double A, double epsilon,
                                  double* max_ratio, int* pass);

/* ---- profiles and evolution -------------------------------------------- */

typedef enum rw_profile_kind {
    RW_PROFILE_FREE = 0,
    RW_PROFILE_UNIT = 1,
    RW_PROFILE_HYPERBOLIC = 2
} rw_profile_kind;

rw_status rw_profile_create(rw_profile_kind kind, double kappa, double p, rw_profile** out);
void rw_profile_free(rw_profile* p);
double rw_profile_phi(const rw_profile* p, double r);
double rw_profile_morawetz_weight(const rw_profile* p, double r);

rw_status rw_dalembert_free(const rw_state* s, const rw_grid* g, double t, rw_state** out);
rw_status rw_evolve_leapfrog(const rw_state* s, const rw_grid* g, const rw_profile* prof,
                             double T, long stride, double t_begin, rw_traj** out);
rw_status rw_picard_solve(const rw_state* s, const rw_grid* g, const rw_profile* prof, double T,
                          int iters, double* final_gap, rw_traj** out);
void rw_traj_free(rw_traj* t);

size_t rw_traj_snapshot_count(const rw_traj* t);
rw_status rw_traj_snapshot(const rw_traj* t, size_t index, rw_state** out);
rw_status rw_traj_time(const rw_traj* t, size_t index, double* out);
/* name: "dissipation" | "morawetz" | "lp2p2" | "source_l1l2" */
rw_status rw_traj_accumulator(const rw_traj* t, size_t index, const char* name, double* out);

/* Max-norm residual of the discrete equation over the stored snapshots;
 * order is 2 or 4. */
rw_status rw_pde_residual_max(const rw_traj* t, const rw_profile* prof, int order, double* out);

/* ---- functionals -------------------------------------------------------- */

rw_status rw_energy(const rw_state* s, const rw_grid* g, const rw_profile* prof, double* out);
rw_status rw_morawetz_functional(const rw_state* s, const rw_grid* g, double* out);
rw_status rw_dissipation_check(const rw_traj* t, double* accumulated, double* identity_defect,
                               double* bound, int* pass);
rw_status rw_morawetz_budget(const rw_traj* t, double* value, double* bound, int* pass);

typedef enum rw_region {
    RW_REGION_ALL = 0,
    RW_REGION_EXTERIOR = 1,  /* r > t + R */
    RW_REGION_OMEGA = 2,     /* r^2 < (t-t0)^2 - 1, t > t0 */
    RW_REGION_K = 3          /* e^{-2} <= (t-t0)^2 - r^2 <= 1, t0 < t <= 0 */
} rw_region;

rw_status rw_mixed_norm(const rw_traj* t, double q_t, double q_x, rw_region region,
                        double region_param, double* out);
rw_status rw_scattering_defect(const rw_traj* t, double t1, double t2, double* out);
rw_status rw_scattering_profile(const rw_traj* t, rw_state** out);

rw_status rw_calibrate_decay(const rw_traj* t, double R, double delta, double slab_end,
                             double* B1, double* C);
rw_status rw_exterior_decay_report(const rw_traj* t, double R, double delta, double B1, double C,
                                   double tol, double* max_es1, double* max_char, int* pass);

/* ---- hyperboloidal transform -------------------------------------------- */

rw_status rw_chart_create(double t0, double s_max, size_t s_J, double tau_min, double tau_max,
                          size_t tau_J, rw_chart** out);
void rw_chart_free(rw_chart* c);
rw_status rw_chart_forward(double s, double tau, double t0, double* r, double* t);
rw_status rw_chart_inverse(double r, double t, double t0, double* s, double* tau);
double rw_phi_weight(double s, double p);

rw_status rw_push_forward(const rw_traj* t, const rw_chart* c, rw_vtraj** out);
void rw_vtraj_free(rw_vtraj* v);
size_t rw_vtraj_slice_count(const rw_vtraj* v);
rw_status rw_transformed_energy(const rw_vtraj* v, size_t slice, double p, double* total,
                                double* interior, double* exterior);
rw_status rw_transformed_budgets(const rw_vtraj* v, double p, double* i_prime, double* morawetz,
                                 double* dissipation, double* i2, int* i2_le_iprime);
rw_status rw_cp2_residual_max(const rw_vtraj* v, double p, double* out);

/* Closed-form test fields passed as callbacks. */
typedef double (*rw_field_fn)(double a, double b, void* user);

rw_status rw_commutator_residual_t3(rw_field_fn u_field, void* user, double r0, double r1,
                                    double t0, double t1, double h, double* out);
rw_status rw_commutator_residual_t4(rw_field_fn w_field, void* user, double anchor_t0, double s0,
                                    double s1, double tau0, double tau1, double h, double* out);
rw_status rw_change_of_variables_check(rw_field_fn g_density, void* user, double t0, double r0,
                                       double r1, double ta, double tb, double s0, double s1,
                                       double tau0, double tau1, size_t n, double* direct,
                                       double* transformed, double* rel_diff);

/* ---- orchestration ------------------------------------------------------ */

/* Runs a config (JSON text or file) writing deterministic artifacts into
 * out_dir; summary_json receives the summary document (rw_string_free) and
 * *pass reports whether every recorded budget held. */
rw_status rw_run_simulate_json(const char* config_json, const char* out_dir, int* pass,
                               char** summary_json);
rw_status rw_run_simulate_file(const char* config_path, const char* out_dir, int* pass,
                               char** summary_json);

/* Runs a named verification suite; *pass is 1 when all checks hold. */
rw_status rw_run_verify(const char* suite, const char* out_dir, int* pass, char** verdict_json);

/* Sweep: axes_spec entries like "p=3,3.5,4" separated by ';'. */
rw_status rw_run_sweep_file(const char* config_path, const char* axes_spec, const char* out_dir,
                            int* pass, char** table_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RADIALWAVE_H */
