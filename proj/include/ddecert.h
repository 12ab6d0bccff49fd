/* C interface to the delay-equation contraction toolkit. All entry points
 * return DDEC_OK or an error code; ddec_last_error() describes the most
 * recent failure on the calling thread. Strings returned through char**
 * are heap-allocated and must be released with ddec_string_free(). */
#ifndef DDECERT_H
#define DDECERT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define DDEC_OK 0
#define DDEC_ERR_INVALID 1
#define DDEC_ERR_PARSE 2
#define DDEC_ERR_NO_CERTIFICATE 3
#define DDEC_ERR_UNSTABLE 4
#define DDEC_ERR_UNOBSERVABLE 5
#define DDEC_ERR_INTERNAL 6

typedef struct ddec_system ddec_system;
typedef struct ddec_certificate ddec_certificate;

const char* ddec_version(void);
const char* ddec_last_error(void);
void ddec_string_free(char* s);
/* Caps worker threads for ensemble runs; 0 restores the DDECERT_THREADS /
 * hardware default. Results never depend on the cap. */
void ddec_set_thread_cap(int threads);

/* ---- systems ---------------------------------------------------------- */

int ddec_system_parse(const char* json_text, ddec_system** out);
int ddec_system_load(const char* path, ddec_system** out);
void ddec_system_free(ddec_system* sys);
int ddec_system_dim(const ddec_system* sys);

int ddec_dissipativity_lambda(const ddec_system* sys, double* out);
int ddec_total_variation(const ddec_system* sys, double* out);
int ddec_exp_moment(const ddec_system* sys, double mu, double* out);
int ddec_dissipativity_gap(const ddec_system* sys, double mu, double* out);
int ddec_min_mu(const ddec_system* sys, double tol, double* out);
int ddec_min_mu_report(const ddec_system* sys, double tol, char** json_out);
int ddec_bounds_report(const ddec_system* sys, char** json_out);

/* ---- certificates ------------------------------------------------------ */

/* grid_points <= 0 selects the default sampling resolution. */
int ddec_certify(const ddec_system* sys, double mu, int grid_points,
                 ddec_certificate** out);
void ddec_certificate_free(ddec_certificate* cert);
/* Any output pointer may be NULL. */
int ddec_certificate_info(const ddec_certificate* cert, double* lambda,
                          double* mu, double* gamma, double* gap, double* c1,
                          double* c2);
int ddec_certificate_report(const ddec_certificate* cert, char** json_out);
int ddec_contraction_shift_report(const ddec_system* sys, char** json_out);

/* Row-major n*n inputs; q_out receives n*n entries, may be NULL. */
int ddec_lyapunov_renorm(const double* a, const double* c, int n,
                         double* q_out, double* gamma_lower);
int ddec_lyapunov_renorm_report(const char* pair_json, char** json_out);

/* ---- spectrum ---------------------------------------------------------- */

int ddec_dominant_real_root(double b, double c, double tol, double* out);
/* Either output may be NULL; nodes_per_panel <= 0 selects the default. */
int ddec_spectrum_report(const ddec_system* sys, int nodes_per_panel,
                         char** json_out, char** csv_out);
int ddec_verify_characteristic(const ddec_system* sys, double re, double im,
                               double* smallest_sv);

/* ---- operator check ---------------------------------------------------- */

int ddec_check_margin(const ddec_system* sys, double mu, int nodes_per_panel,
                      double* theta_max, double* margin);
int ddec_check_report(const ddec_system* sys, double mu, int nodes_per_panel,
                      char** json_out);
int ddec_refinement_report(const ddec_system* sys, double mu,
                           const int* node_counts, int count, char** json_out);

/* ---- simulation -------------------------------------------------------- */

/* Integrates the system from a constant history (history_seed == 0) or a
 * random smooth history, and checks the trajectory against the rate-mu
 * certificate. x0 may be NULL (defaults to all ones, or to the history
 * value at 0 for random histories). Outputs may be NULL. */
int ddec_simulate(const ddec_system* sys, double mu, const double* x0,
                  double t_final, double step, uint64_t history_seed,
                  double checkpoint_every, char** csv_out, char** json_out);

/* drift_kind: "zero" | "tanh"; noise_kind: "zero" | "additive" | "linear". */
int ddec_sdde_pair_report(const ddec_system* sys, const char* drift_kind,
                          double drift_amplitude, const char* noise_kind,
                          double noise_amplitude, const double* x0_a,
                          const double* x0_b, double dt, double t_final,
                          int paths, uint64_t seed, double omega,
                          char** json_out);

int ddec_sdde_lyapunov_report(double b, double c, double sigma, double dt,
                              double t_final, int paths, uint64_t seed,
                              char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* DDECERT_H */
