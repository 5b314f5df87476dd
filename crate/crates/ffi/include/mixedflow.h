#ifndef MIXEDFLOW_H
#define MIXEDFLOW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every exported function.
typedef enum MfStatus {
  MF_STATUS_OK = 0,
  MF_STATUS_NULL_POINTER = 1,
  MF_STATUS_INVALID_ARGUMENT = 2,
  // Configuration or parse error.
  MF_STATUS_CONFIG = 3,
  // The surface left the admissible class or a step was rejected.
  MF_STATUS_INADMISSIBLE = 4,
  // An iterative fit did not converge.
  MF_STATUS_NOT_CONVERGED = 5,
  MF_STATUS_BUFFER_TOO_SMALL = 6,
  MF_STATUS_INTERNAL = 7,
} MfStatus;

// Opaque simulation handle.
typedef struct MfSimulation MfSimulation;

// Per-record diagnostics of a simulation.
typedef struct MfDiagnostics {
  double t;
  double h_k;
  double volume;
  double sup_g;
  double sup_rho;
  double sphere_residual_sup;
} MfDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty if none. The
// pointer stays valid until the next failing call on the same thread.
const char *mf_last_error(void);

// Library version as a static NUL-terminated string.
const char *mf_version(void);

// Create a simulation at `ρ = 0` with the imex integrator and default step.
// `speed` uses the config grammar, e.g. `"power_mean m=1 beta=2"`.
//
// # Safety
// `speed` must be a NUL-terminated string and `out` a valid pointer.
enum MfStatus mf_simulation_new(size_t n,
                                double radius,
                                int32_t k,
                                const char *speed,
                                size_t l_max,
                                struct MfSimulation **out);

// Create a simulation from the text of a `key = value` config file,
// including its initial data.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum MfStatus mf_simulation_from_config(const char *text, struct MfSimulation **out);

// # Safety
// `sim` must be null or a handle from `mf_simulation_new*` not yet freed.
void mf_simulation_free(struct MfSimulation *sim);

// Number of harmonic coefficients of the state.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum MfStatus mf_simulation_coeff_count(const struct MfSimulation *sim, size_t *out);

// Copy the coefficients (degree-major order) into `buf[0..len]`.
//
// # Safety
// `sim` must be a live handle and `buf` valid for `len` writes.
enum MfStatus mf_simulation_get_coeffs(const struct MfSimulation *sim, double *buf, size_t len);

// Replace the state by the given coefficients and reset time to 0.
//
// # Safety
// `sim` must be a live handle and `data` valid for `len` reads.
enum MfStatus mf_simulation_set_coeffs(struct MfSimulation *sim, const double *data, size_t len);

// Advance `steps` steps of size `dt` (`dt <= 0` selects the default step)
// with the configured integrator. On failure the state is left at the last
// accepted step.
//
// # Safety
// `sim` must be a live handle.
enum MfStatus mf_simulation_advance(struct MfSimulation *sim, size_t steps, double dt);

// Diagnostics of the current state.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum MfStatus mf_simulation_diagnostics(const struct MfSimulation *sim, struct MfDiagnostics *out);

// Fit a round sphere to the state: writes `(z₀, z₁, …, z_{n+1})` to
// `z[0..n+2]` and the sup-norm of the residual to `residual_sup`.
//
// # Safety
// `sim` must be a live handle, `z` valid for `len` writes and
// `residual_sup` null or valid.
enum MfStatus mf_simulation_fit_sphere(const struct MfSimulation *sim,
                                       double *z,
                                       size_t len,
                                       double *residual_sup);

// Current simulation time.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum MfStatus mf_simulation_time(const struct MfSimulation *sim, double *out);

// Linearized decay rate `-F' (l-1)(l+n)/R²` of degree-`l` perturbations.
double mf_linear_rate(size_t n, double radius, double fprime, size_t l);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIXEDFLOW_H */
