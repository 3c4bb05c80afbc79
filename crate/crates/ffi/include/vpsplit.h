#ifndef VPSPLIT_H
#define VPSPLIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VpStatus {
  VP_STATUS_OK = 0,
  VP_STATUS_NULL_POINTER = 1,
  VP_STATUS_INVALID_CONFIG = 2,
  VP_STATUS_NUMERICAL_BLOW_UP = 3,
  VP_STATUS_VERIFICATION_FAILED = 4,
  VP_STATUS_BUFFER_TOO_SMALL = 5,
  VP_STATUS_PANIC = 6,
} VpStatus;

/**
 * Opaque simulation handle.
 */
typedef struct VpSimulation VpSimulation;

/**
 * Grid, scheme and initial condition of a simulation.
 *
 * `scheme` is a NUL-terminated scheme name such as `"o6-13"`.
 */
typedef struct VpConfig {
  uint32_t dim;
  const char *scheme;
  uint32_t nx;
  uint32_t nv;
  double k;
  double v_max;
  double amplitude;
  uint32_t order;
} VpConfig;

typedef struct VpDiagnostics {
  double t;
  double energy;
  double kinetic;
  double potential;
  double mass;
  double l1;
  double l2;
  double f_min;
  double f_max;
} VpDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fills `out` with the one-dimensional Landau defaults (Strang, 256 x 256).
 *
 * # Safety
 * `out` must be null or point to writable memory for one `VpConfig`.
 */
enum VpStatus vp_config_default(struct VpConfig *out);

/**
 * Creates a simulation at `t = 0` and stores its handle in `out`.
 *
 * # Safety
 * `cfg` must be null or point to a valid `VpConfig` whose `scheme` is null
 * or NUL-terminated; `out` must be null or writable.
 */
enum VpStatus vp_simulation_new(const struct VpConfig *cfg, struct VpSimulation **out);

/**
 * Releases a handle from [`vp_simulation_new`]. Null is ignored.
 *
 * # Safety
 * `sim` must be null or a live handle that is not used afterwards.
 */
void vp_simulation_free(struct VpSimulation *sim);

/**
 * Advances the simulation by `steps` steps of size `tau`.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
enum VpStatus vp_simulation_step(struct VpSimulation *sim, double tau, uint64_t steps);

/**
 * Writes the current time to `out`.
 *
 * # Safety
 * `sim` must be null or a live handle; `out` must be null or writable.
 */
enum VpStatus vp_simulation_time(struct VpSimulation *sim, double *out);

/**
 * Measures energies, mass, norms and extrema of the current state.
 *
 * # Safety
 * `sim` must be null or a live handle; `out` must be null or writable.
 */
enum VpStatus vp_simulation_diagnostics(struct VpSimulation *sim, struct VpDiagnostics *out);

/**
 * Number of grid values held by the simulation.
 *
 * # Safety
 * `sim` must be null or a live handle; `out` must be null or writable.
 */
enum VpStatus vp_simulation_values_len(struct VpSimulation *sim, size_t *out);

/**
 * Copies the distribution values, x-major, into `buf` of length `len`.
 *
 * # Safety
 * `sim` must be null or a live handle; `buf` must be null or valid for
 * `len` writes.
 */
enum VpStatus vp_simulation_copy_values(struct VpSimulation *sim, double *buf, size_t len);

/**
 * Checks every registered coefficient set against its consistency and
 * order conditions.
 */
enum VpStatus vp_verify_schemes(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated and
 * always NUL-terminated when `len > 0`). Returns the length the full
 * message needs including the terminator.
 *
 * # Safety
 * `buf` must be null or valid for `len` writes.
 */
size_t vp_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VPSPLIT_H */
