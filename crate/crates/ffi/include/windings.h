#ifndef WINDINGS_H
#define WINDINGS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WindingsStatus {
  WINDINGS_STATUS_OK = 0,
  WINDINGS_STATUS_NULL_POINTER = 1,
  WINDINGS_STATUS_DOMAIN = 2,
  WINDINGS_STATUS_RANGE = 3,
  WINDINGS_STATUS_SINGULARITY = 4,
  WINDINGS_STATUS_DEGENERATE_GEOMETRY = 5,
  WINDINGS_STATUS_PRECISION = 6,
  WINDINGS_STATUS_QUADRATURE = 7,
  WINDINGS_STATUS_PATH_BUDGET = 8,
  WINDINGS_STATUS_CONFIG = 9,
  WINDINGS_STATUS_IO = 10,
  WINDINGS_STATUS_BUFFER_TOO_SMALL = 11,
  WINDINGS_STATUS_PANIC = 12,
} WindingsStatus;

/**
 * Which per-node series [`windings_path_copy`] returns.
 */
typedef enum WindingsSeries {
  WINDINGS_SERIES_TIME = 0,
  WINDINGS_SERIES_RE = 1,
  WINDINGS_SERIES_IM = 2,
  /**
   * Winding around 0 since the start.
   */
  WINDINGS_SERIES_THETA = 3,
  /**
   * Clock `H` since the start.
   */
  WINDINGS_SERIES_CLOCK = 4,
} WindingsSeries;

/**
 * A sampled planar path.
 */
typedef struct WindingsPath WindingsPath;

/**
 * Direct simulator of the time-changed angle `ρ`.
 */
typedef struct WindingsRhoModel WindingsRhoModel;

/**
 * Per-index constants; field meanings as in the `constants` CSV.
 */
typedef struct WindingsConstants {
  double alpha;
  double c_nu;
  double clock_mean;
  double winding_integral;
  double rho_variance;
  double spitzer_variance;
  double small_angle;
} WindingsConstants;

/**
 * Path discretisation; zero fields take the library defaults (except
 * `horizon`).
 */
typedef struct WindingsPathConfig {
  double horizon;
  double base_step;
  double angle_cap;
  size_t max_points;
} WindingsPathConfig;

typedef struct WindingsExit {
  /**
   * Interpolated exit time; the last time when censored.
   */
  double time;
  /**
   * 1 when the winding never left the cone.
   */
  int32_t censored;
} WindingsExit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes). Returns the full message length in bytes,
 * excluding the terminator; 0 when there is no message.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t windings_last_error_message(char *buf, size_t len);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
enum WindingsStatus windings_constants(double alpha, struct WindingsConstants *out);

/**
 * Lévy density of the time-changed angle at `phi`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum WindingsStatus windings_angular_density(double alpha, double phi, double *out);

/**
 * Integral test for the boundary `t^(1/α) (log t)^(β/α)`: writes 1 when
 * `∫_1^∞ f^(-α)` converges, 0 when it diverges.
 *
 * # Safety
 * `converges` must be null or valid for writes.
 */
enum WindingsStatus windings_integral_test(double alpha, double beta, int32_t *converges);

/**
 * Sample a path of index `alpha` (2 for Brownian motion) started at 1.
 *
 * # Safety
 * `config` must be null or point to a valid config; `out` must be null or
 * valid for writes. The handle written to `out` must be released with
 * [`windings_path_free`].
 */
enum WindingsStatus windings_path_generate(double alpha,
                                           const struct WindingsPathConfig *config,
                                           uint64_t seed,
                                           struct WindingsPath **out);

/**
 * # Safety
 * `path` must be null or a handle from [`windings_path_generate`] that has
 * not been freed.
 */
void windings_path_free(struct WindingsPath *path);

/**
 * Number of nodes of the path.
 *
 * # Safety
 * `path` must be a live handle or null; `len` null or valid for writes.
 */
enum WindingsStatus windings_path_len(const struct WindingsPath *path, size_t *len);

/**
 * Copy one per-node series into `buf`, which must hold `windings_path_len`
 * values.
 *
 * # Safety
 * `path` must be a live handle or null; `buf` null or valid for `cap` writes.
 */
enum WindingsStatus windings_path_copy(const struct WindingsPath *path,
                                       enum WindingsSeries series,
                                       double *buf,
                                       size_t cap);

/**
 * First exit of the path's winding from `(-lower, upper)`.
 *
 * # Safety
 * `path` must be a live handle or null; `out` null or valid for writes.
 */
enum WindingsStatus windings_path_exit_time(const struct WindingsPath *path,
                                            double lower,
                                            double upper,
                                            struct WindingsExit *out);

/**
 * Build the simulator for index `alpha` with small-jump cutoff `epsilon`.
 *
 * # Safety
 * `out` must be null or valid for writes; release the handle with
 * [`windings_rho_model_free`].
 */
enum WindingsStatus windings_rho_model_new(double alpha,
                                           double epsilon,
                                           struct WindingsRhoModel **out);

/**
 * # Safety
 * `model` must be null or a live handle.
 */
void windings_rho_model_free(struct WindingsRhoModel *model);

/**
 * `ρ` at `0, horizon/steps, ..., horizon` into `buf` (`steps + 1` values).
 *
 * # Safety
 * `model` must be a live handle or null; `buf` null or valid for `cap` writes.
 */
enum WindingsStatus windings_rho_simulate(const struct WindingsRhoModel *model,
                                          double horizon,
                                          size_t steps,
                                          uint64_t seed,
                                          double *buf,
                                          size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WINDINGS_H */
