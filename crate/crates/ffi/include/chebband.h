#ifndef CHEBBAND_H
#define CHEBBAND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum ChebbandStatus {
  CHEBBAND_STATUS_OK = 0,
  CHEBBAND_STATUS_NULL_POINTER = 1,
  CHEBBAND_STATUS_INVALID_ARGUMENT = 2,
  CHEBBAND_STATUS_INVALID_SYSTEM = 3,
  CHEBBAND_STATUS_INVALID_WEIGHT = 4,
  CHEBBAND_STATUS_NUMERICAL = 5,
  CHEBBAND_STATUS_BUFFER_TOO_SMALL = 6,
  CHEBBAND_STATUS_PANIC = 7,
} ChebbandStatus;

/**
 * Result of a Remez run.
 */
typedef struct ChebbandRemez ChebbandRemez;

/**
 * Interval system with its potential table and weight.
 */
typedef struct ChebbandSystem ChebbandSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` with a
 * terminating NUL. Returns the message length without the NUL; when that
 * is at least `len` the message was truncated.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t chebband_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *chebband_version(void);

/**
 * Builds a system from `2l` increasing endpoints and an optional weight
 * in JSON (`NULL` for the unit weight).
 *
 * # Safety
 * `endpoints` must be valid for `len` reads, `weight_json` null or a
 * NUL-terminated string, `out` valid for one write.
 */
enum ChebbandStatus chebband_system_new(const double *endpoints,
                                        size_t len,
                                        const char *weight_json,
                                        struct ChebbandSystem **out);

/**
 * Releases a system; null is ignored.
 *
 * # Safety
 * `sys` must be null or a handle from [`chebband_system_new`] not yet freed.
 */
void chebband_system_free(struct ChebbandSystem *sys);

/**
 * Number of bands `l`, or 0 for a null handle.
 *
 * # Safety
 * `sys` must be null or a live handle.
 */
size_t chebband_system_bands(const struct ChebbandSystem *sys);

/**
 * # Safety
 * `sys` must be null or a live handle, `out` valid for one write.
 */
enum ChebbandStatus chebband_system_capacity(const struct ChebbandSystem *sys, double *out);

/**
 * Harmonic measures `ω_k(∞)` into `out[0..l]`.
 *
 * # Safety
 * `sys` must be null or a live handle, `out` valid for `len` writes.
 */
enum ChebbandStatus chebband_system_omega_inf(const struct ChebbandSystem *sys,
                                              double *out,
                                              size_t len);

/**
 * Predicted `‖M̂_n/W‖_E` and the gap points `c_j` (`l − 1` values; gap
 * ends are reported as the endpoint). `gap_points` may be null.
 *
 * # Safety
 * `sys` must be null or a live handle, `deviation` valid for one write,
 * `gap_points` null or valid for `len` writes.
 */
enum ChebbandStatus chebband_predict(const struct ChebbandSystem *sys,
                                     size_t n,
                                     double *deviation,
                                     double *gap_points,
                                     size_t len);

/**
 * Weighted monic minimax polynomial of degree `n`; `tol <= 0` selects the
 * default tolerance.
 *
 * # Safety
 * `sys` must be null or a live handle, `out` valid for one write.
 */
enum ChebbandStatus chebband_remez_new(const struct ChebbandSystem *sys,
                                       size_t n,
                                       double tol,
                                       struct ChebbandRemez **out);

/**
 * # Safety
 * `r` must be null or a handle from [`chebband_remez_new`] not yet freed.
 */
void chebband_remez_free(struct ChebbandRemez *r);

/**
 * Minimum deviation, lower bound and convergence flag.
 *
 * # Safety
 * `r` must be null or a live handle; out-pointers valid for one write or null.
 */
enum ChebbandStatus chebband_remez_deviation(const struct ChebbandRemez *r,
                                             double *deviation,
                                             double *lower_bound,
                                             bool *converged);

/**
 * `M̂_n(x)`.
 *
 * # Safety
 * `r` must be null or a live handle, `out` valid for one write.
 */
enum ChebbandStatus chebband_remez_eval(const struct ChebbandRemez *r, double x, double *out);

/**
 * Number of Remez zeros in band `k` into `out`.
 *
 * # Safety
 * `r` must be null or a live handle, `out` valid for `len` writes.
 */
enum ChebbandStatus chebband_remez_zeros_per_band(const struct ChebbandRemez *r,
                                                  size_t *out,
                                                  size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHEBBAND_H */
