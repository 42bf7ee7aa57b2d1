/* C ABI for the spinal BLER-bound toolkit. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum SpinalStatus {
  SPINAL_STATUS_OK = 0,
  SPINAL_STATUS_NULL_POINTER = 1,
  SPINAL_STATUS_INVALID_ARGUMENT = 2,
  SPINAL_STATUS_LENGTH_MISMATCH = 3,
} SpinalStatus;

/**
 * Constellation flavor.
 */
typedef enum SpinalFlavor {
  SPINAL_FLAVOR_REAL = 0,
  SPINAL_FLAVOR_COMPLEX = 1,
} SpinalFlavor;

/**
 * Fading family. Parameters not used by a family (m, kfactor) are ignored.
 */
typedef enum SpinalFamily {
  SPINAL_FAMILY_AWGN = 0,
  SPINAL_FAMILY_RAYLEIGH = 1,
  SPINAL_FAMILY_NAKAGAMI = 2,
  SPINAL_FAMILY_RICIAN = 3,
} SpinalFamily;

/**
 * Which BLER upper bound to evaluate.
 */
typedef enum SpinalBoundKind {
  SPINAL_BOUND_KIND_GALLAGER = 0,
  SPINAL_BOUND_KIND_REFINED = 1,
} SpinalBoundKind;

/**
 * Opaque evaluator: code parameters, fading model, transmission pattern,
 * and theta resolution. Create with `spinal_evaluator_new`, release with
 * `spinal_evaluator_free`.
 */
typedef struct SpinalEvaluator SpinalEvaluator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an evaluator for one code/channel/pattern configuration.
 *
 * `ells` points to `ells_len` per-spine symbol counts; `ells_len` must
 * equal n/k. `m` is read only for the Nakagami family, `kfactor` only for
 * Rician, `omega` for every fading family (ignored by AWGN).
 *
 * # Safety
 * `ells` must point to `ells_len` readable u32 values and `out` must be a
 * valid pointer; on `SPINAL_STATUS_OK` the caller owns the handle written
 * to `out` and must release it with `spinal_evaluator_free`.
 */
enum SpinalStatus spinal_evaluator_new(uint32_t n,
                                       uint32_t k,
                                       uint32_t c,
                                       uint32_t v,
                                       enum SpinalFlavor flavor,
                                       enum SpinalFamily family,
                                       double omega,
                                       double m,
                                       double kfactor,
                                       uint32_t theta_n,
                                       const uint32_t *ells,
                                       uintptr_t ells_len,
                                       struct SpinalEvaluator **out);

/**
 * Releases an evaluator created by `spinal_evaluator_new`. Null is a no-op.
 *
 * # Safety
 * `evaluator` must be a handle returned by `spinal_evaluator_new` that has
 * not been freed yet.
 */
void spinal_evaluator_free(struct SpinalEvaluator *evaluator);

/**
 * Number of segments n/k, the length required of epsilon output buffers.
 *
 * # Safety
 * `evaluator` must be a live handle and `out` a valid pointer.
 */
enum SpinalStatus spinal_evaluator_segments(const struct SpinalEvaluator *evaluator,
                                            uintptr_t *out);

/**
 * Evaluates the BLER upper bound P_e at one SNR point (dB, with
 * SNR = omega / sigma^2 under the unit-energy constellation).
 *
 * # Safety
 * `evaluator` must be a live handle and `out_pe` a valid pointer.
 */
enum SpinalStatus spinal_bler_bound(const struct SpinalEvaluator *evaluator,
                                    enum SpinalBoundKind kind,
                                    double snr_db,
                                    double *out_pe);

/**
 * Writes the per-segment error terms eps_1..eps_{n/k} into `out`.
 * `out_len` must equal the segment count.
 *
 * # Safety
 * `evaluator` must be a live handle and `out` must point to `out_len`
 * writable f64 values.
 */
enum SpinalStatus spinal_bler_epsilons(const struct SpinalEvaluator *evaluator,
                                       enum SpinalBoundKind kind,
                                       double snr_db,
                                       double *out,
                                       uintptr_t out_len);

/**
 * Q(x) via Craig's finite-interval formula.
 */
double spinal_craig_q(double x);

/**
 * Library version as a static NUL-terminated string.
 */
const char *spinal_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
