#ifndef SOCLE_H
#define SOCLE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of every fallible call.
 */
typedef enum SocleStatus {
  SOCLE_STATUS_OK = 0,
  SOCLE_STATUS_NULL_POINTER = 1,
  SOCLE_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Non-convergence or a failed numeric certificate.
   */
  SOCLE_STATUS_NUMERIC = 3,
  /**
   * The element has a nonzero trace on some minimal ideal.
   */
  SOCLE_STATUS_NOT_IN_COMMUTATOR_SPACE = 4,
  SOCLE_STATUS_BUFFER_TOO_SMALL = 5,
  SOCLE_STATUS_PANIC = 6,
} SocleStatus;

/**
 * Opaque algebra handle.
 */
typedef struct SocleAlgebra SocleAlgebra;

/**
 * Opaque element handle.
 */
typedef struct SocleElement SocleElement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until
 * the next call into the library from the same thread.
 */
const char *socle_last_error(void);

/**
 * Library version as a static string.
 */
const char *socle_version(void);

/**
 * `M_{n_1} + ... + M_{n_k}` with default tolerances.
 *
 * # Safety
 * `sizes` holds `count` values and `out` is writable.
 */
enum SocleStatus socle_algebra_blocks(const size_t *sizes, size_t count, struct SocleAlgebra **out);

/**
 * Algebra of a JSON instance document. Structure-constant algebras are
 * decomposed with `seed` before returning.
 *
 * # Safety
 * `json` is a NUL-terminated string and `out` is writable.
 */
enum SocleStatus socle_algebra_from_json(const char *json,
                                         uint64_t seed,
                                         struct SocleAlgebra **out);

/**
 * # Safety
 * `alg` is NULL or a handle not yet freed.
 */
void socle_algebra_free(struct SocleAlgebra *alg);

/**
 * Vector-space dimension; 0 for NULL.
 *
 * # Safety
 * `alg` is NULL or a live handle.
 */
size_t socle_algebra_dim(const struct SocleAlgebra *alg);

/**
 * Writes the block sizes into `out` (capacity `cap`) and their number
 * into `count`. Returns `BUFFER_TOO_SMALL` with `count` set when `cap`
 * is short.
 *
 * # Safety
 * `alg` is live, `out` holds `cap` slots, `count` is writable.
 */
enum SocleStatus socle_algebra_block_sizes(const struct SocleAlgebra *alg,
                                           size_t *out,
                                           size_t cap,
                                           size_t *count);

/**
 * Element from coordinates split into real and imaginary parts. `im`
 * may be NULL for a real element.
 *
 * # Safety
 * `re` (and `im` unless NULL) hold `len` values; `out` is writable.
 */
enum SocleStatus socle_element_new(const struct SocleAlgebra *alg,
                                   const double *re,
                                   const double *im,
                                   size_t len,
                                   struct SocleElement **out);

/**
 * # Safety
 * `a` is NULL or a handle not yet freed.
 */
void socle_element_free(struct SocleElement *a);

/**
 * Copies the coordinates of `a` into `re` and `im` (each of capacity
 * `cap`; either may be NULL).
 *
 * # Safety
 * `a` is live; non-NULL buffers hold `cap` slots.
 */
enum SocleStatus socle_element_coords(const struct SocleElement *a,
                                      double *re,
                                      double *im,
                                      size_t cap);

/**
 * Spectral rank.
 *
 * # Safety
 * Handles are live and `out` is writable.
 */
enum SocleStatus socle_rank(const struct SocleAlgebra *alg,
                            const struct SocleElement *a,
                            size_t *out);

/**
 * Spectral trace.
 *
 * # Safety
 * Handles are live and both outputs are writable.
 */
enum SocleStatus socle_trace(const struct SocleAlgebra *alg,
                             const struct SocleElement *a,
                             double *out_re,
                             double *out_im);

/**
 * Commutator factorization `a = xy - yx`. Returns
 * `NOT_IN_COMMUTATOR_SPACE` when some minimal ideal carries trace.
 *
 * # Safety
 * Handles are live and all outputs are writable. The returned elements
 * are owned by the caller.
 */
enum SocleStatus socle_shoda(const struct SocleAlgebra *alg,
                             const struct SocleElement *a,
                             uint64_t seed,
                             struct SocleElement **out_x,
                             struct SocleElement **out_y,
                             double *out_residual);

/**
 * Whether the socle is central, and whether all central-socle
 * predicates agree as expected.
 *
 * # Safety
 * `alg` is live and both outputs are writable.
 */
enum SocleStatus socle_central(const struct SocleAlgebra *alg,
                               uint64_t seed,
                               bool *out_central,
                               bool *out_consistent);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOCLE_H */
