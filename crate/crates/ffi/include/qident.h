/* C interface for the qident q-series engine.
 *
 * Status codes returned by every fallible function:
 *   0  QIDENT_OK         success
 *   1  QIDENT_MATH_FAIL  well-formed run, mathematical check failed
 *                        (coefficient mismatch, infeasible fit,
 *                        congruence counterexample)
 *   2  QIDENT_INVALID    invalid argument, parse error, unknown id
 *   3  QIDENT_INTERNAL   internal error
 *
 * Strings written through out-parameters are NUL-terminated, allocated by
 * the library, and must be released with qident_string_free(). Opaque
 * handles must be released with their matching *_free() function. On any
 * non-zero status, qident_last_error() returns a freshly allocated
 * description of the most recent failure on the calling thread (or NULL).
 */

#ifndef QIDENT_H
#define QIDENT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum qident_status {
  QIDENT_OK = 0,
  QIDENT_MATH_FAIL = 1,
  QIDENT_INVALID = 2,
  QIDENT_INTERNAL = 3,
};

/* Opaque handle to a truncated q-series with exact rational coefficients. */
typedef struct QidentSeries QidentSeries;

/* Library version; static storage, do not free. */
const char *qident_version(void);

/* Most recent failure message on this thread, or NULL. Caller frees. */
char *qident_last_error(void);

/* Release a string allocated by this library. NULL is a no-op. */
void qident_string_free(char *ptr);

/* Expand a DSL expression, e.g. "eta(5)^5/eta(1)", to `order` coefficients.
 * On QIDENT_OK, *out receives a new series handle. */
int32_t qident_series_expand(const char *expr, uint32_t order,
                             QidentSeries **out);

/* Number of coefficients held by the series (its truncation order). */
uint32_t qident_series_order(const QidentSeries *series);

/* Coefficient of q^index as a decimal string ("8" or "-3/2"); an index at
 * or beyond the order is QIDENT_INVALID, never silently zero. */
int32_t qident_series_coeff(const QidentSeries *series, uint32_t index,
                            char **out);

/* All coefficients as a JSON array of decimal strings. */
int32_t qident_series_json(const QidentSeries *series, char **out);

/* Release a series handle. NULL is a no-op. */
void qident_series_free(QidentSeries *series);

/* Verify a built-in identity coefficientwise at the given order.
 * QIDENT_OK: verified. QIDENT_MATH_FAIL: first differing index written to
 * *mismatch_index when non-NULL. QIDENT_INVALID: unknown id. */
int32_t qident_verify_id(const char *id, uint32_t order,
                         int64_t *mismatch_index);

/* Built-in identity catalog enumeration. */
uint32_t qident_registry_len(void);
int32_t qident_registry_id(uint32_t index, char **out);

/* Fit eta-quotient exponents to the expression expanded at `order`, over
 * `periods_len` ascending candidate periods. A JSON report is written to
 * *out_json on both success and infeasibility (QIDENT_MATH_FAIL). */
int32_t qident_fit(const char *expr, const uint32_t *periods,
                   size_t periods_len, uint32_t order, char **out_json);

/* Scan p(modulus*n + residue) = 0 (mod modulus) for n = 0..count-1.
 * On QIDENT_MATH_FAIL the offending n is written to *counterexample_n
 * when non-NULL. */
int32_t qident_partition_congruence(uint64_t modulus, uint64_t residue,
                                    uint64_t count, int64_t *counterexample_n);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QIDENT_H */
