#ifndef ONTIC_H
#define ONTIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * How `l_a1` enters; `Fixed` reads the accompanying `two_l_a1`.
 */
typedef enum OnticLCondition {
  ONTIC_L_CONDITION_SUM_ALL = 0,
  ONTIC_L_CONDITION_FIXED = 1,
  ONTIC_L_CONDITION_PAPER_TUNED = 2,
} OnticLCondition;

/**
 * Counting mode; `Default` picks plain for `two_j = 1`, interference
 * otherwise.
 */
typedef enum OnticMode {
  ONTIC_MODE_DEFAULT = 0,
  ONTIC_MODE_PLAIN = 1,
  ONTIC_MODE_INTERFERENCE = 2,
} OnticMode;

/**
 * Result code of every fallible call.
 */
typedef enum OnticStatus {
  ONTIC_STATUS_OK = 0,
  ONTIC_STATUS_NULL_POINTER = 1,
  ONTIC_STATUS_INVALID_ARGUMENT = 2,
  ONTIC_STATUS_DOMAIN = 3,
  ONTIC_STATUS_RANGE_VIOLATION = 4,
  ONTIC_STATUS_NON_INTEGRAL_RATIO = 5,
  ONTIC_STATUS_DEGENERATE_NORMALIZATION = 6,
  ONTIC_STATUS_NO_GRID_POINT = 7,
  ONTIC_STATUS_ENUMERATION_LIMIT = 8,
  ONTIC_STATUS_INDEX_OUT_OF_RANGE = 9,
  ONTIC_STATUS_PANIC = 10,
} OnticStatus;

/**
 * Opaque probability table.
 */
typedef struct OnticTable OnticTable;

/**
 * One outcome of a table. For beam-splitter tables `c_b2`/`d_b2` are the
 * output photon numbers; for spin tables they are `j + m_b2` and `j - m_b2`.
 */
typedef struct OnticRow {
  int32_t two_m_b2;
  uint32_t c_b2;
  uint32_t d_b2;
  double p_model;
  double p_qm;
  double abs_delta;
} OnticRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length without
 * the terminator, or 0 when there is no message.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t ontic_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ontic_version(void);

/**
 * `P(m_b2 | n, j, m_a1, θ = π·b_map/n)` for every `m_b2`, with the Wigner
 * reference attached. On success `*out` owns a new table.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer.
 */
enum OnticStatus ontic_sg_probability(uint32_t n,
                                      uint32_t two_j,
                                      int32_t two_m_a1,
                                      uint32_t b_map,
                                      enum OnticMode mode,
                                      enum OnticLCondition l_condition,
                                      int32_t two_l_a1,
                                      struct OnticTable **out);

/**
 * Beam-splitter output probabilities for `(c_a1, d_a1)` input photons.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer.
 */
enum OnticStatus ontic_bs_probability(uint32_t n,
                                      uint32_t c_a1,
                                      uint32_t d_a1,
                                      uint32_t b_map,
                                      enum OnticMode mode,
                                      enum OnticLCondition l_condition,
                                      int32_t two_l_a1,
                                      struct OnticTable **out);

/**
 * Releases a table. Null is ignored.
 *
 * # Safety
 * `table` must be null or a handle from this library not yet freed.
 */
void ontic_table_free(struct OnticTable *table);

/**
 * Number of outcomes; 0 for null.
 *
 * # Safety
 * `table` must be null or a live handle.
 */
size_t ontic_table_len(const struct OnticTable *table);

/**
 * Whether some outcome weight came out negative.
 *
 * # Safety
 * `table` must be null or a live handle.
 */
bool ontic_table_has_negative_weight(const struct OnticTable *table);

/**
 * Copies outcome `index` (ascending `m_b2`) into `*out`.
 *
 * # Safety
 * `table` must be a live handle and `out` valid for one write.
 */
enum OnticStatus ontic_table_row(const struct OnticTable *table,
                                 size_t index,
                                 struct OnticRow *out);

/**
 * Exact probability of outcome `index` as `"p/q"` (or `"p"`); release the
 * string with [`ontic_string_free`].
 *
 * # Safety
 * `table` must be a live handle and `out` valid for one write.
 */
enum OnticStatus ontic_table_exact_probability(const struct OnticTable *table,
                                               size_t index,
                                               char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void ontic_string_free(char *s);

/**
 * `|d^j_{m',m}(θ)|²` with doubled `j`, `m`, `m'` and `θ` in radians.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum OnticStatus ontic_wigner_d_squared(uint32_t two_j,
                                        int32_t two_m,
                                        int32_t two_mp,
                                        double theta,
                                        double *out);

/**
 * `τ = cos²(b_map·π/(2n))`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum OnticStatus ontic_tau_from_bmap(uint32_t n, uint32_t b_map, double *out);

/**
 * Nearest grid point to `tau` within `tolerance`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum OnticStatus ontic_bmap_from_tau(uint32_t n, double tau, double tolerance, uint32_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ONTIC_H */
