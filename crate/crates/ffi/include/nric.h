#ifndef NRIC_H
#define NRIC_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NricStatus {
  NRIC_STATUS_OK = 0,
  NRIC_STATUS_NULL_POINTER = 1,
  NRIC_STATUS_INVALID_INPUT = 2,
  NRIC_STATUS_DEGENERATE = 3,
  NRIC_STATUS_INFEASIBLE = 4,
  NRIC_STATUS_PARSE = 5,
  NRIC_STATUS_IO = 6,
  NRIC_STATUS_REPRESENTATION = 7,
  NRIC_STATUS_TABLE = 8,
  NRIC_STATUS_OUT_OF_RANGE = 9,
  NRIC_STATUS_PANIC = 10,
} NricStatus;

typedef enum NricElementType {
  NRIC_ELEMENT_TYPE_SERIES_INDUCTOR = 0,
  NRIC_ELEMENT_TYPE_SERIES_CAPACITOR = 1,
  NRIC_ELEMENT_TYPE_SHUNT_INDUCTOR = 2,
  NRIC_ELEMENT_TYPE_SHUNT_CAPACITOR = 3,
} NricElementType;

/**
 * Opaque coil pair.
 */
typedef struct NricCoilPair NricCoilPair;

/**
 * Opaque ranked list of matching networks.
 */
typedef struct NricImnSet NricImnSet;

/**
 * Opaque Touchstone record.
 */
typedef struct NricTouchstone NricTouchstone;

/**
 * Opaque S-parameter two-port.
 */
typedef struct NricTwoPort NricTwoPort;

typedef struct NricComplex {
  double re;
  double im;
} NricComplex;

/**
 * Coil parameters recovered by [`nric_extract_coils`].
 */
typedef struct NricCoilParams {
  double l1;
  double l2;
  double r1;
  double r2;
  double k;
  /**
   * Non-zero when every value lies in its physical range.
   */
  uint8_t physical;
} NricCoilParams;

/**
 * One matching network. Element order: TX series, TX shunt, RX series,
 * RX shunt. Values in henry or farad.
 */
typedef struct NricImn {
  uint8_t topology_case;
  enum NricElementType kinds[4];
  double values[4];
  double s21_mag;
  double s11_db;
  double s22_db;
} NricImn;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Byte length of the last error message on this thread, without the NUL.
 */
size_t nric_last_error_length(void);

/**
 * Copies the last error message into `buf` (NUL-terminated, truncated to
 * `len - 1` bytes). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t nric_last_error_message(char *buf, size_t len);

/**
 * # Safety
 * `out` must be a valid pointer to receive the handle.
 */
enum NricStatus nric_coil_pair_new(double l1,
                                   double l2,
                                   double r1,
                                   double r2,
                                   double k,
                                   struct NricCoilPair **out);

/**
 * # Safety
 * `pair` must be null or a handle from [`nric_coil_pair_new`], freed once.
 */
void nric_coil_pair_free(struct NricCoilPair *pair);

/**
 * Geometric-mean inductance placing the bare-link |S21| peak at `f_target`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NricStatus nric_l_opt(double f_target,
                           double r1,
                           double r2,
                           double zp1,
                           double zp2,
                           double k,
                           double *out);

/**
 * # Safety
 * `pair` must be a live handle; `out` valid for writes.
 */
enum NricStatus nric_f_opt(const struct NricCoilPair *pair, double zp1, double zp2, double *out);

/**
 * # Safety
 * `pair` must be a live handle; `out` valid for writes.
 */
enum NricStatus nric_s21_mag(const struct NricCoilPair *pair,
                             double zp1,
                             double zp2,
                             double f,
                             double *out);

/**
 * S-parameters of the bare coil pair at `f`.
 *
 * # Safety
 * `pair` must be a live handle; `out` valid for writes.
 */
enum NricStatus nric_coil_s_params(const struct NricCoilPair *pair,
                                   double f,
                                   double zp1,
                                   double zp2,
                                   struct NricTwoPort **out);

/**
 * Builds a two-port from a row-major `[S11, S12, S21, S22]` array.
 *
 * # Safety
 * `s` must point to four readable values; `out` valid for writes.
 */
enum NricStatus nric_two_port_from_s(const struct NricComplex *s,
                                     double zp1,
                                     double zp2,
                                     struct NricTwoPort **out);

/**
 * Entry `(row, col)` with zero-based indices.
 *
 * # Safety
 * `tp` must be a live handle; `out` valid for writes.
 */
enum NricStatus nric_two_port_get(const struct NricTwoPort *tp,
                                  size_t row,
                                  size_t col,
                                  struct NricComplex *out);

/**
 * # Safety
 * `tp` must be null or a live handle, freed once.
 */
void nric_two_port_free(struct NricTwoPort *tp);

/**
 * Maximum efficiency under simultaneous conjugate matching. Returns
 * `NRIC_STATUS_INFEASIBLE` (with `k_r` still written) when no bounded
 * maximum exists.
 *
 * # Safety
 * `tp` must be a live handle; `pte`, `k_r` valid for writes.
 */
enum NricStatus nric_pte_max(const struct NricTwoPort *tp, double *pte, double *k_r);

/**
 * # Safety
 * `tp` must be a live handle; `out` valid for writes.
 */
enum NricStatus nric_extract_coils(const struct NricTwoPort *tp,
                                   double f,
                                   struct NricCoilParams *out);

/**
 * Ranked matching networks for the bare pair at `f0`.
 *
 * # Safety
 * `pair` must be a live handle; `out` valid for writes.
 */
enum NricStatus nric_imn_synthesize(const struct NricCoilPair *pair,
                                    double f0,
                                    double zp1,
                                    double zp2,
                                    struct NricImnSet **out);

/**
 * Number of networks in the set; 0 for a null handle.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
size_t nric_imn_count(const struct NricImnSet *set);

/**
 * # Safety
 * `set` must be a live handle; `out` valid for writes.
 */
enum NricStatus nric_imn_get(const struct NricImnSet *set, size_t index, struct NricImn *out);

/**
 * # Safety
 * `set` must be null or a live handle, freed once.
 */
void nric_imn_free(struct NricImnSet *set);

/**
 * Rectified output of an `n`-stage chain.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NricStatus nric_v_out(uint32_t n, double v_rx, double v_t, double *out);

/**
 * Modified Bessel function `I0(x)`.
 */
double nric_bessel_i0(double x);

/**
 * Port-mismatch correction factor.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NricStatus nric_gamma(double zp1, double zp2, double *out);

/**
 * Deliverable power when the transmitter is SAR-limited to `p_tx_max`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum NricStatus nric_sar_pdl(double p_tx_max, double pte, double *out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` valid for writes.
 */
enum NricStatus nric_touchstone_read(const char *path, struct NricTouchstone **out);

/**
 * Writes the record as RI data with frequencies in Hz.
 *
 * # Safety
 * `ts` must be a live handle; `path` a NUL-terminated string.
 */
enum NricStatus nric_touchstone_write(const struct NricTouchstone *ts, const char *path);

/**
 * Number of frequency rows; 0 for a null handle.
 *
 * # Safety
 * `ts` must be null or a live handle.
 */
size_t nric_touchstone_len(const struct NricTouchstone *ts);

/**
 * Reference resistance of the record; NaN for a null handle.
 *
 * # Safety
 * `ts` must be null or a live handle.
 */
double nric_touchstone_r_ref(const struct NricTouchstone *ts);

/**
 * Row `index`: frequency in Hz and row-major `[S11, S12, S21, S22]`.
 *
 * # Safety
 * `ts` must be a live handle; `freq` valid for writes; `s` valid for four writes.
 */
enum NricStatus nric_touchstone_row(const struct NricTouchstone *ts,
                                    size_t index,
                                    double *freq,
                                    struct NricComplex *s);

/**
 * # Safety
 * `ts` must be null or a live handle, freed once.
 */
void nric_touchstone_free(struct NricTouchstone *ts);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NRIC_H */
