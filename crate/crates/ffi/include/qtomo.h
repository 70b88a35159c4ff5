#ifndef QTOMO_H
#define QTOMO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum QtomoStatus {
  QTOMO_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  QTOMO_STATUS_NULL_POINTER = 1,
  /**
   * Bad argument or configuration (dimension, setting code, sizes, UTF-8).
   */
  QTOMO_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Coefficients or matrix do not describe a density matrix.
   */
  QTOMO_STATUS_INVALID_STATE = 3,
  /**
   * Malformed, inconsistent or unreadable data.
   */
  QTOMO_STATUS_DATA = 4,
  /**
   * Numerical failure (underflow, degenerate information).
   */
  QTOMO_STATUS_NUMERICAL = 5,
  /**
   * Output buffer too small; see the function's documentation.
   */
  QTOMO_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  QTOMO_STATUS_PANIC = 7,
} QtomoStatus;

/**
 * Opaque batch of measurement records.
 */
typedef struct QtomoRecords QtomoRecords;

/**
 * Opaque density matrix.
 */
typedef struct QtomoState QtomoState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qtomo_version(void);

/**
 * Copies the last error message of the calling thread into `buf`
 * (NUL-terminated, truncated to `len - 1` bytes). Returns the full message
 * length in bytes excluding the terminator, or 0 if there is none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t qtomo_last_error(char *buf, size_t len);

/**
 * Single-qubit state from a Bloch vector (`|r| ≤ 1`).
 *
 * # Safety
 * `out` must be a valid pointer to write a handle into.
 */
enum QtomoStatus qtomo_state_from_bloch(double x, double y, double z, struct QtomoState **out);

/**
 * State from Pauli coefficients `c_1 … c_{d²-1}` (identity excluded), so
 * `rho = (I + Σ c_i E_i) / d`. `dim` is 2 or 4; `len` must be `dim² - 1`.
 * Two-qubit labels are ordered `IX, IY, IZ, XI, XX, …, ZZ`, the first
 * letter acting on the measured qubit.
 *
 * # Safety
 * `coeffs` must point to `len` readable doubles; `out` must be valid.
 */
enum QtomoStatus qtomo_state_from_pauli(size_t dim,
                                        const double *coeffs,
                                        size_t len,
                                        struct QtomoState **out);

/**
 * The Bell state `(|00⟩ + |11⟩)/√2`.
 *
 * # Safety
 * `out` must be valid.
 */
enum QtomoStatus qtomo_state_bell(struct QtomoState **out);

/**
 * Hilbert-space dimension of a state, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t qtomo_state_dim(const struct QtomoState *state);

/**
 * Writes the non-identity Pauli coefficients (`dim² - 1` values) into `out`.
 * Returns `BufferTooSmall` if `len` is insufficient.
 *
 * # Safety
 * `state` must be a live handle and `out` must point to `len` writable doubles.
 */
enum QtomoStatus qtomo_state_pauli(const struct QtomoState *state, double *out, size_t len);

/**
 * Root fidelity `Tr √(√a b √a)` between two states of equal dimension.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be valid.
 */
enum QtomoStatus qtomo_fidelity(const struct QtomoState *a,
                                const struct QtomoState *b,
                                double *out);

/**
 * Trace distance `½ ‖a − b‖₁`.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be valid.
 */
enum QtomoStatus qtomo_trace_distance(const struct QtomoState *a,
                                      const struct QtomoState *b,
                                      double *out);

/**
 * Releases a state handle. Null is ignored.
 *
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void qtomo_state_free(struct QtomoState *state);

/**
 * Simulates `n_records` measurement records from `truth` under the control
 * `setting` (e.g. `"XYZ"`, `"0+XYZ"`, `"XY+YZ"`). Each record runs
 * `round(total_time / dt)` steps. Results depend only on the arguments,
 * never on the thread count.
 *
 * # Safety
 * `truth` must be live, `setting` a NUL-terminated string, `out` valid.
 */
enum QtomoStatus qtomo_simulate(const struct QtomoState *truth,
                                const char *setting,
                                double omega,
                                double coupling,
                                double dt,
                                double total_time,
                                double tau,
                                size_t n_records,
                                uint64_t seed,
                                struct QtomoRecords **out);

/**
 * Reads a record file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` valid.
 */
enum QtomoStatus qtomo_records_read(const char *path, struct QtomoRecords **out);

/**
 * Writes a record file.
 *
 * # Safety
 * `records` must be live; `path` a NUL-terminated string.
 */
enum QtomoStatus qtomo_records_write(const struct QtomoRecords *records, const char *path);

/**
 * Number of records in a batch, or 0 for a null handle.
 *
 * # Safety
 * `records` must be null or a live handle.
 */
size_t qtomo_records_len(const struct QtomoRecords *records);

/**
 * Releases a record batch. Null is ignored.
 *
 * # Safety
 * `records` must be null or a handle not yet freed.
 */
void qtomo_records_free(struct QtomoRecords *records);

/**
 * Single-qubit Bayesian mean estimate over `grid_size` candidates drawn
 * uniformly from the Bloch ball with `grid_seed`. Optionally reports the
 * posterior spread `√Tr Cov` through `sqrt_tr_cov` (may be null).
 *
 * # Safety
 * `records` must be live; `out` valid; `sqrt_tr_cov` null or valid.
 */
enum QtomoStatus qtomo_estimate_bme(const struct QtomoRecords *records,
                                    size_t grid_size,
                                    uint64_t grid_seed,
                                    struct QtomoState **out,
                                    double *sqrt_tr_cov);

/**
 * Constrained maximum-likelihood estimate by differential evolution with
 * `restarts` restarts (0 selects the default) seeded by `seed`.
 *
 * # Safety
 * `records` must be live; `out` valid.
 */
enum QtomoStatus qtomo_estimate_mle(const struct QtomoRecords *records,
                                    size_t restarts,
                                    uint64_t seed,
                                    struct QtomoState **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QTOMO_H */
