#ifndef NEGCURV_H
#define NEGCURV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Return code of every fallible call.
 */
typedef enum NegcurvCode {
  NEGCURV_CODE_OK = 0,
  NEGCURV_CODE_NULL_POINTER = 1,
  NEGCURV_CODE_INVALID_ARGUMENT = 2,
  NEGCURV_CODE_INVALID_MATRIX = 3,
  NEGCURV_CODE_IO = 4,
  NEGCURV_CODE_PARSE = 5,
  NEGCURV_CODE_ORACLE = 6,
  NEGCURV_CODE_BUFFER_TOO_SMALL = 7,
  NEGCURV_CODE_PANIC = 8,
  NEGCURV_CODE_INTERNAL = 9,
} NegcurvCode;

/**
 * Values accepted by the `heuristic` parameters.
 */
typedef enum NegcurvHeuristic {
  NEGCURV_HEURISTIC_ORDERED = 0,
  NEGCURV_HEURISTIC_S2LDE = 1,
  NEGCURV_HEURISTIC_L2SDE = 2,
  NEGCURV_HEURISTIC_IDE = 3,
} NegcurvHeuristic;

/**
 * Values accepted by the `build` parameters.
 */
typedef enum NegcurvBuild {
  NEGCURV_BUILD_BUILD1 = 0,
  NEGCURV_BUILD_BUILD2 = 1,
} NegcurvBuild;

/**
 * Values returned by [`negcurv_result_status`].
 */
typedef enum NegcurvSeekStatus {
  NEGCURV_SEEK_STATUS_NEGATIVE_FOUND = 0,
  NEGCURV_SEEK_STATUS_DIAGONAL_NEGATIVE = 1,
  NEGCURV_SEEK_STATUS_EXHAUSTED = 2,
} NegcurvSeekStatus;

/**
 * Opaque symmetric matrix.
 */
typedef struct NegcurvMatrix NegcurvMatrix;

/**
 * Opaque detector result.
 */
typedef struct NegcurvResult NegcurvResult;

/**
 * `f(x, n, user_data)`; must not unwind.
 */
typedef double (*NegcurvObjective)(const double *x, size_t n, void *user_data);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread, or NULL. The
 * pointer stays valid until the next call into this library on the same thread.
 */
const char *negcurv_last_error_message(void);

/**
 * Creates a matrix from `n * n` row-major values. The input must be
 * symmetric within a relative tolerance of 1e-12; it is averaged with its transpose.
 *
 * # Safety
 * `values` must point to `n * n` readable doubles and `out` must be writable.
 */
enum NegcurvCode negcurv_matrix_new(size_t n, const double *values, struct NegcurvMatrix **out);

/**
 * Loads a Matrix Market or dense-text file, detecting the format.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` must be writable.
 */
enum NegcurvCode negcurv_matrix_load(const char *path, struct NegcurvMatrix **out);

/**
 * # Safety
 * `m` must be NULL or a handle from this library that has not been freed.
 */
void negcurv_matrix_free(struct NegcurvMatrix *m);

/**
 * Dimension of `m`, or 0 when `m` is NULL.
 *
 * # Safety
 * `m` must be NULL or a live handle.
 */
size_t negcurv_matrix_dim(const struct NegcurvMatrix *m);

/**
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum NegcurvCode negcurv_matrix_min_eigenvalue(const struct NegcurvMatrix *m, double *out);

/**
 * Runs the detector on a stored matrix with the variant given by a
 * [`NegcurvHeuristic`] and a [`NegcurvBuild`] value.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum NegcurvCode negcurv_seek(const struct NegcurvMatrix *m,
                              uint32_t heuristic,
                              uint32_t build,
                              double epsilon,
                              struct NegcurvResult **out);

/**
 * Runs the detector on finite-difference Hessian entries of `f` at `x`
 * with step `h`. Each distinct evaluation point is passed to `f` once.
 *
 * # Safety
 * `x` must point to `n` readable doubles, `out` must be writable, and `f`
 * must be safe to call with `user_data` for the duration of the call.
 */
enum NegcurvCode negcurv_seek_fd(NegcurvObjective f,
                                 void *user_data,
                                 size_t n,
                                 const double *x,
                                 double h,
                                 uint32_t heuristic,
                                 uint32_t build,
                                 double epsilon,
                                 struct NegcurvResult **out);

/**
 * # Safety
 * `r` must be NULL or a live result handle.
 */
void negcurv_result_free(struct NegcurvResult *r);

/**
 * Estimate of the smallest eigenvalue (NaN when `r` is NULL).
 *
 * # Safety
 * `r` must be NULL or a live handle.
 */
double negcurv_result_lambda(const struct NegcurvResult *r);

/**
 * # Safety
 * `r` must be NULL or a live handle.
 */
size_t negcurv_result_iterations(const struct NegcurvResult *r);

/**
 * Distinct oracle queries (function evaluations besides `f(x)` for finite differences).
 *
 * # Safety
 * `r` must be NULL or a live handle.
 */
size_t negcurv_result_oracle_cost(const struct NegcurvResult *r);

/**
 * A [`NegcurvSeekStatus`] value, or -1 when `r` is NULL.
 *
 * # Safety
 * `r` must be NULL or a live handle.
 */
int32_t negcurv_result_status(const struct NegcurvResult *r);

/**
 * 1 when the result certifies an eigenvalue below `-epsilon`, else 0.
 *
 * # Safety
 * `r` must be NULL or a live handle.
 */
int32_t negcurv_result_found_negative(const struct NegcurvResult *r);

/**
 * Number of certificate indices (0 when there is no certificate).
 *
 * # Safety
 * `r` must be NULL or a live handle.
 */
size_t negcurv_result_certificate_len(const struct NegcurvResult *r);

/**
 * Copies the certificate's indices into `indices` and, if non-NULL, its
 * unit eigenvector into `vector`. Both buffers need `capacity` entries, at
 * least [`negcurv_result_certificate_len`].
 *
 * # Safety
 * `r` must be a live handle; `indices` and non-NULL `vector` must hold `capacity` entries.
 */
enum NegcurvCode negcurv_result_certificate(const struct NegcurvResult *r,
                                            size_t *indices,
                                            double *vector,
                                            size_t capacity);

/**
 * Serializes the result record to JSON. Release with [`negcurv_string_free`].
 *
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum NegcurvCode negcurv_result_to_json(const struct NegcurvResult *r, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void negcurv_string_free(char *s);

/**
 * Worst-case gap `(5/3) sqrt(n) L h` between the smallest eigenvalues of the
 * finite-difference and true Hessians.
 */
double negcurv_error_bound(size_t n, double lipschitz, double h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEGCURV_H */
