#ifndef LYAPCOMP_H
#define LYAPCOMP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum LcStatus {
  LC_STATUS_OK = 0,
  LC_STATUS_NULL_POINTER = 1,
  LC_STATUS_INVALID_INPUT = 2,
  LC_STATUS_DIMENSION_MISMATCH = 3,
  LC_STATUS_NOT_POSITIVE_DEFINITE = 4,
  LC_STATUS_NUMERICAL_FAILURE = 5,
  LC_STATUS_BUFFER_TOO_SMALL = 6,
  LC_STATUS_PANIC = 7,
} LcStatus;

typedef enum LcReorth {
  LC_REORTH_FIRST_CYCLE = 0,
  LC_REORTH_FULL = 1,
  LC_REORTH_NONE = 2,
} LcReorth;

typedef enum LcMethod {
  LC_METHOD_COMPRESS = 0,
  LC_METHOD_TWO_PASS = 1,
  LC_METHOD_REFERENCE = 2,
} LcMethod;

typedef enum LcTermination {
  LC_TERMINATION_TOLERANCE = 0,
  LC_TERMINATION_BREAKDOWN = 1,
  LC_TERMINATION_MATVEC_CAP = 2,
} LcTermination;

// Symmetric positive definite operator `A`.
typedef struct LcOperator LcOperator;

// Low-rank solution `X = Z Y Zᵀ` of `A X + X A = c cᵀ`.
typedef struct LcSolution LcSolution;

// Solver settings; start from [`lc_config_default`].
typedef struct LcConfig {
  double tol;
  // Maximum number of stored vectors of length `n`.
  size_t maxmem;
  size_t max_matvecs;
  enum LcReorth reorth;
  enum LcMethod method;
} LcConfig;

// Summary of a finished solve.
typedef struct LcReport {
  uint64_t matvecs;
  size_t cycles;
  size_t total_steps;
  size_t poles;
  size_t cycle_length;
  size_t peak_vectors;
  enum LcTermination termination;
  // Spectral interval used for the poles, for the normalized operator.
  double interval_lo;
  double interval_hi;
  // Last residual estimate, relative to `‖c‖²`.
  double last_estimate;
} LcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates an operator from a symmetric matrix in CSR layout with 0-based
// indices: `row_offsets` has `n + 1` entries, `col_indices` and `values`
// have `row_offsets[n]` entries.
//
// # Safety
// The arrays must be valid for the stated lengths and `out` must be writable.
enum LcStatus lc_operator_from_csr(size_t n,
                                   const size_t *row_offsets,
                                   const size_t *col_indices,
                                   const double *values,
                                   struct LcOperator **out);

// Creates an operator from a dense symmetric `n × n` matrix stored by columns.
//
// # Safety
// `values` must hold `n * n` doubles and `out` must be writable.
enum LcStatus lc_operator_from_dense(size_t n, const double *values, struct LcOperator **out);

// Supplies the extreme eigenvalues `0 < lo <= hi` of the operator, used for
// the poles instead of the estimate from the first cycle.
//
// # Safety
// `op` must be a live handle.
enum LcStatus lc_operator_set_spectrum(struct LcOperator *op, double lo, double hi);

// Dimension of the operator, or 0 for a null handle.
//
// # Safety
// `op` must be null or a live handle.
size_t lc_operator_dimension(const struct LcOperator *op);

// # Safety
// `op` must be null or a handle not yet freed.
void lc_operator_free(struct LcOperator *op);

struct LcConfig lc_config_default(void);

// Solves `A X + X A = c cᵀ`. The problem is rescaled internally, which does
// not change `X`. A solve that stops at the matvec cap still succeeds; check
// `termination` in the report.
//
// # Safety
// `op` must be a live handle, `c` must hold `len` doubles, `config` may be
// null for the defaults and `out` must be writable.
enum LcStatus lc_solve(const struct LcOperator *op,
                       const double *c,
                       size_t len,
                       const struct LcConfig *config,
                       struct LcSolution **out);

// Length `n` of the solution factor's columns, or 0 for a null handle.
//
// # Safety
// `sol` must be null or a live handle.
size_t lc_solution_dimension(const struct LcSolution *sol);

// Rank `r` of the factorization, or 0 for a null handle.
//
// # Safety
// `sol` must be null or a live handle.
size_t lc_solution_rank(const struct LcSolution *sol);

// Copies the orthonormal factor `Z` (`n × r`, by columns) into `buf`.
//
// # Safety
// `sol` must be a live handle and `buf` writable for `len` doubles.
enum LcStatus lc_solution_factor(const struct LcSolution *sol, double *buf, size_t len);

// Copies the symmetric core `Y` (`r × r`, by columns) into `buf`. It is
// scaled so that `X = Z Y Zᵀ` solves the original equation.
//
// # Safety
// `sol` must be a live handle and `buf` writable for `len` doubles.
enum LcStatus lc_solution_core(const struct LcSolution *sol, double *buf, size_t len);

// # Safety
// `sol` must be a live handle and `out` writable.
enum LcStatus lc_solution_report(const struct LcSolution *sol, struct LcReport *out);

// Writes `‖A X + X A − c cᵀ‖_F / ‖c‖²` to `out`, using `2r + 1` operator
// applications.
//
// # Safety
// Handles must be live, `c` must hold `len` doubles and `out` be writable.
enum LcStatus lc_solution_residual(const struct LcOperator *op,
                                   const struct LcSolution *sol,
                                   const double *c,
                                   size_t len,
                                   double *out);

// # Safety
// `sol` must be null or a handle not yet freed.
void lc_solution_free(struct LcSolution *sol);

// Copies the last error message of this thread, NUL-terminated and
// truncated to fit, into `buf`. Returns the full message length plus one
// (0 when there is no message). `buf` may be null to query the length.
//
// # Safety
// `buf` must be null or writable for `len` bytes.
size_t lc_last_error(char *buf, size_t len);

// Static description of a status code.
const char *lc_status_string(enum LcStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LYAPCOMP_H */
