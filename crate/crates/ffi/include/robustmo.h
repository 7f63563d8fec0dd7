#ifndef ROBUSTMO_H
#define ROBUSTMO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  RMO_STATUS_OK = 0,
  RMO_STATUS_NULL_POINTER = 1,
  RMO_STATUS_INVALID_ARGUMENT = 2,
  RMO_STATUS_DIMENSION_MISMATCH = 3,
  RMO_STATUS_INVALID_INSTANCE = 4,
  RMO_STATUS_IO = 5,
  RMO_STATUS_NUMERICAL = 6,
  RMO_STATUS_BUFFER_TOO_SMALL = 7,
  RMO_STATUS_PANIC = 8,
} RmoStatus;

typedef enum {
  RMO_RELATION_STRICT_LOWER = 0,
  RMO_RELATION_LOWER = 1,
  RMO_RELATION_STRICT_UPPER = 2,
  RMO_RELATION_UPPER = 3,
} RmoRelation;

/**
 * Opaque validated instance.
 */
typedef struct RmoInstance RmoInstance;

/**
 * Opaque solver result.
 */
typedef struct RmoSolveReport RmoSolveReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *rmo_last_error_message(void);

/**
 * Parses a JSON instance document.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
RmoStatus rmo_instance_parse(const char *json, RmoInstance **out);

/**
 * Loads a JSON instance file.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
RmoStatus rmo_instance_load(const char *path, RmoInstance **out);

/**
 * # Safety
 * `inst` must come from `rmo_instance_parse`/`rmo_instance_load` or be null.
 */
void rmo_instance_free(RmoInstance *inst);

/**
 * Writes `n`, `m`, `k` and the number of materialized decisions.
 *
 * # Safety
 * All pointers must be valid; output pointers must be writable.
 */
RmoStatus rmo_instance_dims(const RmoInstance *inst,
                            size_t *n,
                            size_t *m,
                            size_t *k,
                            size_t *decisions);

/**
 * Robust weakly efficient decision indices by brute force.
 *
 * # Safety
 * `out` must hold `cap` entries; `len` must be writable.
 */
RmoStatus rmo_oracle_robust(const RmoInstance *inst, size_t *out, size_t cap, size_t *len);

/**
 * Exactness threshold. `*defined` is false when no threshold applies.
 *
 * # Safety
 * Pointers must be valid and writable.
 */
RmoStatus rmo_wfdvp_p(const RmoInstance *inst, size_t *out, bool *defined);

/**
 * Runs the finite solver with default options.
 *
 * # Safety
 * `inst` must be valid; `out` must be writable.
 */
RmoStatus rmo_solve(const RmoInstance *inst, size_t p, double epsilon, RmoSolveReport **out);

/**
 * # Safety
 * `report` must come from `rmo_solve` or be null.
 */
void rmo_report_free(RmoSolveReport *report);

/**
 * Solution decision indices in increasing order.
 *
 * # Safety
 * `out` must hold `cap` entries; `len` must be writable.
 */
RmoStatus rmo_report_solutions(const RmoSolveReport *report, size_t *out, size_t cap, size_t *len);

/**
 * Distinct witness points of solution `k`, row-major; `len` receives the
 * number of doubles.
 *
 * # Safety
 * `out` must hold `cap` doubles; `len` must be writable.
 */
RmoStatus rmo_report_witness(const RmoSolveReport *report,
                             size_t k,
                             double *out,
                             size_t cap,
                             size_t *len);

/**
 * Lower bound (into `lb`, `m` doubles) and cone opening used by the solve.
 *
 * # Safety
 * `lb` must hold `cap` doubles; `len` and `alpha` must be writable.
 */
RmoStatus rmo_report_bounds(const RmoSolveReport *report,
                            double *lb,
                            size_t cap,
                            size_t *len,
                            double *alpha);

/**
 * `psi_A(y)` for a cloud of `count` points in `R^m`.
 *
 * # Safety
 * `a` must hold `count * m` doubles, `y` must hold `m`, `out` writable.
 */
RmoStatus rmo_psi(const double *a, size_t count, size_t m, const double *y, double *out);

/**
 * One of the four set relations between clouds `A` and `B`.
 *
 * # Safety
 * `a` must hold `na * m` doubles, `b` must hold `nb * m`, `out` writable.
 */
RmoStatus rmo_relation_holds(RmoRelation kind,
                             const double *a,
                             size_t na,
                             const double *b,
                             size_t nb,
                             size_t m,
                             bool *out);

/**
 * Margin certifying `A ≺^u B`. `*certified` is false when none exists.
 *
 * # Safety
 * As for `rmo_relation_holds`; `epsilon` and `certified` writable.
 */
RmoStatus rmo_certify_strict_upper(const double *a,
                                   size_t na,
                                   const double *b,
                                   size_t nb,
                                   size_t m,
                                   double *epsilon,
                                   bool *certified);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROBUSTMO_H */
