/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef HYPERKLEIN_H
#define HYPERKLEIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  HK_STATUS_OK = 0,
  HK_STATUS_NULL_POINTER = 1,
  HK_STATUS_DIMENSION_MISMATCH = 2,
  HK_STATUS_USAGE = 3,
  HK_STATUS_INVALID_POINT = 4,
  HK_STATUS_NUMERIC = 5,
  HK_STATUS_BOUNDARY = 6,
  HK_STATUS_DEGENERATE_FRAME = 7,
  HK_STATUS_BREAKDOWN = 8,
  HK_STATUS_CONTRACT_VIOLATION = 9,
  HK_STATUS_INSTANCE = 10,
  HK_STATUS_IO = 11,
  HK_STATUS_ORACLE_FAILED = 12,
  HK_STATUS_PANIC = 13,
} HkStatus;

typedef enum {
  HK_TERMINATION_BUDGET = 0,
  HK_TERMINATION_ZERO_SUBGRADIENT = 1,
  HK_TERMINATION_BREAKDOWN = 2,
} HkTermination;

/**
 * A seeded minimax-distance benchmark instance.
 */
typedef struct HkInstance HkInstance;

/**
 * The outcome of a solver run.
 */
typedef struct HkResult HkResult;

/**
 * User oracle: given a point `x` of `len = d + 1` doubles, writes the
 * objective value and a subgradient tangent at `x` (`len` doubles).
 * Returns 0 on success; any other value aborts the solve.
 */
typedef int32_t (*HkOracleFn)(void *user,
                              const double *x,
                              size_t len,
                              double *value,
                              double *subgradient);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *hk_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hk_version(void);

/**
 * `N(d, s, eps) = ceil(2 d (d+1) log(16 sinh(s) cosh(s) / (s eps)))`.
 */
HkStatus hk_query_bound(size_t d, double s, double eps, uint64_t *out);

/**
 * `log(16 sinh(s) cosh(s) / (s eps))`.
 */
HkStatus hk_log_factor(double s, double eps, double *out);

/**
 * Hyperbolic distance between two points of `d + 1` coordinates.
 */
HkStatus hk_distance(const double *x, const double *y, size_t d, double kappa, double *out);

/**
 * Klein coordinates (`d` doubles) of a hyperboloid point (`d + 1` doubles).
 */
HkStatus hk_to_klein(const double *x, size_t d, double kappa, double *u_out);

/**
 * Hyperboloid point (`d + 1` doubles) with the given Klein coordinates.
 */
HkStatus hk_from_klein(const double *u, size_t d, double kappa, double *x_out);

/**
 * Builds the minimax benchmark on the ball of radius `s / kappa` around the
 * canonical origin. Release with [`hk_instance_free`].
 */
HkStatus hk_instance_new(size_t d,
                         double kappa,
                         double s,
                         double tau,
                         double fraction,
                         uint64_t seed,
                         HkInstance **out);

void hk_instance_free(HkInstance *instance);

HkStatus hk_instance_dim(const HkInstance *instance, size_t *out);

/**
 * Optimal value `tau / kappa`.
 */
HkStatus hk_instance_fstar(const HkInstance *instance, double *out);

/**
 * Writes the minimizer (`d + 1` doubles).
 */
HkStatus hk_instance_target(const HkInstance *instance, double *out, size_t len);

/**
 * Evaluates the benchmark objective and a subgradient at `x` (`len = d + 1`).
 */
HkStatus hk_instance_evaluate(const HkInstance *instance,
                              const double *x,
                              size_t len,
                              double *value,
                              double *subgradient);

/**
 * Solves the instance to accuracy `eps` with `M = 1` on its own ball.
 * Release the result with [`hk_result_free`].
 */
HkStatus hk_solve_minimax(const HkInstance *instance, double eps, HkResult **out);

/**
 * Minimizes a user objective over the ball of radius `r` around the
 * canonical origin. `lipschitz_m` is the objective's Lipschitz constant and
 * only scales the reported target gap. `trace` enables per-step records.
 */
HkStatus hk_solve(size_t d,
                  double kappa,
                  double r,
                  double eps,
                  double lipschitz_m,
                  size_t max_updates,
                  HkOracleFn oracle,
                  void *user,
                  HkResult **out);

void hk_result_free(HkResult *result);

HkStatus hk_result_best_value(const HkResult *result, double *out);

/**
 * Writes the best point (`d + 1` doubles).
 */
HkStatus hk_result_best_point(const HkResult *result, double *out, size_t len);

/**
 * Oracle calls made.
 */
HkStatus hk_result_queries_used(const HkResult *result, size_t *out);

/**
 * Localizer updates made.
 */
HkStatus hk_result_updates(const HkResult *result, size_t *out);

HkStatus hk_result_theorem_bound(const HkResult *result, uint64_t *out);

HkStatus hk_result_terminated_by(const HkResult *result, HkTermination *out);

/**
 * Number of recorded steps.
 */
HkStatus hk_result_trace_len(const HkResult *result, size_t *out);

/**
 * Objective values of the feasible steps, in query order. Writes at most
 * `capacity` values and stores the total count in `count`.
 */
HkStatus hk_result_values(const HkResult *result, double *out, size_t capacity, size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERKLEIN_H */
