/* C interface for the pantograph proportional-delay numerics library. */

#ifndef PANTOGRAPH_H
#define PANTOGRAPH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; `Ok` is zero, everything else names the failure class.
 */
typedef enum PantographStatus {
  PANTOGRAPH_STATUS_OK = 0,
  /**
   * A pointer argument was null or an enum value out of range.
   */
  PANTOGRAPH_STATUS_USAGE = 1,
  /**
   * A precondition on the numeric inputs failed.
   */
  PANTOGRAPH_STATUS_DOMAIN = 2,
  /**
   * The tolerance was not reachable within the term budget.
   */
  PANTOGRAPH_STATUS_TRUNCATION = 3,
  /**
   * An iterate escaped the convergence rectangle.
   */
  PANTOGRAPH_STATUS_RECTANGLE_ESCAPE = 4,
  /**
   * An intermediate value left the representable range.
   */
  PANTOGRAPH_STATUS_RANGE = 5,
  /**
   * The iteration ran out of sweeps before reaching the tolerance.
   */
  PANTOGRAPH_STATUS_NON_CONVERGENCE = 6,
  /**
   * The marching integrator produced a non-finite state.
   */
  PANTOGRAPH_STATUS_BLOWUP = 7,
} PantographStatus;

/**
 * Stability verdict codes.
 */
typedef enum PantographVerdict {
  PANTOGRAPH_VERDICT_STABLE_ON_FINITE_INTERVAL = 0,
  PANTOGRAPH_VERDICT_UNSTABLE = 1,
  PANTOGRAPH_VERDICT_INCONCLUSIVE = 2,
} PantographVerdict;

/**
 * Opaque handle for a validated (a, q) pair.
 */
typedef struct PantographSpec PantographSpec;

/**
 * A truncated series evaluation.
 */
typedef struct PantographSeriesValue {
  double value;
  uint64_t terms_used;
  double tail_bound;
} PantographSeriesValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *pantograph_status_message(enum PantographStatus status);

/**
 * Builds a spec handle from coefficient and ratio arrays of length `len`.
 * On success writes the handle to `out`; free it with
 * [`pantograph_spec_free`].
 */
enum PantographStatus pantograph_spec_new(const double *a,
                                          const double *q,
                                          uintptr_t len,
                                          struct PantographSpec **out);

void pantograph_spec_free(struct PantographSpec *spec);

/**
 * Evaluates the series solution at `x` with tail bound at most `tol`.
 */
enum PantographStatus pantograph_eval(const struct PantographSpec *spec,
                                      double x,
                                      double tol,
                                      struct PantographSeriesValue *out);

/**
 * The r-th derivative of the series solution at `x`.
 */
enum PantographStatus pantograph_eval_derivative(const struct PantographSpec *spec,
                                                 double x,
                                                 uint32_t r,
                                                 double tol,
                                                 struct PantographSeriesValue *out);

/**
 * The coefficient product c_m (1 when m = 0).
 */
enum PantographStatus pantograph_coefficient_product(const struct PantographSpec *spec,
                                                     uint64_t m,
                                                     double *out);

/**
 * Rebuilds the solution at x + y from `outer_terms + 1` derivative values
 * at y; the tail bound covers the distance to the true value at x + y.
 */
enum PantographStatus pantograph_eval_addition(const struct PantographSpec *spec,
                                               double x,
                                               double y,
                                               uint32_t outer_terms,
                                               double tol,
                                               struct PantographSeriesValue *out);

/**
 * Sums the series at the complex argument re + i im and writes the real
 * and imaginary parts of the result.
 */
enum PantographStatus pantograph_eval_complex(const struct PantographSpec *spec,
                                              double re,
                                              double im,
                                              double tol,
                                              double *out_re,
                                              double *out_im);

/**
 * The exponential sandwich (lower, upper) enclosing the solution for
 * nonnegative coefficients and x >= 0.
 */
enum PantographStatus pantograph_sandwich_bounds(const struct PantographSpec *spec,
                                                 double x,
                                                 double *out_lower,
                                                 double *out_upper);

/**
 * ln Gamma(x) for x > 0.
 */
enum PantographStatus pantograph_log_gamma(double x, double *out);

/**
 * The Mittag-Leffler function E_alpha(x).
 */
enum PantographStatus pantograph_mittag_leffler(double alpha,
                                                double x,
                                                double tol,
                                                struct PantographSeriesValue *out);

/**
 * The fractional-order series solution at x >= 0.
 */
enum PantographStatus pantograph_eval_frac(const struct PantographSpec *spec,
                                           double alpha,
                                           double x,
                                           double tol,
                                           struct PantographSeriesValue *out);

/**
 * Max-norm residual of the Caputo equation under the L1 scheme on an
 * N-interval grid over [0, b], for 0 < alpha < 1.
 */
enum PantographStatus pantograph_caputo_l1_residual(const struct PantographSpec *spec,
                                                    double alpha,
                                                    double b,
                                                    uintptr_t n,
                                                    double *out);

/**
 * Marches RK4 to b with N steps and writes the N+1 node values into
 * `out_values` (capacity must be at least N+1).
 */
enum PantographStatus pantograph_integrate_rk4(const struct PantographSpec *spec,
                                               double b,
                                               uintptr_t n,
                                               double *out_values);

/**
 * Observed RK4 convergence order against the series value at b; infinity
 * when both measured errors sit at rounding level.
 */
enum PantographStatus pantograph_rk4_convergence_order(const struct PantographSpec *spec,
                                                       double b,
                                                       double *out);

/**
 * Runs the successive-approximation solver for the linear problem on an
 * N-interval grid; writes the N+1 node values and the certified remainder.
 */
enum PantographStatus pantograph_djm_solve(const struct PantographSpec *spec,
                                           double b,
                                           uintptr_t n,
                                           double tol,
                                           uintptr_t max_iter,
                                           double *out_values,
                                           double *out_certified_error);

/**
 * Frozen-delay stability search. Lags come from the spec frozen at `x0`.
 * Up to `roots_capacity` roots are written as (re, im) pairs into
 * `out_roots`; `out_root_count` receives the number found (which may
 * exceed the capacity; only the leading ones are written).
 */
enum PantographStatus pantograph_stability(const struct PantographSpec *spec,
                                           double x0,
                                           double re_min,
                                           double re_max,
                                           double im_max,
                                           uintptr_t grid,
                                           enum PantographVerdict *out_verdict,
                                           double *out_max_real_part,
                                           double *out_roots,
                                           uintptr_t roots_capacity,
                                           uintptr_t *out_root_count);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PANTOGRAPH_H */
