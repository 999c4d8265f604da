/* Generated by cbindgen from crates/ffi/src/lib.rs. */

#ifndef RLAB_H
#define RLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum RlabStatus {
  RLAB_STATUS_OK = 0,
  RLAB_STATUS_NULL_POINTER = 1,
  RLAB_STATUS_INVALID_ARGUMENT = 2,
  RLAB_STATUS_CONFIG = 3,
  RLAB_STATUS_NUMERICAL = 4,
  RLAB_STATUS_PANIC = 5,
} RlabStatus;

/**
 * Opaque curve handle.
 */
typedef struct RlabCurve RlabCurve;

/**
 * Opaque quadrature-measure handle.
 */
typedef struct RlabMeasure RlabMeasure;

/**
 * Exact rational `num / den` with `den > 0`.
 */
typedef struct RlabRational {
  int64_t num;
  int64_t den;
} RlabRational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *rlab_last_error(void);

/**
 * Moment curve `(t, t^2/2, ..., t^d/d!)`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum RlabStatus rlab_curve_moment(size_t d, struct RlabCurve **out);

/**
 * Curve from a spec such as `poly([[0,1],[0,0,1/2]])` or `monomial(1,3)`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` writable.
 */
enum RlabStatus rlab_curve_parse(const char *spec, struct RlabCurve **out);

/**
 * # Safety
 * `curve` must come from a curve constructor and not be used afterwards. Null is ignored.
 */
void rlab_curve_free(struct RlabCurve *curve);

/**
 * Ambient dimension, or 0 for a null handle.
 *
 * # Safety
 * `curve` must be null or a live handle.
 */
size_t rlab_curve_dim(const struct RlabCurve *curve);

/**
 * `det(gamma'(t), ..., gamma^(d)(t))`.
 *
 * # Safety
 * `curve` must be a live handle and `out` writable.
 */
enum RlabStatus rlab_curve_torsion(const struct RlabCurve *curve, double t, double *out);

/**
 * Circle (`d = 2`) or two-sphere (`d = 3`) surface measure.
 *
 * # Safety
 * `out` must be writable.
 */
enum RlabStatus rlab_measure_sphere(size_t d, size_t resolution, struct RlabMeasure **out);

/**
 * Alpha-dimensional singular measure in the unit ball.
 *
 * # Safety
 * `out` must be writable.
 */
enum RlabStatus rlab_measure_singular(size_t d,
                                      double alpha,
                                      size_t resolution,
                                      struct RlabMeasure **out);

/**
 * Hyperplane `normal . x = 0` over the cube of half-size `extent` in its chart.
 *
 * # Safety
 * `normal` must point to `d` readable doubles and `out` must be writable.
 */
enum RlabStatus rlab_measure_hyperplane(const double *normal,
                                        size_t d,
                                        double extent,
                                        size_t resolution,
                                        struct RlabMeasure **out);

/**
 * # Safety
 * `measure` must come from a measure constructor and not be used afterwards. Null is ignored.
 */
void rlab_measure_free(struct RlabMeasure *measure);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `measure` must be null or a live handle.
 */
size_t rlab_measure_len(const struct RlabMeasure *measure);

/**
 * Total mass of the measure.
 *
 * # Safety
 * `measure` must be a live handle and `out` writable.
 */
enum RlabStatus rlab_measure_mass(const struct RlabMeasure *measure, double *out);

/**
 * Monte Carlo estimate of `sup mu(B(x, r)) / r^alpha`.
 *
 * # Safety
 * `measure` must be a live handle and `out` writable.
 */
enum RlabStatus rlab_dimension_audit(const struct RlabMeasure *measure,
                                     double alpha,
                                     size_t samples,
                                     uint64_t seed,
                                     double *out);

/**
 * `T_lambda chi_[s,e](x)`; writes the real and imaginary parts.
 *
 * # Safety
 * `x` must point to `x_len` doubles; `out_re` and `out_im` must be writable.
 */
enum RlabStatus rlab_extension_eval(const struct RlabCurve *curve,
                                    double lambda,
                                    double s,
                                    double e,
                                    const double *x,
                                    size_t x_len,
                                    double *out_re,
                                    double *out_im);

/**
 * `|| T_lambda chi_[s,e] ||_{L^q(mu)}`; `q = INFINITY` gives the maximum.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum RlabStatus rlab_extension_lq_norm(const struct RlabCurve *curve,
                                       const struct RlabMeasure *measure,
                                       double lambda,
                                       double s,
                                       double e,
                                       double q,
                                       double *out);

/**
 * Threshold `q_c = (d^2+d)/2` and line coefficient `(d^2+d-2)/2` for the sphere.
 *
 * # Safety
 * Output pointers must be writable.
 */
enum RlabStatus rlab_exponents_sphere(size_t d,
                                      struct RlabRational *q_threshold,
                                      struct RlabRational *line_coef);

/**
 * Index `omega` of the hyperplane with rational normal `num[i] / den[i]`.
 *
 * # Safety
 * `num` and `den` must point to `d` readable integers; `out` must be writable.
 */
enum RlabStatus rlab_hyperplane_omega(const int64_t *num,
                                      const int64_t *den,
                                      size_t d,
                                      uint32_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RLAB_H */
