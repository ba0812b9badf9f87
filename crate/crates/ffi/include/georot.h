#ifndef GEOROT_H
#define GEOROT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every call.
 */
typedef enum GeorotStatus {
  GEOROT_STATUS_OK = 0,
  GEOROT_STATUS_NULL_POINTER = 1,
  GEOROT_STATUS_INVALID_ARGUMENT = 2,
  GEOROT_STATUS_PARSE_ERROR = 3,
  GEOROT_STATUS_ZERO_FIELD = 4,
  GEOROT_STATUS_INCOMPATIBLE_GRIDS = 5,
  GEOROT_STATUS_DEGENERATE = 6,
  GEOROT_STATUS_INTERNAL = 7,
} GeorotStatus;

/*
 Opaque vector field.
 */
typedef struct GeorotField GeorotField;

/*
 Opaque detection result.
 */
typedef struct GeorotReport GeorotReport;

/*
 Aggregate of a benchmark run.
 */
typedef struct GeorotTrialStats {
  double epsilon;
  size_t n_trials;
  double average_error;
  double max_error;
  double average_iterations;
  size_t n_nonconverged;
} GeorotTrialStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null after a
 successful one. Valid until the next call on the same thread.
 */
const char *georot_last_error_message(void);

/*
 Parses a field from a nul-terminated JSON document.

 # Safety
 `json` must be a valid C string and `out` a writable pointer.
 */
enum GeorotStatus georot_field_from_json(const char *json, struct GeorotField **out);

/*
 Linear field `x -> M x` on the box `[low, high)`. `matrix` is row-major.

 # Safety
 `matrix` must point to 9 doubles, `low` and `high` to 3 each.
 */
enum GeorotStatus georot_field_linear(const double *matrix,
                                      const double *low,
                                      const double *high,
                                      struct GeorotField **out);

/*
 Releases a field. Null is ignored.

 # Safety
 `field` must come from this library and not be used afterwards.
 */
void georot_field_free(struct GeorotField *field);

/*
 New field with every value rotated by `angle` in the plane with
 bivector components `plane = [e12, e13, e23]` (normalized internally).

 # Safety
 `field` must be a live handle, `plane` must point to 3 doubles.
 */
enum GeorotStatus georot_field_rotate_outer(const struct GeorotField *field,
                                            const double *plane,
                                            double angle,
                                            struct GeorotField **out);

/*
 L2 norm of a field.

 # Safety
 `field` must be a live handle and `out` writable.
 */
enum GeorotStatus georot_field_l2_norm(const struct GeorotField *field, double *out);

/*
 Correlation `integral reverse(A(x)) B(x) dx` as 8 coefficients in the
 order `1, e1, e2, e3, e12, e13, e23, e123`.

 # Safety
 `a` and `b` must be live handles, `out` must point to 8 doubles.
 */
enum GeorotStatus georot_correlate(const struct GeorotField *a,
                                   const struct GeorotField *b,
                                   double *out);

/*
 Detects the rotation taking `reference` onto `pattern`. A run that does
 not converge still returns `Ok`; check `georot_report_converged`.

 # Safety
 `reference` and `pattern` must be live handles, `out` writable.
 */
enum GeorotStatus georot_detect(const struct GeorotField *reference,
                                const struct GeorotField *pattern,
                                double epsilon,
                                size_t max_iterations,
                                struct GeorotReport **out);

/*
 Detected angle in `[0, pi]`.

 # Safety
 `report` must be a live handle and `out` writable.
 */
enum GeorotStatus georot_report_alpha(const struct GeorotReport *report, double *out);

/*
 Detected plane as `[e12, e13, e23]`.

 # Safety
 `report` must be a live handle, `out` must point to 3 doubles.
 */
enum GeorotStatus georot_report_plane(const struct GeorotReport *report, double *out);

/*
 Number of rounds run.

 # Safety
 `report` must be a live handle and `out` writable.
 */
enum GeorotStatus georot_report_iterations(const struct GeorotReport *report, size_t *out);

/*
 Whether the stopping threshold was reached.

 # Safety
 `report` must be a live handle and `out` writable.
 */
enum GeorotStatus georot_report_converged(const struct GeorotReport *report, bool *out);

/*
 Copy of the corrected pattern as a new field handle.

 # Safety
 `report` must be a live handle and `out` writable.
 */
enum GeorotStatus georot_report_corrected_pattern(const struct GeorotReport *report,
                                                  struct GeorotField **out);

/*
 Releases a report. Null is ignored.

 # Safety
 `report` must come from this library and not be used afterwards.
 */
void georot_report_free(struct GeorotReport *report);

/*
 Runs `n_trials` random linear-field trials at `epsilon`.

 # Safety
 `out` must be writable.
 */
enum GeorotStatus georot_run_trials(size_t n_trials,
                                    double epsilon,
                                    uint64_t seed,
                                    struct GeorotTrialStats *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEOROT_H */
