#ifndef XISUB_H
#define XISUB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of an FFI call. Numerical verdicts live in the report; a failed
 * check still returns `Ok` with `xisub_report_pass` false.
 */
typedef enum {
  XISUB_STATUS_OK = 0,
  XISUB_STATUS_NULL_POINTER = 1,
  XISUB_STATUS_INVALID_UTF8 = 2,
  XISUB_STATUS_INVALID_ARGUMENT = 3,
  /**
   * Trajectory left the blow-up ball.
   */
  XISUB_STATUS_BLOW_UP = 4,
  XISUB_STATUS_COMPUTATION_FAILED = 5,
  XISUB_STATUS_PANIC = 6,
} XisubStatus;

/**
 * An integrated planar curve.
 */
typedef struct XisubCurve XisubCurve;

/**
 * A finished run: JSON report, optional CSV table and exit code.
 */
typedef struct XisubReport XisubReport;

typedef struct {
  size_t index;
  /**
   * 1 when index = m + 1.
   */
  int minimal;
  /**
   * 1 when r² ≤ m.
   */
  int stated_condition;
  /**
   * 1 when the two agree.
   */
  int claim_holds;
} XisubSphereIndex;

typedef struct {
  double s;
  double x;
  double y;
  double theta;
  double kappa_r;
  double first_integral;
} XisubCurveSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent non-`Ok` status on this thread.
 * Valid until the next call on the same thread.
 */
const char *xisub_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *xisub_version(void);

/**
 * Runs a CLI command. `argv` excludes the program name, e.g.
 * `{"index", "--m", "2", "--p", "1", "--r", "1"}`. Usage errors return
 * `InvalidArgument`; otherwise `*out` receives a report handle.
 *
 * # Safety
 * `argv` must point to `argc` valid NUL-terminated strings and `out` must be
 * writable.
 */
XisubStatus xisub_run(int argc, const char *const *argv, XisubReport **out);

/**
 * The report as JSON, owned by the handle.
 *
 * # Safety
 * `report` must be null or a live handle from [`xisub_run`].
 */
const char *xisub_report_json(const XisubReport *report);

/**
 * The CSV table, or null when the command produces none.
 *
 * # Safety
 * As for [`xisub_report_json`].
 */
const char *xisub_report_csv(const XisubReport *report);

/**
 * 1 when every record passed, 0 otherwise (and for null).
 *
 * # Safety
 * As for [`xisub_report_json`].
 */
int xisub_report_pass(const XisubReport *report);

/**
 * The exit code the CLI would return for this run.
 *
 * # Safety
 * As for [`xisub_report_json`].
 */
int xisub_report_exit_code(const XisubReport *report);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void xisub_report_free(XisubReport *report);

/**
 * Closed-form index of S^m(r) ⊂ ℝ^{m+p}; `vp` nonzero drops the parallel
 * normal modes.
 *
 * # Safety
 * `out` must be writable.
 */
XisubStatus xisub_sphere_index(size_t m, size_t p, double r, int vp, XisubSphereIndex *out);

/**
 * Integrates the ξ-curve with κ e^{−|x|²/2} = c from (x0, y0) at heading
 * theta0 up to arc length s_max. `rtol` ≤ 0 selects the default.
 *
 * # Safety
 * `out` must be writable.
 */
XisubStatus xisub_xi_curve(double x0,
                           double y0,
                           double theta0,
                           double c,
                           double s_max,
                           double rtol,
                           XisubCurve **out);

/**
 * Integrates the self-shrinker curve κ_r = −⟨x, N⟩.
 *
 * # Safety
 * `out` must be writable.
 */
XisubStatus xisub_shrinker_curve(double x0,
                                 double y0,
                                 double theta0,
                                 double s_max,
                                 double rtol,
                                 XisubCurve **out);

/**
 * Number of output samples; 0 for null.
 *
 * # Safety
 * `curve` must be null or a live handle.
 */
size_t xisub_curve_len(const XisubCurve *curve);

/**
 * # Safety
 * `curve` must be null or a live handle and `out` writable.
 */
XisubStatus xisub_curve_sample(const XisubCurve *curve, size_t i, XisubCurveSample *out);

/**
 * sup |I(s) − I(0)| of the first integral; NaN for null.
 *
 * # Safety
 * `curve` must be null or a live handle.
 */
double xisub_curve_drift(const XisubCurve *curve);

/**
 * # Safety
 * `curve` must be null or a handle not yet freed.
 */
void xisub_curve_free(XisubCurve *curve);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XISUB_H */
