//! C ABI over `xisub`.
//!
//! Every entry point returns an [`XisubStatus`]. Results come back through
//! out-pointers; heap objects are opaque handles released with the matching
//! `*_free` function. After a non-`Ok` status, [`xisub_last_error`] holds a
//! message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xisub::cli;
use xisub::curves::{integrate_self_shrinker_curve, integrate_xi_curve, Polyline, StepPolicy};
use xisub::error::Error;
use xisub::stability::index::sphere_index;

/// Outcome of an FFI call. Numerical verdicts live in the report; a failed
/// check still returns `Ok` with `xisub_report_pass` false.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XisubStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    /// Trajectory left the blow-up ball.
    BlowUp = 4,
    ComputationFailed = 5,
    Panic = 6,
}

/// A finished run: JSON report, optional CSV table and exit code.
pub struct XisubReport {
    code: c_int,
    pass: bool,
    json: CString,
    csv: Option<CString>,
}

/// An integrated planar curve.
pub struct XisubCurve {
    poly: Polyline,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct XisubCurveSample {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub kappa_r: f64,
    pub first_integral: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct XisubSphereIndex {
    pub index: usize,
    /// 1 when index = m + 1.
    pub minimal: c_int,
    /// 1 when r² ≤ m.
    pub stated_condition: c_int,
    /// 1 when the two agree.
    pub claim_holds: c_int,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn fail(status: XisubStatus, msg: impl Into<String>) -> XisubStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> XisubStatus {
    let status = match e {
        Error::BlowUp { .. } => XisubStatus::BlowUp,
        Error::InvalidParameter(_) | Error::UnsupportedSpec(_) | Error::DegreeTooLarge { .. } => XisubStatus::InvalidArgument,
        _ => XisubStatus::ComputationFailed,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> XisubStatus) -> XisubStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(XisubStatus::Panic, "internal panic"),
    }
}

/// Message for the most recent non-`Ok` status on this thread.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn xisub_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xisub_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Runs a CLI command. `argv` excludes the program name, e.g.
/// `{"index", "--m", "2", "--p", "1", "--r", "1"}`. Usage errors return
/// `InvalidArgument`; otherwise `*out` receives a report handle.
///
/// # Safety
/// `argv` must point to `argc` valid NUL-terminated strings and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn xisub_run(argc: c_int, argv: *const *const c_char, out: *mut *mut XisubReport) -> XisubStatus {
    guard(|| {
        if out.is_null() || (argc > 0 && argv.is_null()) {
            return fail(XisubStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let mut args = vec!["xisub".to_string()];
        for i in 0..argc.max(0) as usize {
            let p = *argv.add(i);
            if p.is_null() {
                return fail(XisubStatus::NullPointer, format!("argv[{i}] is null"));
            }
            match CStr::from_ptr(p).to_str() {
                Ok(s) => args.push(s.to_string()),
                Err(_) => return fail(XisubStatus::InvalidUtf8, format!("argv[{i}] is not UTF-8")),
            }
        }
        let outcome = cli::run(args);
        let Some(report) = outcome.report else {
            return fail(XisubStatus::InvalidArgument, outcome.message.unwrap_or_default());
        };
        let handle = XisubReport {
            code: outcome.code,
            pass: report.pass,
            json: CString::new(report.to_json()).unwrap_or_default(),
            csv: outcome.csv.and_then(|c| CString::new(c).ok()),
        };
        *out = Box::into_raw(Box::new(handle));
        XisubStatus::Ok
    })
}

/// The report as JSON, owned by the handle.
///
/// # Safety
/// `report` must be null or a live handle from [`xisub_run`].
#[no_mangle]
pub unsafe extern "C" fn xisub_report_json(report: *const XisubReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// The CSV table, or null when the command produces none.
///
/// # Safety
/// As for [`xisub_report_json`].
#[no_mangle]
pub unsafe extern "C" fn xisub_report_csv(report: *const XisubReport) -> *const c_char {
    report.as_ref().and_then(|r| r.csv.as_ref()).map_or(ptr::null(), |c| c.as_ptr())
}

/// 1 when every record passed, 0 otherwise (and for null).
///
/// # Safety
/// As for [`xisub_report_json`].
#[no_mangle]
pub unsafe extern "C" fn xisub_report_pass(report: *const XisubReport) -> c_int {
    report.as_ref().map_or(0, |r| c_int::from(r.pass))
}

/// The exit code the CLI would return for this run.
///
/// # Safety
/// As for [`xisub_report_json`].
#[no_mangle]
pub unsafe extern "C" fn xisub_report_exit_code(report: *const XisubReport) -> c_int {
    report.as_ref().map_or(cli::EXIT_USAGE, |r| r.code)
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xisub_report_free(report: *mut XisubReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Closed-form index of S^m(r) ⊂ ℝ^{m+p}; `vp` nonzero drops the parallel
/// normal modes.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xisub_sphere_index(m: usize, p: usize, r: f64, vp: c_int, out: *mut XisubSphereIndex) -> XisubStatus {
    guard(|| {
        if out.is_null() {
            return fail(XisubStatus::NullPointer, "null out pointer");
        }
        match sphere_index(m, p, r, vp != 0) {
            Ok(s) => {
                *out = XisubSphereIndex {
                    index: s.index,
                    minimal: s.minimal.into(),
                    stated_condition: s.stated_condition.into(),
                    claim_holds: s.claim_holds.into(),
                };
                XisubStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

fn policy(rtol: f64) -> StepPolicy {
    let mut p = StepPolicy::default();
    if rtol > 0.0 {
        p.rtol = rtol;
        p.atol = rtol;
    }
    p
}

unsafe fn store_curve(res: xisub::error::Result<Polyline>, out: *mut *mut XisubCurve) -> XisubStatus {
    match res {
        Ok(poly) => {
            *out = Box::into_raw(Box::new(XisubCurve { poly }));
            XisubStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Integrates the ξ-curve with κ e^{−|x|²/2} = c from (x0, y0) at heading
/// theta0 up to arc length s_max. `rtol` ≤ 0 selects the default.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xisub_xi_curve(
    x0: f64,
    y0: f64,
    theta0: f64,
    c: f64,
    s_max: f64,
    rtol: f64,
    out: *mut *mut XisubCurve,
) -> XisubStatus {
    guard(|| {
        if out.is_null() {
            return fail(XisubStatus::NullPointer, "null out pointer");
        }
        *out = ptr::null_mut();
        store_curve(integrate_xi_curve([x0, y0], theta0, c, s_max, &policy(rtol)), out)
    })
}

/// Integrates the self-shrinker curve κ_r = −⟨x, N⟩.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xisub_shrinker_curve(
    x0: f64,
    y0: f64,
    theta0: f64,
    s_max: f64,
    rtol: f64,
    out: *mut *mut XisubCurve,
) -> XisubStatus {
    guard(|| {
        if out.is_null() {
            return fail(XisubStatus::NullPointer, "null out pointer");
        }
        *out = ptr::null_mut();
        store_curve(integrate_self_shrinker_curve([x0, y0], theta0, s_max, &policy(rtol)), out)
    })
}

/// Number of output samples; 0 for null.
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xisub_curve_len(curve: *const XisubCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.poly.samples.len())
}

/// # Safety
/// `curve` must be null or a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn xisub_curve_sample(curve: *const XisubCurve, i: usize, out: *mut XisubCurveSample) -> XisubStatus {
    let (Some(c), false) = (curve.as_ref(), out.is_null()) else {
        return fail(XisubStatus::NullPointer, "null argument");
    };
    let Some(p) = c.poly.samples.get(i) else {
        return fail(XisubStatus::InvalidArgument, format!("sample {i} out of range"));
    };
    *out = XisubCurveSample { s: p.s, x: p.x[0], y: p.x[1], theta: p.theta, kappa_r: p.kappa_r, first_integral: p.first_integral };
    XisubStatus::Ok
}

/// sup |I(s) − I(0)| of the first integral; NaN for null.
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn xisub_curve_drift(curve: *const XisubCurve) -> f64 {
    curve.as_ref().map_or(f64::NAN, |c| c.poly.first_integral_drift())
}

/// # Safety
/// `curve` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xisub_curve_free(curve: *mut XisubCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}
