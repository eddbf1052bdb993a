use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use xisub_ffi::*;

fn cstr<'a>(p: *const c_char) -> &'a str {
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap()
}

fn run(args: &[&str]) -> (XisubStatus, *mut XisubReport) {
    let owned: Vec<CString> = args.iter().map(|a| CString::new(*a).unwrap()).collect();
    let ptrs: Vec<*const c_char> = owned.iter().map(|c| c.as_ptr()).collect();
    let mut out = ptr::null_mut();
    let st = unsafe { xisub_run(ptrs.len() as i32, ptrs.as_ptr(), &mut out) };
    (st, out)
}

#[test]
fn sphere_index_through_the_abi() {
    let mut out = XisubSphereIndex::default();
    assert_eq!(unsafe { xisub_sphere_index(2, 1, 1.0, 1, &mut out) }, XisubStatus::Ok);
    assert_eq!(out.index, 3);
    assert_eq!((out.minimal, out.stated_condition, out.claim_holds), (1, 1, 1));
    // r² = 4 > m but index stays m + 1 for p = 1
    assert_eq!(unsafe { xisub_sphere_index(2, 1, 2.0, 1, &mut out) }, XisubStatus::Ok);
    assert_eq!(out.claim_holds, 0);
    assert_eq!(unsafe { xisub_sphere_index(2, 1, 1.0, 1, ptr::null_mut()) }, XisubStatus::NullPointer);
}

#[test]
fn run_returns_report_handles() {
    let (st, rep) = run(&["check", "sphere", "--m", "1", "--r", "2"]);
    assert_eq!(st, XisubStatus::Ok);
    unsafe {
        assert_eq!(xisub_report_pass(rep), 1);
        assert_eq!(xisub_report_exit_code(rep), 0);
        let v: serde_json::Value = serde_json::from_str(cstr(xisub_report_json(rep))).unwrap();
        assert_eq!(v["schema"], 1);
        assert!(xisub_report_csv(rep).is_null());
        xisub_report_free(rep);
    }
    let (st, rep) = run(&["check", "off_center_sphere"]);
    assert_eq!(st, XisubStatus::Ok);
    unsafe {
        assert_eq!(xisub_report_pass(rep), 0);
        assert_eq!(xisub_report_exit_code(rep), 1);
        xisub_report_free(rep);
    }
}

#[test]
fn usage_errors_set_last_error() {
    let (st, rep) = run(&["index", "--m", "2"]);
    assert_eq!(st, XisubStatus::InvalidArgument);
    assert!(rep.is_null());
    assert!(cstr(xisub_last_error()).contains("--p"));
}

#[test]
fn curves_and_samples() {
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(xisub_shrinker_curve(1.0, 0.0, std::f64::consts::FRAC_PI_2, 7.0, 0.0, &mut c), XisubStatus::Ok);
        let n = xisub_curve_len(c);
        assert!(n > 600);
        let mut s = XisubCurveSample::default();
        for i in [0, n / 2, n - 1] {
            assert_eq!(xisub_curve_sample(c, i, &mut s), XisubStatus::Ok);
            assert!((s.x.hypot(s.y) - 1.0).abs() < 1e-8);
        }
        assert_eq!(xisub_curve_sample(c, n, &mut s), XisubStatus::InvalidArgument);
        assert!(xisub_curve_drift(c) < 1e-8);
        xisub_curve_free(c);

        let mut blown = ptr::null_mut();
        assert_eq!(xisub_xi_curve(7.0, 0.0, 0.3, 1.0, 5.0, 0.0, &mut blown), XisubStatus::BlowUp);
        assert!(blown.is_null());
        xisub_curve_free(ptr::null_mut());
        assert!(xisub_curve_drift(ptr::null()).is_nan());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/xisub.h")).unwrap();
    for f in [
        "xisub_last_error", "xisub_version", "xisub_run", "xisub_report_json", "xisub_report_csv", "xisub_report_pass",
        "xisub_report_exit_code", "xisub_report_free", "xisub_sphere_index", "xisub_xi_curve", "xisub_shrinker_curve",
        "xisub_curve_len", "xisub_curve_sample", "xisub_curve_drift", "xisub_curve_free",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
}

/// Compiles a C client against the header and the static library when a C
/// compiler is on PATH.
#[test]
fn c_client_links_and_runs() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    // tests live in target/<profile>/deps; the static library sits one level up
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap().to_path_buf();
    let lib = profile_dir.join("libxisub_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let out: PathBuf = std::env::temp_dir().join(format!("xisub_c_client_{}", std::process::id()));
    let status = Command::new(cc)
        .arg(manifest.join("tests/c_abi.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C client failed to compile");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "C client exited with {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
