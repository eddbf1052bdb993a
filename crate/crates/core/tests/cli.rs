//! End-to-end runs of the `xisub` binary.

use std::path::PathBuf;
use std::process::Command;

fn xisub(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_xisub")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).expect("stdout is a JSON report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("xisub-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn sphere_index_three_for_unit_two_sphere() {
    let (code, out, _) = xisub(&["index", "--m", "2", "--p", "1", "--r", "1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["data"]["closed_form"]["index"], 3);
    assert_eq!(v["data"]["galerkin"]["index"], 3);
    assert_eq!(v["schema"], 1);
}

#[test]
fn index_claim_failure_exits_one() {
    let (code, out, err) = xisub(&["index", "--m", "2", "--p", "1", "--r", "2"]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["pass"], false);
    assert!(err.contains("index_m_plus_1_iff_r2_le_m"));
}

#[test]
fn check_sphere_passes_and_off_center_fails() {
    let (code, out, _) = xisub(&["check", "sphere", "--m", "2", "--r", "1.5"]);
    assert_eq!(code, 0, "{out}");
    let (code, _, _) = xisub(&["check", "off_center_sphere"]);
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(xisub(&["no-such-command"]).0, 2);
    assert_eq!(xisub(&["check", "dodecahedron"]).0, 2);
    assert_eq!(xisub(&["check", "sphere", "--tol", "nonsense=1"]).0, 2);
    assert_eq!(xisub(&["check", "--config", "/nonexistent/x.toml"]).0, 2);
    assert_eq!(xisub(&["--help"]).0, 0);
}

#[test]
fn shrinker_curve_closes_and_writes_csv() {
    let csv = scratch("shrinker.csv");
    let (code, out, _) = xisub(&["curve", "--kind", "shrinker", "--x0", "1,0", "--smax", "8", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["data"]["summary"]["closure"]["closed"], true);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("s,x1,x2,theta,kappa_r,first_integral\n"));
    assert!(table.lines().count() > 100);
}

#[test]
fn negative_numbers_are_accepted() {
    let (code, out, _) = xisub(&["curve", "--kind", "xi", "--C", "-0.3", "--x0", "-0.5,0.2", "--theta0", "-1", "--smax", "5"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn config_file_is_layered_under_flags() {
    let cfg = scratch("run.toml");
    let report = scratch("report.json");
    std::fs::write(
        &cfg,
        format!(
            "reproducible = true\n[example]\nfamily = \"sphere\"\nm = 1\nr = 3.0\n[grid]\nverification_nodes = 16\n[output]\nreport = \"{}\"\n",
            report.display()
        ),
    )
    .unwrap();
    let (code, out, _) = xisub(&["check", "--config", cfg.to_str().unwrap(), "--r", "2"]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v = json(&std::fs::read_to_string(&report).unwrap());
    assert!(v.get("wall_time_s").is_none());
    let name = v["records"][0]["name"].as_str().unwrap();
    assert!(name.contains("r=2"), "{name}");
}

#[test]
fn reproducible_runs_differ_only_in_timestamp() {
    let args = ["variation", "sphere", "--m", "1", "--r", "1.5", "--fields", "2", "--reproducible", "--seed", "7"];
    let (_, a, _) = xisub(&args);
    let (_, b, _) = xisub(&args);
    let strip = |s: &str| {
        let mut v = json(s);
        v["timestamp"] = 0.into();
        v.to_string()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn spectrum_plane_writes_table() {
    let (code, out, _) = xisub(&["spectrum", "plane", "--m", "1", "--degree", "6", "--mode", "scalar-drift"]);
    assert_eq!(code, 0, "{out}");
    assert!(json(&out)["data"].is_object());
}

#[test]
fn catalog_lists_items() {
    let (code, out, _) = xisub(&["catalog"]);
    assert_eq!(code, 0);
    assert!(json(&out)["records"].as_array().unwrap().len() >= 5);
}
