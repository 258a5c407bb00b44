//! End-to-end tests of the `olb` binary: exit-code classification, file
//! formats, and byte-for-byte determinism of the emitted artifacts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn olb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_olb"))
        .args(args)
        .output()
        .expect("spawn olb")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn write_spec(name: &str, json: &str) -> String {
    let path = tmp(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&olb(&["--help"])), 0);
    assert_eq!(code(&olb(&["--version"])), 0);
    assert_eq!(code(&olb(&["beta", "--help"])), 0);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(code(&olb(&["frobnicate"])), 1);
    assert_eq!(code(&olb(&[])), 1);
}

#[test]
fn curve_info_circle() {
    let spec = write_spec("cli_circle.json", r#"{"kind":"circle","radius":1.0}"#);
    let out = olb(&["curve-info", "--spec", &spec]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("ell = 6.2831853071795"), "{text}");
    assert!(text.contains("k_min = 1.0000000000000000e0"), "{text}");
    assert!(text.contains("total_turning = 6.2831853071795"), "{text}");
    let defect_line = text.lines().find(|l| l.starts_with("defect")).unwrap();
    let defect: f64 = defect_line.split(" = ").nth(1).unwrap().parse().unwrap();
    assert!(defect.abs() < 1e-10, "{defect}");
}

#[test]
fn curve_info_missing_file_is_io_error() {
    assert_eq!(
        code(&olb(&["curve-info", "--spec", "/no/such/file.json"])),
        2
    );
}

#[test]
fn curve_info_rejects_malformed_and_nonconvex_specs() {
    // Unknown field.
    let bad = write_spec("cli_bad1.json", r#"{"kind":"circle","radius":1.0,"x":2}"#);
    assert_eq!(code(&olb(&["curve-info", "--spec", &bad])), 2);
    // Structurally valid but not convex: rho = 1 - 15*cos(4θ) dips below 0.
    let flat = write_spec(
        "cli_bad2.json",
        r#"{"kind":"fourier_support","coeffs":[[0,1.0,0.0],[4,1.0,0.0]]}"#,
    );
    assert_eq!(code(&olb(&["curve-info", "--spec", &flat])), 2);
}

#[test]
fn orbit_csv_to_stdout() {
    let spec = write_spec("cli_ellipse.json", r#"{"kind":"ellipse","a":2.0,"b":1.0}"#);
    let out = olb(&[
        "orbit", "--spec", &spec, "--s0", "0.3", "--s1", "1.4", "--steps", "5",
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "step,s0,s1,eps,Px,Py,residual");
    assert_eq!(text.lines().count(), 7); // header + start + 5 steps
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').count(), 7, "{line}");
    }
}

#[test]
fn orbit_from_exterior_point_and_inside_rejection() {
    let spec = write_spec("cli_circle2.json", r#"{"kind":"circle","radius":1.0}"#);
    let out = olb(&[
        "orbit", "--spec", &spec, "--px", "2.0", "--py", "0.0", "--steps", "3",
    ]);
    assert_eq!(code(&out), 0);
    let inside = olb(&[
        "orbit", "--spec", &spec, "--px", "0.2", "--py", "0.1", "--steps", "3",
    ]);
    assert_eq!(code(&inside), 3);
}

#[test]
fn orbit_usage_errors() {
    let spec = write_spec("cli_circle3.json", r#"{"kind":"circle","radius":1.0}"#);
    // Mixing the two start conventions.
    let mixed = olb(&[
        "orbit", "--spec", &spec, "--s0", "0.1", "--px", "2.0", "--steps", "2",
    ]);
    assert_eq!(code(&mixed), 1);
    // Zero steps.
    let zero = olb(&[
        "orbit", "--spec", &spec, "--s0", "0.0", "--s1", "1.0", "--steps", "0",
    ]);
    assert_eq!(code(&zero), 1);
    // Non-positive tolerance.
    let tol = olb(&[
        "orbit",
        "--spec",
        &spec,
        "--s0",
        "0.0",
        "--s1",
        "1.0",
        "--tol-root",
        "-1e-9",
    ]);
    assert_eq!(code(&tol), 1);
}

#[test]
fn orbit_degenerate_pair_is_dynamics_error() {
    let spec = write_spec("cli_circle4.json", r#"{"kind":"circle","radius":1.0}"#);
    // s1 = s0 + half the perimeter: parallel tangents.
    let out = olb(&[
        "orbit",
        "--spec",
        &spec,
        "--s0",
        "0.0",
        "--s1",
        "3.141592653589793",
        "--steps",
        "1",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn orbit_output_is_deterministic() {
    let spec = write_spec(
        "cli_wiggly.json",
        r#"{"kind":"fourier_support","coeffs":[[0,1.0,0.0],[3,0.05,0.0]]}"#,
    );
    let a = olb(&[
        "orbit", "--spec", &spec, "--s0", "0.2", "--s1", "1.3", "--steps", "40",
    ]);
    let b = olb(&[
        "orbit", "--spec", &spec, "--s0", "0.2", "--s1", "1.3", "--steps", "40",
    ]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn beta_writes_json_and_csv() {
    let spec = write_spec("cli_circle5.json", r#"{"kind":"circle","radius":1.0}"#);
    let base = tmp("cli_beta_report");
    let out = olb(&[
        "beta",
        "--spec",
        &spec,
        "--qmin",
        "8",
        "--qmax",
        "64",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("q ladder: 8 16 32 64"), "{text}");
    assert!(text.contains("b1: fitted ="), "{text}");

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(base.with_extension("json")).unwrap())
            .unwrap();
    assert!(json["q"].as_array().unwrap().len() == 4);
    assert!(json["beta"].as_array().unwrap().len() == 4);
    assert!(json["fitted"]["b1"].as_f64().is_some());
    assert!(json["theoretical"]["b3"].as_f64().is_some());
    assert!(json["defect"].as_f64().is_some());

    let csv = std::fs::read_to_string(base.with_extension("csv")).unwrap();
    assert!(csv.starts_with("q,beta,beta_minus_ell_over_q\n"), "{csv}");
    assert_eq!(csv.lines().count(), 5);

    // Determinism of the whole artifact.
    let rerun = olb(&[
        "beta",
        "--spec",
        &spec,
        "--qmin",
        "8",
        "--qmax",
        "64",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert_eq!(out.stdout, rerun.stdout);
    let json2 = std::fs::read_to_string(base.with_extension("json")).unwrap();
    let json1: serde_json::Value = serde_json::from_str(&json2).unwrap();
    assert_eq!(json, json1);
}

#[test]
fn beta_usage_errors() {
    let spec = write_spec("cli_circle6.json", r#"{"kind":"circle","radius":1.0}"#);
    assert_eq!(
        code(&olb(&[
            "beta", "--spec", &spec, "--qmin", "2", "--qmax", "64"
        ])),
        1
    );
    assert_eq!(
        code(&olb(&[
            "beta", "--spec", &spec, "--qmin", "32", "--qmax", "8"
        ])),
        1
    );
}

#[test]
fn beta_narrow_ladder_is_numerical_error() {
    // qmin 8, qmax 16 gives only two rungs: the library refuses to fit.
    let spec = write_spec("cli_circle7.json", r#"{"kind":"circle","radius":1.0}"#);
    assert_eq!(
        code(&olb(&[
            "beta", "--spec", &spec, "--qmin", "8", "--qmax", "16"
        ])),
        2
    );
}

#[test]
fn expansion_check_h_passes() {
    let spec = write_spec(
        "cli_wiggly2.json",
        r#"{"kind":"fourier_support","coeffs":[[0,1.0,0.0],[3,0.05,0.0]]}"#,
    );
    let csv_path = tmp("cli_expansion_h.csv");
    let out = olb(&[
        "expansion-check",
        "--spec",
        &spec,
        "--which",
        "H",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("PASS"), "{text}");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("delta,remainder\n"));
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn expansion_check_fail_exits_four() {
    // The ellipse map is totally integrable: its Lazutkin drift sits at
    // machine noise with no quartic law, so the slope check must FAIL.
    let spec = write_spec("cli_ellipse2.json", r#"{"kind":"ellipse","a":2.0,"b":1.0}"#);
    let out = olb(&["expansion-check", "--spec", &spec, "--which", "lazutkin"]);
    assert_eq!(code(&out), 4, "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn caustic_probe_and_usage() {
    let out_path = tmp("cli_caustic.csv");
    let out = olb(&[
        "caustic",
        "--a",
        "2.0",
        "--b",
        "1.0",
        "--lambda",
        "1.0",
        "--steps",
        "300",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let dev_line = text
        .lines()
        .find(|l| l.starts_with("max_deviation_rel"))
        .unwrap();
    let dev: f64 = dev_line.split(" = ").nth(1).unwrap().parse().unwrap();
    assert!(dev < 1e-8, "{dev}");
    let orth_line = text
        .lines()
        .find(|l| l.starts_with("max_orthogonality_residual"))
        .unwrap();
    let orth: f64 = orth_line.split(" = ").nth(1).unwrap().parse().unwrap();
    assert!(orth < 1e-9, "{orth}");
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("step,Px,Py,deviation\n"));
    assert_eq!(csv.lines().count(), 302); // header + start + 300 steps

    assert_eq!(
        code(&olb(&[
            "caustic", "--a", "2.0", "--b", "1.0", "--lambda", "0.0"
        ])),
        1
    );
    assert_eq!(
        code(&olb(&[
            "caustic", "--a", "1.0", "--b", "2.0", "--lambda", "1.0"
        ])),
        1
    );
    assert_eq!(
        code(&olb(&[
            "caustic", "--a", "2.0", "--b", "1.0", "--lambda", "1.0", "--steps", "0"
        ])),
        1
    );
}

#[test]
fn mather_scan_circle() {
    let spec = write_spec("cli_circle8.json", r#"{"kind":"circle","radius":1.0}"#);
    let out_path = tmp("cli_mather.csv");
    let out = olb(&[
        "mather-scan",
        "--spec",
        &spec,
        "--grid",
        "12",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("criterion satisfied everywhere"), "{text}");
    let max_line = text.lines().find(|l| l.starts_with("max_M")).unwrap();
    let max_m: f64 = max_line.split(" = ").nth(1).unwrap().parse().unwrap();
    assert!(max_m < 0.0, "{max_m}");
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("s0,s1,M\n"));
    assert_eq!(csv.lines().count(), 145); // header + 12*12

    assert_eq!(
        code(&olb(&["mather-scan", "--spec", &spec, "--grid", "1"])),
        1
    );
}
