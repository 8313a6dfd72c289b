//! Black-box tests of the installed binary: exit codes, determinism, and
//! report round-tripping, all through real files and real process spawns.

use std::path::Path;
use std::process::{Command, Output};

use hullsketch_cli::report::render_report;
use hullsketch_cli::RunReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hullsketch"))
}

fn run_args(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary spawns")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.display().to_string()
}

#[test]
fn happy_run_exits_zero_with_a_report_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "pts.csv", "2.0,0.0\n0.0,3.0\n");
    let out = run_args(&["--mode", "scale-dependent", "--input", &input, "--r", "1"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: RunReport = serde_json::from_slice(&out.stdout).expect("stdout is a report");
    assert_eq!(report.mode, "scale-dependent");
    assert_eq!(report.points, 2);
    assert_eq!(report.dim, 2);
    assert!(report.ellipsoid.is_some());
}

#[test]
fn report_reparses_and_rerenders_to_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "pts.csv",
        "1.25,0.5,0.0\n0.0,2.5,-1.5\n3.0,0.125,0.75\n-0.5,0.25,2.25\n",
    );
    let out = run_args(&[
        "--mode",
        "scale-independent",
        "--input",
        &input,
        "--xi",
        "10",
        "--check-factor",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: RunReport = serde_json::from_slice(&out.stdout).unwrap();
    let rendered = render_report(&report).unwrap();
    assert_eq!(
        out.stdout, rendered,
        "render(parse(stdout)) must reproduce stdout byte for byte"
    );
}

#[test]
fn identical_configs_produce_identical_reports_except_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "pts.jsonl",
        "[0.4, -1.0]\n[2.0, 0.3]\n[-1.5, 2.5]\n[0.0, -3.25]\n",
    );
    // Same trace path both times so the echoed trace_path matches too; the
    // first trace is snapshotted before the second run overwrites it.
    let trace = dir.path().join("run.trace.jsonl");
    let args = vec![
        "--mode".to_string(),
        "scale-dependent".into(),
        "--input".into(),
        input.clone(),
        "--r".into(),
        "0.25".into(),
        "--seed".into(),
        "42".into(),
        "--check-factor".into(),
        "--reference".into(),
        "ball:4".into(),
        "--deep-verify".into(),
        "--trace".into(),
        trace.display().to_string(),
    ];
    let out_a = bin().args(&args).output().unwrap();
    let trace_a = std::fs::read(&trace).unwrap();
    let out_b = bin().args(&args).output().unwrap();
    let trace_b = std::fs::read(&trace).unwrap();
    assert_eq!(out_a.status.code(), Some(0));
    assert_eq!(out_b.status.code(), Some(0));
    // wall_ms is deliberately the last field, so everything before it must
    // match byte for byte.
    let cut = |bytes: &[u8]| {
        let s = bytes
            .windows(9)
            .position(|w| w == b"\"wall_ms\"")
            .expect("report ends with wall_ms");
        bytes[..s].to_vec()
    };
    assert_eq!(cut(&out_a.stdout), cut(&out_b.stdout));
    // Trace files carry no timing at all: fully identical.
    assert_eq!(trace_a, trace_b);
}

#[test]
fn out_flag_writes_the_report_file_and_keeps_stdout_empty() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "pts.csv", "1.0,0.0\n0.0,1.0\n");
    let report_path = dir.path().join("report.json");
    let out = run_args(&[
        "--mode",
        "scale-dependent",
        "--input",
        &input,
        "--r",
        "0.5",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: RunReport =
        serde_json::from_slice(&std::fs::read(&report_path).unwrap()).unwrap();
    assert_eq!(report.points, 2);
}

#[test]
fn csv_and_jsonl_inputs_agree_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_file(dir.path(), "pts.csv", "1.5,0.25\n-0.75,2.0\n0.5,-1.25\n");
    let jsonl = write_file(
        dir.path(),
        "pts.jsonl",
        "[1.5, 0.25]\n[-0.75, 2.0]\n[0.5, -1.25]\n",
    );
    let a = run_args(&["--mode", "scale-independent", "--input", &csv, "--xi", "5"]);
    let b = run_args(&["--mode", "scale-independent", "--input", &jsonl, "--xi", "5"]);
    let ra: RunReport = serde_json::from_slice(&a.stdout).unwrap();
    let rb: RunReport = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(
        ra.ellipsoid.unwrap().matrix,
        rb.ellipsoid.unwrap().matrix
    );
}

#[test]
fn coreset_mode_reports_the_kept_subset() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "pts.csv",
        "0.1,0.0\n5.0,0.0\n0.0,0.2\n0.0,7.0\n4.9,0.1\n",
    );
    let out = run_args(&[
        "--mode", "coreset", "--input", &input, "--r", "1", "--xi", "8",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: RunReport = serde_json::from_slice(&out.stdout).unwrap();
    let coreset = report.coreset.expect("coreset section");
    assert_eq!(coreset.indices.len(), coreset.size);
    assert_eq!(coreset.points.len(), coreset.size);
    // The two tiny points can never be kept: below the minimum norm.
    assert!(!coreset.indices.contains(&0));
    assert!(!coreset.indices.contains(&2));
    assert!(report.alpha_bound.is_some());
    assert!(report.ellipsoid.is_none());
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_file(dir.path(), "bad.csv", "1.0,2.0\n1.0,oops\n");
    let out = run_args(&["--mode", "scale-dependent", "--input", &bad, "--r", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains(":2:"), "should name line 2: {msg}");

    let ragged = write_file(dir.path(), "ragged.jsonl", "[1,2,3]\n[4,5]\n");
    let out = run_args(&[
        "--mode",
        "scale-dependent",
        "--input",
        &ragged,
        "--r",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let empty = write_file(dir.path(), "empty.csv", "");
    let out = run_args(&["--mode", "scale-dependent", "--input", &empty, "--r", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("nope.csv");
    let out = run_args(&[
        "--mode",
        "scale-dependent",
        "--input",
        missing.to_str().unwrap(),
        "--r",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    // The scale-independent algorithm cannot bootstrap from the zero vector.
    let input = write_file(dir.path(), "zero.csv", "0.0,0.0\n1.0,1.0\n");
    let out = run_args(&[
        "--mode",
        "scale-independent",
        "--input",
        &input,
        "--xi",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "pts.csv", "1.0,0.0\n");
    for args in [
        vec!["--mode", "scale-dependent", "--input", &input],
        vec!["--mode", "coreset", "--input", &input, "--r", "1", "--xi", "2", "--dual"],
        vec![
            "--mode",
            "scale-dependent",
            "--input",
            &input,
            "--r",
            "1",
            "--trace",
            "t.jsonl",
        ],
        vec![
            "--mode",
            "scale-dependent",
            "--input",
            &input,
            "--r",
            "1",
            "--reference",
            "ball:nope",
            "--deep-verify",
        ],
    ] {
        let out = run_args(&args);
        assert_eq!(
            out.status.code(),
            Some(4),
            "args {args:?} gave stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn usage_errors_exit_two_and_help_exits_zero() {
    let out = run_args(&["--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_args(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--mode"));
}

#[test]
fn dual_mode_polar_boundary_stays_inside_the_polar_body() {
    // E ⊇ conv(±points) implies E° ⊆ polar body, i.e. every boundary point
    // y of E° has |⟨xᵢ, y⟩| ≤ 1. Sample the reported polar's boundary
    // through its own factored form.
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "pts.csv",
        "2.0,0.0\n0.0,3.0\n1.0,1.0\n-0.5,2.5\n",
    );
    let out = run_args(&[
        "--mode",
        "scale-dependent",
        "--input",
        &input,
        "--r",
        "0.5",
        "--dual",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: RunReport = serde_json::from_slice(&out.stdout).unwrap();
    let polar = report.ellipsoid.expect("polar ellipsoid");
    let points: Vec<Vec<f64>> = vec![
        vec![2.0, 0.0],
        vec![0.0, 3.0],
        vec![1.0, 1.0],
        vec![-0.5, 2.5],
    ];
    // Boundary points: y = Σ_j v_j·σ_j·u_j for unit u; use the axis
    // endpoints and diagonal mixes.
    let dirs = [
        [1.0, 0.0],
        [0.0, 1.0],
        [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
        [std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2],
    ];
    for u in dirs {
        let mut y = [0.0f64; 2];
        for j in 0..2 {
            for i in 0..2 {
                y[i] += polar.v[i][j] * polar.semi_axes[j] * u[j];
            }
        }
        for x in &points {
            let inner: f64 = x[0] * y[0] + x[1] * y[1];
            assert!(
                inner.abs() <= 1.0 + 1e-8,
                "polar boundary point escapes the polar body: {inner}"
            );
        }
    }
}
