//! Black-box tests of the command-line binary: exit codes, artifacts on disk,
//! determinism, and the one-line verdict output.

use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bladesonar"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary launches")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Pull the number following `"slope": ` out of the verdict line.
fn slope_of(stdout: &str) -> f64 {
    let rest = stdout.split("\"slope\": ").nth(1).expect("slope field");
    rest.split(',').next().unwrap().trim().parse().expect("slope parses")
}

#[test]
fn help_prints_usage_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    for sub in ["simulate", "rd", "isar", "fingerprint", "diagnose"] {
        assert!(text.contains(sub), "help does not mention {sub}");
    }
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_deterministic_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let first = run(tmp.path(), &["--out", "a", "simulate"]);
    assert_eq!(first.status.code(), Some(0), "stderr: {}", stderr_of(&first));
    let second = run(tmp.path(), &["--out", "b", "simulate"]);
    assert_eq!(second.status.code(), Some(0));

    let wav_a = std::fs::read(tmp.path().join("a.wav")).expect("a.wav exists");
    let wav_b = std::fs::read(tmp.path().join("b.wav")).expect("b.wav exists");
    assert_eq!(wav_a, wav_b, "repeated runs differ");

    let csv_a = std::fs::read_to_string(tmp.path().join("a_events.csv")).expect("events table");
    let csv_b = std::fs::read_to_string(tmp.path().join("b_events.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    assert!(csv_a.starts_with("pulse,"), "unexpected header: {}", &csv_a[..40]);
    assert!(csv_a.lines().count() > 100, "suspiciously few events");
}

#[test]
fn range_doppler_renders_map_files() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["--out", "cap", "simulate"]).status.code(), Some(0));
    let out = run(tmp.path(), &["--out", "map", "rd", "cap.wav"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));

    let pgm = std::fs::read(tmp.path().join("map_rd.pgm")).expect("map_rd.pgm exists");
    assert!(pgm.starts_with(b"P5"), "not a binary PGM");
    assert!(tmp.path().join("map_rd.pdmx").exists());
}

#[test]
fn unknown_config_key_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("bad.cfg"), "bogus = 1\n").unwrap();
    let out = run(tmp.path(), &["--config", "bad.cfg", "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr_of(&out).contains("unknown config key: bogus"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn missing_wall_field_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("bad.cfg"),
        "wall.0.ax = 0\nwall.0.ay = 0\nwall.0.bx = 1\n",
    )
    .unwrap();
    let out = run(tmp.path(), &["--config", "bad.cfg", "simulate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr_of(&out).contains("wall.0.by"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn garbage_capture_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("noise.wav"), b"this is not audio").unwrap();
    let out = run(tmp.path(), &["rd", "noise.wav"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
}

#[test]
fn static_reference_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = run(tmp.path(), &["--out", "still", "simulate", "--rate-hz", "0"]);
    assert_eq!(sim.status.code(), Some(0), "stderr: {}", stderr_of(&sim));
    let out = run(tmp.path(), &["fingerprint", "still.wav", "still.wav"]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr_of(&out));
}

#[test]
fn same_capture_reads_as_same_direction() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["--out", "cap", "simulate"]).status.code(), Some(0));
    let out = run(tmp.path(), &["--out", "fp", "fingerprint", "cap.wav", "cap.wav"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));

    let text = stdout_of(&out);
    assert!(text.contains("\"verdict\": \"same_direction\""), "stdout: {text}");
    let slope = slope_of(&text);
    assert!((slope - 1.0).abs() <= 0.02, "self slope {slope}");
    assert!(tmp.path().join("fp_fingerprint.csv").exists());
    assert!(tmp.path().join("fp_distance.pgm").exists());
}

#[test]
fn image_ambiguity_flag_reports_score() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["--out", "cap", "simulate"]).status.code(), Some(0));
    let out = run(
        tmp.path(),
        &[
            "--out", "img", "isar", "cap.wav", "--rate", "0.5", "--rows", "750", "--pixels",
            "101", "--ambiguity",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));

    let text = stdout_of(&out);
    let rest = text.split("\"ambiguity_correlation\": ").nth(1).expect("score field");
    let score: f64 = rest.split('}').next().unwrap().trim().parse().expect("score parses");
    assert!(score >= 0.95, "ambiguity correlation {score}");
    assert!(tmp.path().join("img_isar.pgm").exists());
    assert!(tmp.path().join("img_isar.pdmx").exists());
}

#[test]
fn diagnose_reports_quality_scores() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["--out", "cap", "simulate"]).status.code(), Some(0));
    let out = run(tmp.path(), &["diagnose", "cap.wav"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("\"repeatability\""), "stdout: {text}");
    assert!(text.contains("\"injectivity_margin\""), "stdout: {text}");
}
