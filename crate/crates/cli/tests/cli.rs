//! Command-level behavior of the `wosa` binary: output shapes, exit codes,
//! determinism.

use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wosa_core::explorer::{
    write_sweep_csv, Cluster, PlatformConfig, SweepRecord, SWEEP_CSV_HEADER,
};

fn wosa() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wosa"))
}

fn run(args: &[&str]) -> Output {
    wosa().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

/// Two-channel recording with 4 non-overlapping 1024-sample epochs.
fn write_recording(path: &Path) {
    let mut text = String::from("c0,c1\n");
    for i in 0..4096 {
        let t = i as f64 / 256.0;
        let a = (2.0 * std::f64::consts::PI * 10.0 * t).sin();
        let b = (2.0 * std::f64::consts::PI * 20.0 * t).sin();
        text.push_str(&format!("{a},{b}\n"));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn extract_emits_one_row_per_epoch_and_channel() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    write_recording(&input);

    let out = run(&[
        "extract",
        "--input",
        input.to_str().unwrap(),
        "--sample-rate",
        "256",
        "--epoch-len",
        "1024",
        "--profile",
        "seizure",
        "--level",
        "0",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let stdout = stdout_of(&out);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "epoch,channel,delta,theta,alpha,beta,gamma");
    assert_eq!(lines.len(), 1 + 8, "4 epochs x 2 channels");
    assert!(lines[1].starts_with("0,c0,"));
    assert!(lines[2].starts_with("0,c1,"));
}

#[test]
fn extract_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    write_recording(&input);
    let args = [
        "extract",
        "--input",
        input.to_str().unwrap(),
        "--sample-rate",
        "256",
        "--epoch-len",
        "1024",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn extract_rejects_out_of_range_level() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    write_recording(&input);
    let out = run(&[
        "extract",
        "--input",
        input.to_str().unwrap(),
        "--sample-rate",
        "256",
        "--epoch-len",
        "1024",
        "--level",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extract_rejects_unknown_profile() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    write_recording(&input);
    let out = run(&[
        "extract",
        "--input",
        input.to_str().unwrap(),
        "--sample-rate",
        "256",
        "--epoch-len",
        "1024",
        "--profile",
        "meditation",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extract_reports_parse_position() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    std::fs::write(&input, "c0,c1\n1.0,abc\n").unwrap();
    let out = run(&[
        "extract",
        "--input",
        input.to_str().unwrap(),
        "--sample-rate",
        "256",
        "--epoch-len",
        "1024",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = stderr_of(&out);
    assert!(stderr.contains("row 2"), "stderr: {stderr}");
    assert!(stderr.contains("column 2"), "stderr: {stderr}");
}

#[test]
fn extract_accepts_profile_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    write_recording(&input);
    let profile = dir.path().join("custom.profile");
    std::fs::write(
        &profile,
        "delta,0.5,2\ntheta,2,6\nalpha,6,8\nbeta,8,30\ngamma,30,inf\n",
    )
    .unwrap();
    let out = run(&[
        "extract",
        "--input",
        input.to_str().unwrap(),
        "--sample-rate",
        "256",
        "--epoch-len",
        "1024",
        "--profile",
        profile.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
}

fn record_from(power: f64, perf: f64, acc: f64) -> SweepRecord {
    let platform = PlatformConfig::new(Cluster::Big, 1, 600).unwrap();
    SweepRecord::new(platform, 0, power, perf, acc, 1).unwrap()
}

fn write_sweep(path: &Path, records: &[SweepRecord]) {
    std::fs::write(path, write_sweep_csv(records)).unwrap();
}

#[test]
fn pareto_of_single_row_is_that_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sweep.csv");
    write_sweep(&input, &[record_from(1.0, 10.0, 0.9)]);
    let out = run(&["pareto", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = stdout_of(&out);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], SWEEP_CSV_HEADER);
    assert!(lines[1].starts_with("big,1,600,0,1,10,"));
}

#[test]
fn pareto_keeps_only_the_dominator() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sweep.csv");
    write_sweep(
        &input,
        &[
            record_from(2.0, 10.0, 0.8),
            record_from(1.0, 20.0, 0.9),
            record_from(1.5, 15.0, 0.85),
        ],
    );
    let out = run(&["pareto", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = stdout_of(&out);
    assert_eq!(stdout.lines().count(), 2);
    assert!(stdout.lines().nth(1).unwrap().contains(",20,"));
}

/// Brute-force dominance filter used as an oracle for the CLI output.
fn oracle_front(records: &[SweepRecord]) -> Vec<usize> {
    let dominates = |a: &SweepRecord, b: &SweepRecord| {
        a.power_w() <= b.power_w()
            && a.perf_hb_s() >= b.perf_hb_s()
            && a.accuracy() >= b.accuracy()
            && (a.power_w() < b.power_w()
                || a.perf_hb_s() > b.perf_hb_s()
                || a.accuracy() > b.accuracy())
    };
    (0..records.len())
        .filter(|&i| !records.iter().any(|a| dominates(a, &records[i])))
        .collect()
}

#[test]
fn pareto_matches_brute_force_on_random_file() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let records: Vec<SweepRecord> = (0..500)
        .map(|_| {
            record_from(
                rng.gen_range(0.1..4.0),
                rng.gen_range(1.0..100.0),
                rng.gen_range(0.0..=1.0),
            )
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sweep.csv");
    write_sweep(&input, &records);

    let out = run(&["pareto", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = stdout_of(&out);

    let expected: Vec<String> = oracle_front(&records)
        .into_iter()
        .map(|i| records[i].to_csv_row())
        .collect();
    let got: Vec<String> = stdout.lines().skip(1).map(str::to_string).collect();
    assert_eq!(got, expected);
}

#[test]
fn pareto_rejects_malformed_rows() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sweep.csv");
    std::fs::write(&input, format!("{SWEEP_CSV_HEADER}\nbig,1,600,0,oops,1,1,1\n")).unwrap();
    let out = run(&["pareto", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plotdata_emits_requested_columns_per_group() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sweep.csv");
    let little = PlatformConfig::new(Cluster::Little, 2, 600).unwrap();
    let big = PlatformConfig::new(Cluster::Big, 2, 600).unwrap();
    let records = vec![
        SweepRecord::new(little, 0, 0.2, 10.0, 1.0, 5).unwrap(),
        SweepRecord::new(little, 1, 0.2, 12.0, 0.9, 4).unwrap(),
        SweepRecord::new(big, 0, 0.9, 30.0, 1.0, 5).unwrap(),
    ];
    write_sweep(&input, &records);

    let out = run(&["plotdata", "--input", input.to_str().unwrap(), "--axes", "perf,level"]);
    assert!(out.status.success());
    let stdout = stdout_of(&out);
    let blocks: Vec<&str> = stdout.split("\n\n").collect();
    assert_eq!(blocks.len(), 2, "one block per platform:\n{stdout}");
    for line in stdout.lines().filter(|l| !l.is_empty() && !l.starts_with('#')) {
        assert_eq!(line.split_whitespace().count(), 2, "line {line:?}");
    }

    let out3 = run(&[
        "plotdata",
        "--input",
        input.to_str().unwrap(),
        "--axes",
        "power,perf,accuracy",
    ]);
    let stdout3 = stdout_of(&out3);
    for line in stdout3.lines().filter(|l| !l.is_empty() && !l.starts_with('#')) {
        assert_eq!(line.split_whitespace().count(), 3, "line {line:?}");
    }
}

#[test]
fn plotdata_rejects_unknown_axis() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sweep.csv");
    write_sweep(&input, &[record_from(1.0, 10.0, 0.9)]);
    let out = run(&["plotdata", "--input", input.to_str().unwrap(), "--axes", "perf,zoom"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plotdata_of_empty_sweep_is_empty_success() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sweep.csv");
    std::fs::write(&input, format!("{SWEEP_CSV_HEADER}\n")).unwrap();
    let out = run(&["plotdata", "--input", input.to_str().unwrap(), "--axes", "perf,level"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).is_empty());
}

#[test]
fn sweep_single_mapping_emits_six_rows_with_constant_power() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--synth",
        "--seed",
        "5",
        "--epoch-len",
        "1024",
        "--synth-epochs",
        "8",
        "--clusters",
        "big",
        "--cores",
        "4",
        "--freqs",
        "1400",
        "--duration",
        "0.08",
        "--reps",
        "3",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = std::fs::read_to_string(&output).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    let powers: Vec<&str> = rows.iter().map(|r| r.split(',').nth(4).unwrap()).collect();
    assert!(powers.windows(2).all(|p| p[0] == p[1]), "powers: {powers:?}");
    assert!(output.with_extension("manifest.json").exists());
}

#[test]
fn sweep_starved_of_heartbeats_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("sweep.csv");
    // Heavy per-heartbeat work against a microscopic budget: the first
    // heartbeat already exceeds the window, so only a handful fire.
    let out = run(&[
        "sweep",
        "--synth",
        "--epoch-len",
        "16384",
        "--synth-epochs",
        "2",
        "--clusters",
        "big",
        "--cores",
        "1",
        "--freqs",
        "1400",
        "--levels",
        "0",
        "--duration",
        "0.00001",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("insufficient measurement"));
}

#[test]
fn sweep_without_input_or_synth_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--epoch-len",
        "1024",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_on_unlabeled_input_needs_external_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    write_recording(&input);
    let output = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--input",
        input.to_str().unwrap(),
        "--epoch-len",
        "1024",
        "--clusters",
        "big",
        "--cores",
        "1",
        "--freqs",
        "1400",
        "--duration",
        "0.05",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("label"));
}

#[test]
fn sweep_accepts_power_calibration_file() {
    let dir = tempfile::tempdir().unwrap();
    let anchors = dir.path().join("anchors.csv");
    std::fs::write(
        &anchors,
        "big,4,600,1.1\nbig,4,1400,3.0\nLITTLE,4,600,0.12\nLITTLE,4,1400,0.58\n",
    )
    .unwrap();
    let output = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--synth",
        "--epoch-len",
        "1024",
        "--synth-epochs",
        "8",
        "--clusters",
        "big",
        "--cores",
        "4",
        "--freqs",
        "600",
        "--levels",
        "0",
        "--duration",
        "0.08",
        "--power-calibration",
        anchors.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = std::fs::read_to_string(&output).unwrap();
    let power: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(4)
        .unwrap()
        .parse()
        .unwrap();
    assert!((power - 1.1).abs() < 1e-9, "power {power}");
}

#[test]
fn external_predictions_drive_label_free_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    write_recording(&input);
    let preds = dir.path().join("preds.txt");
    std::fs::write(&preds, "0\n1\n0\n1\n").unwrap();
    let output = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--input",
        input.to_str().unwrap(),
        "--epoch-len",
        "1024",
        "--clusters",
        "big",
        "--cores",
        "1",
        "--freqs",
        "1400",
        "--levels",
        "0,5",
        "--duration",
        "0.08",
        "--external-predictions",
        preds.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = std::fs::read_to_string(&output).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn help_names_all_subcommands() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let stdout = stdout_of(&out);
    for cmd in ["extract", "sweep", "pareto", "plotdata"] {
        assert!(stdout.contains(cmd), "missing {cmd}");
    }
}
