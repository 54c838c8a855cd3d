//! End-to-end tests of the installed binary: exit codes, text and JSON
//! output shapes, determinism, and the simulate → eval pipeline.

use belldisc::expdata::{born_probabilities, write_histogram, write_manifest, SettingHistogram};
use belldisc::pauli::parse_axes;
use belldisc::{canonical_state, State};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::process::{Command, Output};

fn belldisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_belldisc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn help_and_version_exit_zero() {
    let help = belldisc(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("belldisc"));
    assert_eq!(belldisc(&["--version"]).status.code(), Some(0));
    for sub in ["state", "tensor", "op", "table", "simulate", "eval"] {
        assert_eq!(belldisc(&[sub, "--help"]).status.code(), Some(0), "{sub} --help");
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(belldisc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(belldisc(&["state", "nope"]).status.code(), Some(1));
    assert_eq!(belldisc(&["op", "nope"]).status.code(), Some(1));
    assert_eq!(belldisc(&["table", "bogus"]).status.code(), Some(1));
}

#[test]
fn state_lists_the_nonzero_amplitudes() {
    let out = belldisc(&["--json", "state", "psi4"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["n"], 4);
    assert_eq!(v["amplitudes"].as_array().unwrap().len(), 6);

    let text = stdout(&belldisc(&["state", "ghz"]));
    assert_eq!(text.lines().count(), 3); // header + |0000> + |1111>
}

#[test]
fn tensor_reports_forty_entries_with_twenty_one_full_weight() {
    let out = belldisc(&["--json", "tensor", "psi4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 41); // 40 entries + summary
    let summary: serde_json::Value = serde_json::from_str(lines[40]).unwrap();
    assert_eq!(summary["total"], 40);
    assert_eq!(summary["full_weight"], 21);
}

#[test]
fn op_reports_spectrum_and_classical_bound() {
    let out = belldisc(&["--json", "op", "bell-d42", "--eig", "--lhv"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 8);
    assert!((v["lambda_max"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["lhv_exact"], "2/3");
    assert!((v["violation_ratio"].as_f64().unwrap() - 1.5).abs() < 1e-9);
}

#[derive(Serialize, Deserialize)]
struct RowShape {
    class: String,
    transform: String,
    value: f64,
    reference: f64,
    delta: f64,
    restarts: usize,
    seed: u64,
}

#[test]
fn table_json_is_deterministic_and_round_trips() {
    let args = ["--json", "table", "iii-d", "--restarts", "8", "--seed", "5"];
    let first = belldisc(&args);
    assert_eq!(first.status.code(), Some(0));
    let second = belldisc(&args);
    assert_eq!(stdout(&first), stdout(&second));

    let text = stdout(&first);
    assert_eq!(text.lines().count(), 7);
    for line in text.lines() {
        let row: RowShape = serde_json::from_str(line).unwrap();
        assert_eq!(serde_json::to_string(&row).unwrap().as_str(), line);
    }
}

#[test]
fn simulate_then_eval_reproduces_the_mixture_value() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("runs");
    let out = belldisc(&[
        "simulate",
        "d42",
        "--visibility",
        "0.9",
        "--settings",
        "bell-d42",
        "--events",
        "2000",
        "--seed",
        "7",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let manifest = out_dir.join("manifest.txt");
    assert!(manifest.exists());
    assert_eq!(std::fs::read_dir(&out_dir).unwrap().count(), 9); // 8 histograms + manifest

    let eval = belldisc(&["--json", "eval", "--op", "bell-d42", "--data", manifest.to_str().unwrap()]);
    assert_eq!(eval.status.code(), Some(0));
    let text = stdout(&eval);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9); // 8 per-setting rows + estimate
    for line in &lines[..8] {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["events"], 2000);
    }
    let est: serde_json::Value = serde_json::from_str(lines[8]).unwrap();
    let value = est["value"].as_f64().unwrap();
    let stderr = est["stderr"].as_f64().unwrap();
    assert!(stderr > 0.0 && stderr < 0.05);
    assert!((value - 0.9).abs() < 4.0 * stderr, "value {value} stderr {stderr}");

    // an operator with a term none of these settings measures
    let missing = belldisc(&["eval", "--op", "bell-psi4", "--data", manifest.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let run = belldisc(&[
            "simulate", "ghz", "--settings", "zzzz,xxxx", "--events", "500", "--seed", "3",
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(run.status.code(), Some(0));
    }
    for file in ["zzzz.json", "xxxx.json", "manifest.txt"] {
        assert_eq!(
            std::fs::read(a.join(file)).unwrap(),
            std::fs::read(b.join(file)).unwrap(),
            "{file} differs between identical runs"
        );
    }
}

#[test]
fn identity_in_a_setting_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = belldisc(&[
        "simulate", "ghz", "--settings", "zz0z", "--events", "10", "--seed", "1",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_requires_exactly_one_quantity() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.txt");
    std::fs::write(&manifest, "").unwrap();
    let both = belldisc(&[
        "eval", "--op", "bell-d42", "--fidelity", "psi4", "--data", manifest.to_str().unwrap(),
    ]);
    assert_eq!(both.status.code(), Some(1)); // clap conflict
    let neither = belldisc(&["eval", "--data", manifest.to_str().unwrap()]);
    assert_eq!(neither.status.code(), Some(1));
}

/// Exact Born-weight counts for one setting (probabilities × events).
fn exact_histogram(state: &State, setting: &str, events: u64, dir: &Path) -> String {
    let axes = parse_axes(setting).unwrap();
    let rho = state.density();
    let probs = born_probabilities(&rho, &axes).unwrap();
    let counts: Vec<u64> = probs.iter().map(|p| (p * events as f64).round() as u64).collect();
    assert_eq!(counts.iter().sum::<u64>(), events, "{setting}: events must split exactly");
    let h = SettingHistogram::new(4, axes, counts).unwrap();
    let file = format!("{setting}.json");
    write_histogram(&dir.join(&file), &h).unwrap();
    file
}

#[test]
fn fidelity_of_exact_target_data_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let psi4: State = canonical_state("psi4", 4).unwrap();
    // the 21 full-weight relevant settings of psi4, as resolve_settings picks them
    let list = belldisc(&["--json", "tensor", "psi4"]);
    let text = stdout(&list);
    let mut files = Vec::new();
    for line in text.lines().take(40) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let axes = v["axes"].as_str().unwrap();
        if !axes.contains('0') {
            files.push(exact_histogram(&psi4, axes, 28800, dir.path()));
        }
    }
    assert_eq!(files.len(), 21);
    let manifest = dir.path().join("manifest.txt");
    write_manifest(&manifest, &files).unwrap();

    let eval = belldisc(&["--json", "eval", "--fidelity", "psi4", "--data", manifest.to_str().unwrap()]);
    assert_eq!(eval.status.code(), Some(0));
    let text = stdout(&eval);
    let est: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert!((est["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    // counts are a finite sample in the error model even when they sit exactly
    // on the Born weights, so the reported uncertainty stays positive
    assert!(est["stderr"].as_f64().unwrap() > 0.0);

    // every emitted line re-serializes byte-identically
    #[derive(Serialize, Deserialize)]
    struct EvalRow {
        setting: String,
        events: u64,
        correlation: f64,
        stderr: f64,
    }
    #[derive(Serialize, Deserialize)]
    struct EstimateShape {
        value: f64,
        stderr: f64,
        settings_used: Vec<String>,
    }
    let lines: Vec<&str> = text.lines().collect();
    for line in &lines[..lines.len() - 1] {
        let row: EvalRow = serde_json::from_str(line).unwrap();
        assert_eq!(&serde_json::to_string(&row).unwrap(), line);
    }
    let last: EstimateShape = serde_json::from_str(lines[lines.len() - 1]).unwrap();
    assert_eq!(&serde_json::to_string(&last).unwrap(), lines[lines.len() - 1]);
}
