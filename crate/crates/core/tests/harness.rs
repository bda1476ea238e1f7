use std::collections::BTreeMap;
use std::fs;
use std::process::Command;

use drsa::harness::{
    read_records_csv, replay_record, run_batch, BatchConfig, TrialRecord, RECORD_HEADER,
};
use drsa::planner::SignalModel;
use drsa::Error;

fn config(dir: &std::path::Path, trials: usize, workers: usize) -> BatchConfig {
    BatchConfig {
        n_trials: trials,
        workers,
        output_dir: dir.to_path_buf(),
        ..BatchConfig::default()
    }
}

#[test]
fn one_trial_yields_four_records_and_all_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = config(tmp.path(), 1, 1);
    cfg.traces = true;
    let records = run_batch(&cfg).unwrap();
    assert_eq!(records.len(), 4);
    let variants: Vec<&str> = records.iter().map(|r| r.variant.as_str()).collect();
    assert_eq!(
        variants,
        ["d-RSA", "d-RSA+Priors", "d-RSA+Planning", "Full"]
    );
    for name in [
        "records.csv",
        "records.json",
        "batch_config.json",
        "fig2a.csv",
        "fig2b.csv",
        "fig3a.csv",
        "fig3b.csv",
        "traces/trial_00000.json",
    ] {
        assert!(tmp.path().join(name).is_file(), "{name}");
    }
    let csv = fs::read_to_string(tmp.path().join("records.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), RECORD_HEADER.join(","));
    let trace: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(tmp.path().join("traces/trial_00000.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(
        trace["variants"]["Full"]["sequence"]
            .as_array()
            .unwrap()
            .len(),
        7
    );
}

#[test]
fn records_are_byte_identical_across_runs_and_worker_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    run_batch(&config(a.path(), 6, 1)).unwrap();
    run_batch(&config(b.path(), 6, 1)).unwrap();
    run_batch(&config(c.path(), 6, 3)).unwrap();
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("records.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&a), read(&c));
}

#[test]
fn csv_round_trips_through_the_reader() {
    let tmp = tempfile::tempdir().unwrap();
    let records = run_batch(&config(tmp.path(), 3, 1)).unwrap();
    let back = read_records_csv(&tmp.path().join("records.csv")).unwrap();
    assert_eq!(back, records);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let err = run_batch(&config(&blocker.join("out"), 1, 1)).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err:?}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn figure_means_match_independent_aggregation() {
    let tmp = tempfile::tempdir().unwrap();
    let records = run_batch(&config(tmp.path(), 24, 1)).unwrap();
    let mut groups: BTreeMap<(usize, String), Vec<f64>> = BTreeMap::new();
    for r in &records {
        groups
            .entry((r.critical_count, r.variant.clone()))
            .or_default()
            .push(r.cumulative_reward);
    }
    let mut reader = csv::Reader::from_path(tmp.path().join("fig2a.csv")).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["criticalCount", "variant", "mean", "stderr", "n"]
    );
    let mut rows = 0;
    for row in reader.records() {
        let row = row.unwrap();
        let key = (row[0].parse::<usize>().unwrap(), row[1].to_string());
        let ys = &groups[&key];
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (ys.len() - 1) as f64;
        assert!((row[2].parse::<f64>().unwrap() - mean).abs() < 1e-9);
        assert!((row[3].parse::<f64>().unwrap() - (var / ys.len() as f64).sqrt()).abs() < 1e-9);
        assert_eq!(row[4].parse::<usize>().unwrap(), ys.len());
        rows += 1;
    }
    assert_eq!(rows, groups.len());
    assert_eq!(rows, 12);
}

#[test]
fn stored_sequences_replay_to_the_recorded_reward() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), 4, 1);
    let records = run_batch(&cfg).unwrap();
    let model = SignalModel::drone_world(1.0).unwrap();
    for r in &records {
        let (_, _, replay) = replay_record(&model, r, cfg.horizon, &cfg.modes).unwrap();
        assert_eq!(replay.cumulative_reward, r.cumulative_reward);
    }
}

#[test]
fn entropy_and_specificity_agree_with_sequence_labels() {
    let tmp = tempfile::tempdir().unwrap();
    let records: Vec<TrialRecord> = run_batch(&config(tmp.path(), 12, 1)).unwrap();
    for r in &records {
        let mut counts = BTreeMap::<&str, f64>::new();
        for label in r.sequence_labels().into_iter().filter(|l| *l != "(X)") {
            let kind = match label {
                "..." => "silence",
                "Beep" => "beep",
                l if l.starts_with('D') && l.contains(' ') => "two",
                _ => "single",
            };
            *counts.entry(kind).or_default() += 1.0;
        }
        let total: f64 = counts.values().sum();
        let h: f64 = counts
            .values()
            .map(|c| -(c / total) * (c / total).log2())
            .sum();
        assert!((r.message_entropy - h).abs() < 1e-12, "{}", r.sequence);
        let get = |k: &str| counts.get(k).copied().unwrap_or(0.0);
        let spec = (get("two") + 1.0) / (get("single") + get("beep") + 1.0);
        assert!((r.specificity_ratio - spec).abs() < 1e-12);
    }
}

fn drsa() -> Command {
    Command::new(env!("CARGO_BIN_EXE_drsa"))
}

#[test]
fn cli_run_figures_and_inspect() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let status = drsa()
        .args([
            "run",
            "--trials",
            "2",
            "--workers",
            "1",
            "--seed",
            "5",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let cfg: BatchConfig =
        serde_json::from_str(&fs::read_to_string(out.join("batch_config.json")).unwrap()).unwrap();
    assert_eq!((cfg.master_seed, cfg.n_trials), (5, 2));

    let figs = tmp.path().join("figs");
    let status = drsa()
        .args(["figures", "--records"])
        .arg(out.join("records.csv"))
        .arg("--out")
        .arg(&figs)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(
        fs::read(figs.join("fig2b.csv")).unwrap(),
        fs::read(out.join("fig2b.csv")).unwrap()
    );

    let output = drsa()
        .args(["inspect", "--trial", "1", "--records"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    for v in ["d-RSA ", "d-RSA+Priors", "d-RSA+Planning", "Full"] {
        assert!(text.contains(v), "{text}");
    }
    assert!(text.contains("rewards:"));
}

#[test]
fn cli_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"nTrials": 0}"#).unwrap();
    let status = drsa()
        .args(["run", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(tmp.path().join("o"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    let status = drsa()
        .args(["figures", "--records"])
        .arg(tmp.path().join("missing.csv"))
        .arg("--out")
        .arg(tmp.path().join("f"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    let status = drsa()
        .args(["run", "--config"])
        .arg(tmp.path().join("nope.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
