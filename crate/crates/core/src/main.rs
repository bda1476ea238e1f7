use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use drsa::harness::{
    emit_figure_data, read_records_csv, replay_record, run_batch, BatchConfig, TrialRecord,
};
use drsa::planner::SignalModel;
use drsa::{Error, Result};

#[derive(Parser)]
#[command(name = "drsa", about = "Pragmatic alert planning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of trials and write records, figure tables and traces.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        /// Write per-trial trace JSON under <out>/traces.
        #[arg(long)]
        traces: bool,
    },
    /// Rebuild the figure tables from a records CSV.
    Figures {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print sequences and per-step rewards for one trial.
    Inspect {
        #[arg(long)]
        trial: usize,
        /// Output directory of a previous `run`.
        #[arg(long)]
        records: PathBuf,
    },
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn run(
    config: Option<PathBuf>,
    seed: Option<u64>,
    trials: Option<usize>,
    out: Option<PathBuf>,
    workers: Option<usize>,
    traces: bool,
) -> Result<()> {
    let mut cfg = match config {
        Some(path) => serde_json::from_str::<BatchConfig>(&read_to_string(&path)?)?,
        None => BatchConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.master_seed = seed;
    }
    if let Some(n) = trials {
        cfg.n_trials = n;
    }
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    if let Some(w) = workers {
        cfg.workers = w;
    }
    cfg.traces |= traces;
    let start = std::time::Instant::now();
    let records = run_batch(&cfg)?;
    println!(
        "{} records from {} trials in {:.1}s -> {}",
        records.len(),
        cfg.n_trials,
        start.elapsed().as_secs_f64(),
        cfg.output_dir.display()
    );
    Ok(())
}

fn figures(records: &Path, out: &Path) -> Result<()> {
    let records = read_records_csv(records)?;
    for table in emit_figure_data(&records, out)? {
        println!("{}: {} rows", table.name, table.rows.len());
    }
    Ok(())
}

fn inspect(trial: usize, dir: &Path) -> Result<()> {
    let records: Vec<TrialRecord> =
        serde_json::from_str(&read_to_string(&dir.join("records.json"))?)?;
    let cfg_path = dir.join("batch_config.json");
    let cfg = if cfg_path.exists() {
        serde_json::from_str::<BatchConfig>(&read_to_string(&cfg_path)?)?
    } else {
        BatchConfig::default()
    };
    let rows: Vec<&TrialRecord> = records.iter().filter(|r| r.trial_id == trial).collect();
    if rows.is_empty() {
        return Err(Error::Validation(format!("no records for trial {trial}")));
    }
    let model = SignalModel::drone_world(cfg.modes.rationality)?;
    let (scenario, _, _) = replay_record(&model, rows[0], cfg.horizon, &cfg.modes)?;
    let head = rows[0];
    println!(
        "trial {} seed {} criticalCount {} dispersion {} firstOnset {} q {} awareness {}",
        head.trial_id,
        head.seed,
        head.critical_count,
        head.dispersion,
        head.first_onset,
        head.q,
        head.general_awareness.name()
    );
    for (p, onset) in scenario.schedule() {
        let aware = scenario.user_profile().is_aware(p).unwrap_or(false);
        println!(
            "  {} onset {}{}",
            model.space().label(p),
            onset,
            if aware { "" } else { " (unaware)" }
        );
    }
    for r in rows {
        let (_, _, result) = replay_record(&model, r, cfg.horizon, &cfg.modes)?;
        let rewards: Vec<String> = result
            .per_step_reward
            .iter()
            .map(|x| format!("{x:.3}"))
            .collect();
        println!("{:<15} total {:>7.3}", r.variant, result.cumulative_reward);
        println!("  sequence: [{}]", r.sequence_labels().join(", "));
        println!("  rewards:  [{}]", rewards.join(", "));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            seed,
            trials,
            out,
            workers,
            traces,
        } => run(config, seed, trials, out, workers, traces),
        Command::Figures { records, out } => figures(&records, &out),
        Command::Inspect { trial, records } => inspect(trial, &records),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
