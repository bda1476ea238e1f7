//! Batch experiment driver: trial grid, four-variant runs, per-trial records
//! and persisted outputs.

pub mod figures;
pub mod metrics;
pub mod stats;

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lexicon::UtteranceSlotSequence;
use crate::planner::MAX_EXHAUSTIVE_HORIZON;
use crate::planner::{evaluate, plan, ModelVariant, PlanResult, SignalModel};
use crate::pragmatics::{BeliefState, PragmaticsConfig};
use crate::user_model::{initial_beliefs, GeneralAwareness};
use crate::world::{generate_scenario, ScenarioConfig, WorldScenario, DEFAULT_HORIZON};
use crate::{Error, Result};

pub use figures::{emit_figure_data, figure_tables, FigureRow, FigureTable};
pub use metrics::{alert_delays, message_entropy, specificity_ratio, AlertDelays};

const SEQUENCE_SEPARATOR: &str = "|";
const FIRST_ONSET_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct BatchConfig {
    pub n_trials: usize,
    pub horizon: usize,
    pub critical_counts: Vec<usize>,
    pub dispersions: Vec<usize>,
    pub awareness_probs: Vec<f64>,
    pub general_awareness: Vec<GeneralAwareness>,
    pub master_seed: u64,
    pub modes: PragmaticsConfig,
    pub output_dir: PathBuf,
    pub workers: usize,
    /// Write one trace JSON per trial.
    pub traces: bool,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            n_trials: 800,
            horizon: DEFAULT_HORIZON,
            critical_counts: vec![2, 3, 4],
            dispersions: vec![0, 1, 2, 3],
            awareness_probs: vec![0.10, 0.25, 0.50, 0.80],
            general_awareness: vec![GeneralAwareness::Low, GeneralAwareness::High],
            master_seed: 20_250_101,
            modes: PragmaticsConfig::default(),
            output_dir: PathBuf::from("results"),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            traces: false,
        }
    }
}

impl BatchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::validation("nTrials must be positive"));
        }
        if self.workers == 0 {
            return Err(Error::validation("workers must be positive"));
        }
        if !(1..=MAX_EXHAUSTIVE_HORIZON).contains(&self.horizon) {
            return Err(Error::validation(format!(
                "horizon {} not in 1..={MAX_EXHAUSTIVE_HORIZON}",
                self.horizon
            )));
        }
        let nonempty = |name: &str, len: usize| {
            if len == 0 {
                Err(Error::validation(format!("{name} is empty")))
            } else {
                Ok(())
            }
        };
        nonempty("criticalCounts", self.critical_counts.len())?;
        nonempty("dispersions", self.dispersions.len())?;
        nonempty("awarenessProbs", self.awareness_probs.len())?;
        nonempty("generalAwareness", self.general_awareness.len())?;
        if let Some(c) = self.critical_counts.iter().find(|c| !(2..=4).contains(*c)) {
            return Err(Error::validation(format!("criticalCount {c} not in 2..=4")));
        }
        if let Some(d) = self.dispersions.iter().find(|d| **d > 3) {
            return Err(Error::validation(format!("dispersion {d} not in 0..=3")));
        }
        if let Some(q) = self
            .awareness_probs
            .iter()
            .find(|q| !(0.0..=1.0).contains(*q))
        {
            return Err(Error::validation(format!(
                "awareness probability {q} invalid"
            )));
        }
        self.modes.validate()
    }

    /// Round-robin (mixed-radix) assignment of grid cells to trials.
    pub fn trial_specs(&self) -> Vec<TrialSpec> {
        let (nc, nd, nq) = (
            self.critical_counts.len(),
            self.dispersions.len(),
            self.awareness_probs.len(),
        );
        (0..self.n_trials)
            .map(|i| {
                let seed = trial_seed(self.master_seed, i as u64);
                let mut onset_rng = ChaCha8Rng::seed_from_u64(seed);
                onset_rng.set_stream(FIRST_ONSET_STREAM);
                let first_onset = 1 + (onset_rng.next_u64() % 3) as usize;
                TrialSpec {
                    trial_id: i,
                    seed,
                    scenario: ScenarioConfig {
                        critical_count: self.critical_counts[i % nc],
                        dispersion: self.dispersions[(i / nc) % nd],
                        first_onset: first_onset.min(self.horizon),
                        horizon: self.horizon,
                        awareness_prob: self.awareness_probs[(i / (nc * nd)) % nq],
                        general_awareness: self.general_awareness
                            [(i / (nc * nd * nq)) % self.general_awareness.len()],
                    },
                }
            })
            .collect()
    }
}

/// Per-trial seed: one draw from the master seed's ChaCha stream `trial`.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub trial_id: usize,
    pub seed: u64,
    pub scenario: ScenarioConfig,
}

impl TrialSpec {
    pub fn build(&self, model: &SignalModel) -> Result<(WorldScenario, BeliefState)> {
        let scenario = generate_scenario(model.space(), &self.scenario, self.seed)?;
        let b0 = initial_beliefs(&scenario, scenario.user_profile(), model.space())?;
        Ok((scenario, b0))
    }
}

/// One row per (trial, variant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialRecord {
    pub trial_id: usize,
    pub seed: u64,
    pub critical_count: usize,
    pub dispersion: usize,
    pub first_onset: usize,
    pub overlap: f64,
    pub q: f64,
    pub general_awareness: GeneralAwareness,
    pub variant: String,
    pub cumulative_reward: f64,
    pub message_entropy: f64,
    pub specificity_ratio: f64,
    pub median_delay_low_awareness: Option<f64>,
    pub median_delay_high_awareness: Option<f64>,
    pub prioritisation_difference: f64,
    /// Slot labels joined by `|`.
    pub sequence: String,
}

pub const RECORD_HEADER: [&str; 16] = [
    "trialId",
    "seed",
    "criticalCount",
    "dispersion",
    "firstOnset",
    "overlap",
    "q",
    "generalAwareness",
    "variant",
    "cumulativeReward",
    "messageEntropy",
    "specificityRatio",
    "medianDelayLowAwareness",
    "medianDelayHighAwareness",
    "prioritisationDifference",
    "sequence",
];

impl TrialRecord {
    pub fn sequence_labels(&self) -> Vec<&str> {
        self.sequence.split(SEQUENCE_SEPARATOR).collect()
    }

    pub fn model_variant(&self) -> Option<ModelVariant> {
        ModelVariant::from_name(&self.variant)
    }

    fn trial_spec(&self, horizon: usize) -> TrialSpec {
        TrialSpec {
            trial_id: self.trial_id,
            seed: self.seed,
            scenario: ScenarioConfig {
                critical_count: self.critical_count,
                dispersion: self.dispersion,
                first_onset: self.first_onset,
                horizon,
                awareness_prob: self.q,
                general_awareness: self.general_awareness,
            },
        }
    }
}

/// Regenerates a record's scenario from its seed and replays its stored
/// sequence under the canonical user dynamics.
pub fn replay_record(
    model: &SignalModel,
    record: &TrialRecord,
    horizon: usize,
    modes: &PragmaticsConfig,
) -> Result<(WorldScenario, BeliefState, PlanResult)> {
    let (scenario, b0) = record.trial_spec(horizon).build(model)?;
    let seq = UtteranceSlotSequence::from_labels(&record.sequence_labels(), model.lexicon())?;
    let result = evaluate(model, &seq, &scenario, &b0, modes)?;
    Ok((scenario, b0, result))
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub records: Vec<TrialRecord>,
    pub plans: Vec<(ModelVariant, PlanResult)>,
}

impl TrialOutcome {
    pub fn plan(&self, variant: ModelVariant) -> &PlanResult {
        &self
            .plans
            .iter()
            .find(|(v, _)| *v == variant)
            .expect("all variants present")
            .1
    }

    pub fn record(&self, variant: ModelVariant) -> &TrialRecord {
        self.records
            .iter()
            .find(|r| r.variant == variant.name())
            .expect("all variants present")
    }
}

/// Runs the four variants on one trial and scores them.
pub fn run_trial(
    model: &SignalModel,
    spec: &TrialSpec,
    modes: &PragmaticsConfig,
) -> Result<TrialOutcome> {
    let (scenario, b0) = spec.build(model)?;
    let overlap = scenario.overlap(model.space())?;
    let lexicon = model.lexicon();
    let mut records = Vec::with_capacity(4);
    let mut plans = Vec::with_capacity(4);
    for variant in ModelVariant::ALL {
        let result = plan(model, variant, &scenario, &b0, modes)?;
        let delays = alert_delays(&result, lexicon, &scenario, &b0, scenario.user_profile());
        records.push(TrialRecord {
            trial_id: spec.trial_id,
            seed: spec.seed,
            critical_count: spec.scenario.critical_count,
            dispersion: spec.scenario.dispersion,
            first_onset: spec.scenario.first_onset,
            overlap,
            q: spec.scenario.awareness_prob,
            general_awareness: spec.scenario.general_awareness,
            variant: variant.name().to_string(),
            cumulative_reward: result.cumulative_reward,
            message_entropy: message_entropy(&result.sequence, lexicon),
            specificity_ratio: specificity_ratio(&result.sequence, lexicon),
            median_delay_low_awareness: delays.median_low,
            median_delay_high_awareness: delays.median_high,
            prioritisation_difference: delays.prioritisation_difference,
            sequence: result.labels(lexicon).join(SEQUENCE_SEPARATOR),
        });
        plans.push((variant, result));
    }
    Ok(TrialOutcome { records, plans })
}

/// Runs every trial on a pool of `config.workers` threads. Output order is
/// trial order regardless of scheduling.
pub fn run_trials(model: &SignalModel, config: &BatchConfig) -> Result<Vec<TrialOutcome>> {
    config.validate()?;
    let specs = config.trial_specs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::validation(format!("worker pool: {e}")))?;
    pool.install(|| {
        specs
            .par_iter()
            .map(|spec| run_trial(model, spec, &config.modes))
            .collect()
    })
}

fn trace_json(model: &SignalModel, spec: &TrialSpec, outcome: &TrialOutcome) -> serde_json::Value {
    let variants = outcome
        .plans
        .iter()
        .map(|(v, p)| (v.name().to_string(), p.to_trace_json(model, true)))
        .collect::<serde_json::Map<_, _>>();
    serde_json::json!({
        "trialId": spec.trial_id,
        "seed": spec.seed,
        "scenario": spec.scenario,
        "variants": variants,
    })
}

pub fn write_records_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("records.csv", e))?;
    Ok(())
}

pub fn read_records_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(std::io::BufReader::new(file));
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Validates, checks the output directory is writable, runs every trial and
/// persists `records.csv`, `records.json`, `batch_config.json`, the four
/// figure tables and optional per-trial traces.
pub fn run_batch(config: &BatchConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join("records.csv");
    let csv_file = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;

    let model = SignalModel::drone_world(config.modes.rationality)?;
    let outcomes = run_trials(&model, config)?;
    let records: Vec<TrialRecord> = outcomes.iter().flat_map(|o| o.records.clone()).collect();

    write_records_csv(&records, std::io::BufWriter::new(csv_file))?;
    write_file(
        &dir.join("records.json"),
        &serde_json::to_string_pretty(&records)?,
    )?;
    write_file(
        &dir.join("batch_config.json"),
        &serde_json::to_string_pretty(config)?,
    )?;
    emit_figure_data(&records, dir)?;
    if config.traces {
        let trace_dir = dir.join("traces");
        fs::create_dir_all(&trace_dir).map_err(|e| Error::io(&trace_dir, e))?;
        for (spec, outcome) in config.trial_specs().iter().zip(&outcomes) {
            let path = trace_dir.join(format!("trial_{:05}.json", spec.trial_id));
            write_file(
                &path,
                &serde_json::to_string_pretty(&trace_json(&model, spec, outcome))?,
            )?;
        }
    }
    Ok(records)
}
