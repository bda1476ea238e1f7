//! Figure-ready aggregate tables over trial records.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::stats::{mean, standard_error};
use super::TrialRecord;
use crate::planner::ModelVariant;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureRow {
    pub level: String,
    pub variant: String,
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub name: &'static str,
    pub factor: &'static str,
    pub rows: Vec<FigureRow>,
}

/// Orders factor levels numerically while keeping their printed form.
#[derive(Debug, Clone, PartialEq)]
struct Level(f64, String);

impl Eq for Level {}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Level {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .total_cmp(&other.0)
            .then_with(|| self.1.cmp(&other.1))
    }
}

fn aggregate(
    records: &[TrialRecord],
    name: &'static str,
    factor: &'static str,
    level: impl Fn(&TrialRecord) -> f64,
    outcome: impl Fn(&TrialRecord) -> Option<f64>,
) -> FigureTable {
    let mut groups: BTreeMap<(Level, ModelVariant), Vec<f64>> = BTreeMap::new();
    for r in records {
        let Some(variant) = ModelVariant::from_name(&r.variant) else {
            continue;
        };
        let x = level(r);
        let entry = groups
            .entry((Level(x, x.to_string()), variant))
            .or_default();
        if let Some(y) = outcome(r) {
            entry.push(y);
        }
    }
    let rows = groups
        .into_iter()
        .map(|((Level(_, label), variant), ys)| FigureRow {
            level: label,
            variant: variant.name().to_string(),
            mean: mean(&ys),
            stderr: standard_error(&ys),
            n: ys.len(),
        })
        .collect();
    FigureTable { name, factor, rows }
}

/// Reward by critical count (2a) and dispersion (2b), specificity by
/// awareness probability (3a), and low-awareness delay by critical count (3b).
pub fn figure_tables(records: &[TrialRecord]) -> Result<Vec<FigureTable>> {
    if records.is_empty() {
        return Err(Error::validation("no records to aggregate"));
    }
    Ok(vec![
        aggregate(
            records,
            "fig2a",
            "criticalCount",
            |r| r.critical_count as f64,
            |r| Some(r.cumulative_reward),
        ),
        aggregate(
            records,
            "fig2b",
            "dispersion",
            |r| r.dispersion as f64,
            |r| Some(r.cumulative_reward),
        ),
        aggregate(
            records,
            "fig3a",
            "q",
            |r| r.q,
            |r| Some(r.specificity_ratio),
        ),
        aggregate(
            records,
            "fig3b",
            "criticalCount",
            |r| r.critical_count as f64,
            |r| r.median_delay_low_awareness,
        ),
    ])
}

pub fn write_table(table: &FigureTable, dir: &Path) -> Result<()> {
    let path = dir.join(format!("{}.csv", table.name));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record([table.factor, "variant", "mean", "stderr", "n"])?;
    for row in &table.rows {
        w.write_record([
            row.level.clone(),
            row.variant.clone(),
            row.mean.to_string(),
            row.stderr.to_string(),
            row.n.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(())
}

/// Writes `fig2a.csv` .. `fig3b.csv` into `dir`.
pub fn emit_figure_data(records: &[TrialRecord], dir: &Path) -> Result<Vec<FigureTable>> {
    let tables = figure_tables(records)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for table in &tables {
        write_table(table, dir)?;
    }
    Ok(tables)
}
