//! Summary statistics and seeded percentile bootstrap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BOOTSTRAP_RESAMPLES: usize = 2000;

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Standard error of the mean (sample standard deviation / √n); 0 for n < 2.
pub fn standard_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn excludes_zero_above(&self) -> bool {
        self.lower > 0.0
    }

    pub fn excludes_zero_below(&self) -> bool {
        self.upper < 0.0
    }

    pub fn contains_zero(&self) -> bool {
        self.lower <= 0.0 && self.upper >= 0.0
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn interval(estimate: f64, mut draws: Vec<f64>, level: f64) -> Interval {
    draws.sort_by(|a, b| a.total_cmp(b));
    let tail = (1.0 - level) / 2.0;
    Interval {
        estimate,
        lower: percentile(&draws, tail),
        upper: percentile(&draws, 1.0 - tail),
    }
}

fn resample_mean(rng: &mut ChaCha8Rng, values: &[f64]) -> f64 {
    let n = values.len();
    (0..n).map(|_| values[rng.gen_range(0..n)]).sum::<f64>() / n as f64
}

/// Percentile bootstrap CI for the mean of `values` (e.g. paired differences).
pub fn bootstrap_mean(values: &[f64], level: f64, seed: u64) -> Interval {
    assert!(!values.is_empty(), "bootstrap needs data");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| resample_mean(&mut rng, values))
        .collect();
    interval(mean(values), draws, level)
}

/// Percentile bootstrap CI for mean(a) − mean(b), resampling each group
/// independently.
pub fn bootstrap_mean_difference(a: &[f64], b: &[f64], level: f64, seed: u64) -> Interval {
    assert!(!a.is_empty() && !b.is_empty(), "bootstrap needs data");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| resample_mean(&mut rng, a) - resample_mean(&mut rng, b))
        .collect();
    interval(mean(a) - mean(b), draws, level)
}
