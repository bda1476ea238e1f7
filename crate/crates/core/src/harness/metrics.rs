//! Per-plan outcome metrics: message-type entropy, specificity and alert
//! timing.

use crate::lexicon::{Category, Lexicon, Slot, UtteranceSlotSequence};
use crate::planner::PlanResult;
use crate::pragmatics::BeliefState;
use crate::user_model::UserProfile;
use crate::world::WorldScenario;

/// Delay assigned to a critical property that is never alerted.
pub const MAX_DELAY: f64 = 7.0;

/// Minimum attention an alert must carry to count as addressing a property.
pub const DELAY_ATTENTION_THRESHOLD: f64 = 0.1;

fn category_counts(seq: &UtteranceSlotSequence, lexicon: &Lexicon) -> [usize; 4] {
    let mut counts = [0usize; 4];
    for (_, u) in seq.starts() {
        let idx = match lexicon.utterance(u).category {
            Category::TwoFeature => 0,
            Category::SingleFeature => 1,
            Category::Beep => 2,
            Category::Silence => 3,
        };
        counts[idx] += 1;
    }
    counts
}

/// Shannon entropy in bits of the category mix over non-block slots.
pub fn message_entropy(seq: &UtteranceSlotSequence, lexicon: &Lexicon) -> f64 {
    entropy_of_counts(&category_counts(seq, lexicon))
}

pub(crate) fn entropy_of_counts(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let h: f64 = counts
        .iter()
        .filter(|c| **c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum();
    // -0.0 for single-category sequences
    h.max(0.0)
}

/// (two-feature + 1) / (single-feature + beep + 1). Silence is ignored.
pub fn specificity_ratio(seq: &UtteranceSlotSequence, lexicon: &Lexicon) -> f64 {
    let [two, single, beep, _] = category_counts(seq, lexicon);
    (two as f64 + 1.0) / ((single + beep) as f64 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlertDelays {
    /// Median delay over scheduled properties the user did not anticipate.
    pub median_low: Option<f64>,
    /// Median delay over scheduled properties the user anticipated.
    pub median_high: Option<f64>,
    /// (high − low) / (high + low); 0 when undefined.
    pub prioritisation_difference: f64,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let mid = values.len() / 2;
    Some(if values.len().is_multiple_of(2) {
        (values[mid - 1] + values[mid]) / 2.0
    } else {
        values[mid]
    })
}

/// Delay from a property's onset to the first initiated alert that gives it
/// more than [`DELAY_ATTENTION_THRESHOLD`] attention and strictly raises the
/// belief in its true value. Requires an evaluated plan (belief and
/// attention trajectories present).
pub fn alert_delays(
    plan: &PlanResult,
    lexicon: &Lexicon,
    scenario: &WorldScenario,
    b0: &BeliefState,
    profile: &UserProfile,
) -> AlertDelays {
    let slots = plan.sequence.slots();
    let horizon = slots.len();
    let mut low = Vec::new();
    let mut high = Vec::new();
    for (p, onset) in scenario.schedule() {
        let mut delay = MAX_DELAY;
        for t in onset..=horizon {
            let Slot::Say(u) = slots[t - 1] else { continue };
            if lexicon.utterance(u).category == Category::Silence {
                continue;
            }
            if plan.attention_trajectory[t - 1].get(p) <= DELAY_ATTENTION_THRESHOLD {
                continue;
            }
            let truth = scenario.value(t, p);
            let before = if t == 1 {
                b0.prob(p, truth)
            } else {
                plan.belief_trajectory[t - 2].prob(p, truth)
            };
            if plan.belief_trajectory[t - 1].prob(p, truth) > before {
                delay = (t - onset) as f64;
                break;
            }
        }
        match profile.is_aware(p) {
            Some(true) => high.push(delay),
            _ => low.push(delay),
        }
    }
    let median_low = median(&mut low);
    let median_high = median(&mut high);
    AlertDelays {
        median_low,
        median_high,
        prioritisation_difference: prioritisation_difference(median_low, median_high),
    }
}

pub fn prioritisation_difference(low: Option<f64>, high: Option<f64>) -> f64 {
    match (low, high) {
        (Some(l), Some(h)) if l + h > 0.0 => (h - l) / (h + l),
        _ => 0.0,
    }
}
