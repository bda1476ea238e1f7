//! Simulated users: awareness profiles and initial beliefs b_0.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::pragmatics::BeliefState;
use crate::world::{PropertyId, PropertySpace, WorldScenario};
use crate::{Error, Result};

/// Mass an anchored belief places on its anchor value.
pub const ANCHOR_MASS: f64 = 0.9;

const BELIEF_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneralAwareness {
    Low,
    High,
}

impl GeneralAwareness {
    /// Half-width of the mean offset and the standard deviation, as a
    /// fraction of the normalized value range.
    fn spread(self) -> f64 {
        match self {
            GeneralAwareness::High => 0.05,
            GeneralAwareness::Low => 0.30,
        }
    }

    fn binary_accuracy(self) -> f64 {
        match self {
            GeneralAwareness::High => 0.9,
            GeneralAwareness::Low => 0.6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneralAwareness::Low => "Low",
            GeneralAwareness::High => "High",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UserProfile {
    pub critical_awareness_prob: f64,
    pub general_awareness: GeneralAwareness,
    /// Whether the user anticipates each scheduled property.
    pub aware_flags: BTreeMap<PropertyId, bool>,
    pub seed: u64,
}

impl UserProfile {
    pub fn is_aware(&self, p: PropertyId) -> Option<bool> {
        self.aware_flags.get(&p).copied()
    }
}

/// Draws one Bernoulli(q) awareness flag per scheduled property, in order.
pub fn sample_profile<R: Rng>(
    rng: &mut R,
    awareness_prob: f64,
    general_awareness: GeneralAwareness,
    scheduled: &[PropertyId],
    seed: u64,
) -> UserProfile {
    let aware_flags = scheduled
        .iter()
        .map(|&p| (p, rng.gen_bool(awareness_prob)))
        .collect();
    UserProfile {
        critical_awareness_prob: awareness_prob,
        general_awareness,
        aware_flags,
        seed,
    }
}

fn anchored(size: usize, anchor: usize) -> Vec<f64> {
    let rest = (1.0 - ANCHOR_MASS) / size as f64;
    let mut v = vec![rest; size];
    v[anchor] += ANCHOR_MASS;
    v
}

fn discretized_gaussian(values: &[f64], mean: f64, sd: f64) -> Vec<f64> {
    let mut w: Vec<f64> = values
        .iter()
        .map(|x| (-(x - mean).powi(2) / (2.0 * sd * sd)).exp())
        .collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// Builds b_0. Scheduled properties are anchored on the critical value they
/// will hold at onset (aware) or on a seeded safe value (unaware); the rest
/// get noise around s_1 whose width depends on general awareness.
pub fn initial_beliefs(
    scenario: &WorldScenario,
    profile: &UserProfile,
    space: &PropertySpace,
) -> Result<BeliefState> {
    let scheduled = scenario.scheduled();
    let flagged: Vec<PropertyId> = profile.aware_flags.keys().copied().collect();
    if flagged != scheduled {
        return Err(Error::validation(
            "profile awareness flags do not match the scenario schedule",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed ^ BELIEF_STREAM);
    let spread = profile.general_awareness.spread();
    let mut vectors = Vec::with_capacity(space.len());
    for id in space.ids() {
        let prop = space.property(id);
        let size = prop.domain_size();
        let v = match (scenario.onset(id), profile.is_aware(id)) {
            (Some(onset), Some(true)) => anchored(size, scenario.value(onset, id)),
            (Some(_), _) => {
                let safe: Vec<usize> = prop.safe_values().collect();
                anchored(size, safe[rng.gen_range(0..safe.len())])
            }
            (None, _) => {
                let truth = scenario.value(1, id);
                if size == 2 {
                    let acc = profile.general_awareness.binary_accuracy();
                    let mut v = vec![1.0 - acc; 2];
                    v[truth] = acc;
                    v
                } else {
                    let mean = prop.values[truth] + rng.gen_range(-spread..=spread);
                    discretized_gaussian(&prop.values, mean, spread)
                }
            }
        };
        vectors.push(v);
    }
    BeliefState::from_vectors(vectors)
}
