//! Depth-two RSA listener stack with temporal belief tracking.
//!
//! The literal speaker splits probability evenly over the utterances whose
//! meaning covers a property. The pragmatic listener inverts it against a
//! prior over properties, either uniform or derived from the user's current
//! beliefs. Listener output becomes attention, attention drives the belief
//! update, and reward scores the updated beliefs against the true state.

use serde::{Deserialize, Serialize};

use crate::lexicon::{Category, Lexicon, UtteranceId};
use crate::world::{PropertyId, PropertySpace};
use crate::{Error, Result};

const NORMALIZATION_TOLERANCE: f64 = 1e-9;
const LOGIT_CLAMP: f64 = 1e-6;

/// Per-property distributions over each property's value domain (b_t).
///
/// Stored flat; `offsets[p]..offsets[p + 1]` spans property `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    offsets: Vec<usize>,
    probs: Vec<f64>,
}

impl BeliefState {
    pub fn from_vectors(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(vectors.len() + 1);
        let mut probs = Vec::new();
        offsets.push(0);
        for (i, v) in vectors.into_iter().enumerate() {
            if v.is_empty() {
                return Err(Error::validation(format!(
                    "belief for property {i} is empty"
                )));
            }
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::validation(format!(
                    "belief for property {i} has a negative or non-finite entry"
                )));
            }
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(Error::validation(format!(
                    "belief for property {i} sums to {sum}"
                )));
            }
            probs.extend(v);
            offsets.push(probs.len());
        }
        Ok(Self { offsets, probs })
    }

    /// Uniform beliefs over every domain of `space`.
    pub fn uniform(space: &PropertySpace) -> Self {
        let vectors = space
            .properties()
            .iter()
            .map(|p| vec![1.0 / p.domain_size() as f64; p.domain_size()])
            .collect();
        Self::from_vectors(vectors).expect("uniform beliefs are normalized")
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, p: PropertyId) -> &[f64] {
        &self.probs[self.offsets[p.0]..self.offsets[p.0 + 1]]
    }

    fn get_mut(&mut self, p: PropertyId) -> &mut [f64] {
        &mut self.probs[self.offsets[p.0]..self.offsets[p.0 + 1]]
    }

    pub fn prob(&self, p: PropertyId, value: usize) -> f64 {
        self.probs[self.offsets[p.0] + value]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.offsets
            .windows(2)
            .map(move |w| &self.probs[w[0]..w[1]])
    }

    /// Largest |Σ_v b(p)(v) − 1| over all properties.
    pub fn max_normalization_error(&self) -> f64 {
        self.vectors()
            .map(|v| (v.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_valid(&self) -> bool {
        self.probs.iter().all(|x| x.is_finite() && *x >= 0.0)
            && self.max_normalization_error() <= NORMALIZATION_TOLERANCE
    }

    /// Subjective probability that `p` currently sits in its critical region.
    pub fn critical_mass(&self, space: &PropertySpace, p: PropertyId) -> f64 {
        let prop = space.property(p);
        self.get(p)
            .iter()
            .zip(&prop.critical)
            .filter(|(_, c)| **c)
            .map(|(b, _)| b)
            .sum()
    }

    pub fn to_json_value(&self, space: &PropertySpace) -> serde_json::Value {
        let map = space
            .ids()
            .map(|p| (space.label(p), serde_json::json!(self.get(p))))
            .collect::<serde_json::Map<_, _>>();
        serde_json::Value::Object(map)
    }
}

/// A distribution over properties (listener posterior or prior).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyDistribution(pub Vec<f64>);

impl PropertyDistribution {
    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn get(&self, p: PropertyId) -> f64 {
        self.0[p.0]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    fn normalized(mut weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Self(weights)
    }
}

/// Per-property attention weights (at_t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttentionDistribution(pub Vec<f64>);

impl AttentionDistribution {
    pub fn get(&self, p: PropertyId) -> f64 {
        self.0[p.0]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AttentionMode {
    #[default]
    Direct,
    WinnerTakeAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum BeliefUpdateMode {
    #[default]
    Linear,
    /// Experimental multiplicative evidence update in logit space.
    #[serde(rename_all = "camelCase")]
    Logit {
        delta_memory: f64,
        gamma_critical: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum RewardMode {
    #[default]
    CriticalOnly,
    BeliefDelta,
    AdditiveWeight {
        omega: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct PragmaticsConfig {
    pub attention_mode: AttentionMode,
    pub belief_update_mode: BeliefUpdateMode,
    pub reward_mode: RewardMode,
    /// α. Scales log-meaning scores in the literal speaker; with a boolean
    /// lexicon the split over covering utterances is uniform for any α > 0.
    pub rationality: f64,
    /// ε, the uniform attention Silence leaves on every property.
    pub silence_attention: f64,
    /// κ, additive smoothing of the user prior.
    pub prior_smoothing: f64,
}

impl Default for PragmaticsConfig {
    fn default() -> Self {
        Self {
            attention_mode: AttentionMode::Direct,
            belief_update_mode: BeliefUpdateMode::Linear,
            reward_mode: RewardMode::CriticalOnly,
            rationality: 1.0,
            silence_attention: 0.02,
            prior_smoothing: 0.01,
        }
    }
}

impl PragmaticsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rationality > 0.0 && self.rationality.is_finite()) {
            return Err(Error::validation("rationality must be positive"));
        }
        if !(self.silence_attention > 0.0 && self.silence_attention < 1.0) {
            return Err(Error::validation("silenceAttention must lie in (0, 1)"));
        }
        if !(self.prior_smoothing > 0.0 && self.prior_smoothing.is_finite()) {
            return Err(Error::validation("priorSmoothing must be positive"));
        }
        if let BeliefUpdateMode::Logit {
            delta_memory,
            gamma_critical,
        } = self.belief_update_mode
        {
            if !(delta_memory > 0.0 && delta_memory.is_finite()) {
                return Err(Error::validation("deltaMemory must be positive"));
            }
            if !(gamma_critical >= 0.0 && gamma_critical.is_finite()) {
                return Err(Error::validation("gammaCritical must be non-negative"));
            }
        }
        if let RewardMode::AdditiveWeight { omega } = self.reward_mode {
            if !(omega >= 0.0 && omega.is_finite()) {
                return Err(Error::validation("omega must be non-negative"));
            }
        }
        Ok(())
    }

    /// The shared "true user" dynamics: direct attention, linear update and
    /// critical-only reward, keeping this config's ε, κ and α.
    pub fn canonical(&self) -> Self {
        Self {
            attention_mode: AttentionMode::Direct,
            belief_update_mode: BeliefUpdateMode::Linear,
            reward_mode: RewardMode::CriticalOnly,
            ..self.clone()
        }
    }
}

/// S0(u | p): even split over every utterance whose meaning contains `p`.
pub fn literal_speaker(
    lexicon: &Lexicon,
    u: UtteranceId,
    p: PropertyId,
    rationality: f64,
) -> Result<f64> {
    let score = |v: UtteranceId| {
        if lexicon.means(v, p) {
            1.0f64.powf(rationality)
        } else {
            0.0
        }
    };
    let total: f64 = lexicon.utterances().iter().map(|v| score(v.id)).sum();
    if total == 0.0 {
        return Err(Error::validation(format!(
            "property {} is covered by no utterance",
            p.0
        )));
    }
    Ok(score(u) / total)
}

/// Precomputed literal-speaker table for one lexicon.
#[derive(Debug, Clone)]
pub struct Rsa {
    /// `s0[u][p]`.
    s0: Vec<Vec<f64>>,
    categories: Vec<Category>,
}

impl Rsa {
    pub fn new(lexicon: &Lexicon, rationality: f64) -> Result<Self> {
        let n = lexicon.properties();
        let mut s0 = vec![vec![0.0; n]; lexicon.len()];
        for p in (0..n).map(PropertyId) {
            for u in lexicon.utterances() {
                s0[u.id.0][p.0] = literal_speaker(lexicon, u.id, p, rationality)?;
            }
        }
        Ok(Self {
            s0,
            categories: lexicon.utterances().iter().map(|u| u.category).collect(),
        })
    }

    pub fn properties(&self) -> usize {
        self.s0.first().map_or(0, Vec::len)
    }

    pub fn s0(&self, u: UtteranceId, p: PropertyId) -> f64 {
        self.s0[u.0][p.0]
    }

    /// L1(p | u) ∝ S0(u | p) · prior(p).
    pub fn listener(&self, u: UtteranceId, prior: &[f64]) -> Result<PropertyDistribution> {
        if self.categories[u.0] == Category::Silence {
            return Err(Error::validation("Silence has no listener interpretation"));
        }
        let weights: Vec<f64> = self.s0[u.0].iter().zip(prior).map(|(s, q)| s * q).collect();
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::validation(format!(
                "utterance {} covers only zero-prior properties",
                u.0
            )));
        }
        Ok(PropertyDistribution::normalized(weights))
    }
}

pub fn pragmatic_listener_uniform(rsa: &Rsa, u: UtteranceId) -> Result<PropertyDistribution> {
    let prior = PropertyDistribution::uniform(rsa.properties());
    rsa.listener(u, &prior.0)
}

/// P(p | b, StatCr) ∝ κ + believed critical mass of `p`.
pub fn user_prior(b: &BeliefState, space: &PropertySpace, smoothing: f64) -> PropertyDistribution {
    let weights = space
        .ids()
        .map(|p| smoothing + b.critical_mass(space, p))
        .collect();
    PropertyDistribution::normalized(weights)
}

pub fn pragmatic_listener_user(
    rsa: &Rsa,
    u: UtteranceId,
    b_prev: &BeliefState,
    space: &PropertySpace,
    config: &PragmaticsConfig,
) -> Result<PropertyDistribution> {
    let prior = user_prior(b_prev, space, config.prior_smoothing);
    rsa.listener(u, &prior.0)
}

/// What the listener hears in one slot.
#[derive(Debug, Clone, Copy)]
pub enum Signal<'a> {
    Utterance(&'a PropertyDistribution),
    Silence,
    /// Continuation of a multi-step delivery.
    Block,
}

pub fn attention(
    signal: Signal<'_>,
    properties: usize,
    config: &PragmaticsConfig,
) -> AttentionDistribution {
    match signal {
        Signal::Silence => AttentionDistribution(vec![config.silence_attention; properties]),
        Signal::Block => AttentionDistribution(vec![0.0; properties]),
        Signal::Utterance(l1) => match config.attention_mode {
            AttentionMode::Direct => AttentionDistribution(l1.0.clone()),
            AttentionMode::WinnerTakeAll => {
                let mut best = 0;
                for (i, w) in l1.0.iter().enumerate() {
                    if *w > l1.0[best] {
                        best = i;
                    }
                }
                let mut at = vec![0.0; l1.0.len()];
                at[best] = 1.0;
                AttentionDistribution(at)
            }
        },
    }
}

fn logit(x: f64) -> f64 {
    let x = x.clamp(LOGIT_CLAMP, 1.0 - LOGIT_CLAMP);
    (x / (1.0 - x)).ln()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Moves each property's belief toward its true value in proportion to the
/// attention it receives.
pub fn update_beliefs(
    b_prev: &BeliefState,
    truth: &[usize],
    critical: &[bool],
    at: &AttentionDistribution,
    config: &PragmaticsConfig,
) -> BeliefState {
    let mut next = b_prev.clone();
    match config.belief_update_mode {
        BeliefUpdateMode::Linear => {
            for (p, &a) in at.0.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let id = PropertyId(p);
                let row = next.get_mut(id);
                for x in row.iter_mut() {
                    *x *= 1.0 - a;
                }
                row[truth[p]] += a;
            }
        }
        BeliefUpdateMode::Logit {
            delta_memory,
            gamma_critical,
        } => {
            for (p, &a) in at.0.iter().enumerate() {
                let id = PropertyId(p);
                let gain = if critical[p] { gamma_critical * a } else { 0.0 };
                let row = next.get_mut(id);
                for (v, x) in row.iter_mut().enumerate() {
                    let evidence = if v == truth[p] { 1.0 } else { 0.0 };
                    *x = sigmoid(delta_memory * logit(*x) + gain * logit(evidence));
                }
                let total: f64 = row.iter().sum();
                for x in row.iter_mut() {
                    *x /= total;
                }
            }
        }
    }
    next
}

pub fn reward(
    b_t: &BeliefState,
    truth: &[usize],
    critical: &[bool],
    b_prev: &BeliefState,
    config: &PragmaticsConfig,
) -> f64 {
    let aligned = |b: &BeliefState, p: usize| b.prob(PropertyId(p), truth[p]);
    match config.reward_mode {
        RewardMode::CriticalOnly => (0..truth.len())
            .filter(|&p| critical[p])
            .map(|p| aligned(b_t, p))
            .sum(),
        RewardMode::BeliefDelta => (0..truth.len())
            .filter(|&p| critical[p])
            .map(|p| aligned(b_t, p) - aligned(b_prev, p))
            .sum(),
        RewardMode::AdditiveWeight { omega } => (0..truth.len())
            .map(|p| aligned(b_t, p) * (f64::from(u8::from(critical[p])) + omega))
            .sum(),
    }
}
