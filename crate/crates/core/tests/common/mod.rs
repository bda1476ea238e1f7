//! Two-property world and a from-scratch brute-force planner used as an
//! oracle for the exhaustive search.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use drsa::lexicon::{Category, Lexicon, Utterance, UtteranceId};
use drsa::planner::{ListenerMode, SignalModel};
use drsa::pragmatics::BeliefState;
use drsa::user_model::{GeneralAwareness, UserProfile};
use drsa::world::{Attribute, Property, PropertyId, PropertySpace, ScenarioConfig, WorldScenario};

pub const HORIZON: usize = 4;
pub const EPSILON: f64 = 0.02;
pub const KAPPA: f64 = 0.01;

fn battery(drone: u8) -> Property {
    Property {
        drone,
        attribute: Attribute::Battery,
        values: (0..11).map(|i| i as f64 / 10.0).collect(),
        critical: (0..11).map(|i| i <= 1).collect(),
    }
}

pub fn reduced_model() -> SignalModel {
    let space = PropertySpace::new(vec![battery(1), battery(2)]).unwrap();
    let entries = [
        ("D1 Battery", Category::TwoFeature, vec![true, false]),
        ("Battery", Category::SingleFeature, vec![true, true]),
        ("Beep", Category::Beep, vec![true, true]),
        ("...", Category::Silence, vec![false, false]),
    ];
    let utterances = entries
        .iter()
        .enumerate()
        .map(|(i, (label, category, _))| Utterance {
            id: UtteranceId(i),
            label: label.to_string(),
            category: *category,
            duration: category.duration(),
        })
        .collect();
    let meaning = entries.iter().map(|e| e.2.clone()).collect();
    let lexicon = Lexicon::new(utterances, meaning).unwrap();
    SignalModel::new(space, lexicon, 1.0).unwrap()
}

pub struct Case {
    pub scenario: WorldScenario,
    pub b0: BeliefState,
    pub mode: ListenerMode,
}

/// A random scenario on the reduced world with at least one scheduled property.
pub fn random_case(model: &SignalModel, seed: u64) -> Case {
    let space = model.space();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut onsets: Vec<Option<usize>> = vec![None; 2];
    while onsets.iter().all(Option::is_none) {
        for o in onsets.iter_mut() {
            *o = rng.gen_bool(0.7).then(|| rng.gen_range(1..=HORIZON));
        }
    }
    let crit_value: Vec<usize> = (0..2).map(|_| rng.gen_range(0..=1)).collect();
    let trajectory = (1..=HORIZON)
        .map(|t| {
            (0..2)
                .map(|p| match onsets[p] {
                    Some(o) if t >= o => crit_value[p],
                    _ => rng.gen_range(2..11),
                })
                .collect()
        })
        .collect();
    let aware_flags: BTreeMap<PropertyId, bool> = onsets
        .iter()
        .enumerate()
        .filter(|(_, o)| o.is_some())
        .map(|(p, _)| (PropertyId(p), rng.gen_bool(0.5)))
        .collect();
    let profile = UserProfile {
        critical_awareness_prob: 0.5,
        general_awareness: GeneralAwareness::Low,
        aware_flags,
        seed,
    };
    let config = ScenarioConfig {
        critical_count: 2,
        dispersion: 0,
        first_onset: 1,
        horizon: HORIZON,
        awareness_prob: 0.5,
        general_awareness: GeneralAwareness::Low,
    };
    let scenario =
        WorldScenario::from_parts(space, seed, config, trajectory, onsets, profile).unwrap();
    let b0 = BeliefState::from_vectors(
        (0..2)
            .map(|_| {
                let w: Vec<f64> = (0..11).map(|_| rng.gen_range(0.01..1.0)).collect();
                let total: f64 = w.iter().sum();
                w.into_iter().map(|x| x / total).collect()
            })
            .collect(),
    )
    .unwrap();
    let mode = if seed.is_multiple_of(2) {
        ListenerMode::UserPrior
    } else {
        ListenerMode::UniformPrior
    };
    Case { scenario, b0, mode }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleBest {
    pub value: f64,
    /// Slot labels with `(X)` for block slots.
    pub labels: Vec<String>,
}

/// Independent re-implementation: every sequence is built by plain
/// recursion, then replayed from b_0 with its own listener, attention,
/// linear update and critical-only reward.
pub fn oracle(model: &SignalModel, case: &Case) -> OracleBest {
    let lexicon = model.lexicon();
    let space = model.space();
    let n_props = space.len();
    let horizon = case.scenario.horizon();

    let mut all: Vec<Vec<Option<usize>>> = Vec::new();
    fn grow(
        lexicon: &Lexicon,
        horizon: usize,
        cur: Vec<Option<usize>>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        if cur.len() == horizon {
            out.push(cur);
            return;
        }
        for u in lexicon.utterances() {
            if cur.len() + u.duration <= horizon {
                let mut next = cur.clone();
                next.push(Some(u.id.0));
                for _ in 1..u.duration {
                    next.push(None);
                }
                grow(lexicon, horizon, next, out);
            }
        }
    }
    grow(lexicon, horizon, Vec::new(), &mut all);

    let covers = |u: usize, p: usize| lexicon.meaning_row(UtteranceId(u))[p];
    let s0 = |u: usize, p: usize| {
        let n = (0..lexicon.len()).filter(|&v| covers(v, p)).count();
        if covers(u, p) {
            1.0 / n as f64
        } else {
            0.0
        }
    };

    let mut best: Option<(f64, usize, Vec<Option<usize>>)> = None;
    for seq in all {
        let mut b: Vec<Vec<f64>> = case.b0.vectors().map(|v| v.to_vec()).collect();
        let mut total = 0.0;
        for (i, slot) in seq.iter().enumerate() {
            let t = i + 1;
            let at: Vec<f64> = match slot {
                None => vec![0.0; n_props],
                Some(u) if lexicon.utterance(UtteranceId(*u)).category == Category::Silence => {
                    vec![EPSILON; n_props]
                }
                Some(u) => {
                    let prior: Vec<f64> = match case.mode {
                        ListenerMode::UniformPrior => vec![1.0; n_props],
                        ListenerMode::UserPrior => (0..n_props)
                            .map(|p| {
                                let prop = space.property(PropertyId(p));
                                KAPPA
                                    + (0..b[p].len())
                                        .filter(|&v| prop.critical[v])
                                        .map(|v| b[p][v])
                                        .sum::<f64>()
                            })
                            .collect(),
                    };
                    let w: Vec<f64> = (0..n_props).map(|p| s0(*u, p) * prior[p]).collect();
                    let z: f64 = w.iter().sum();
                    w.into_iter().map(|x| x / z).collect()
                }
            };
            for p in 0..n_props {
                let truth = case.scenario.value(t, PropertyId(p));
                for v in 0..b[p].len() {
                    let target = if v == truth { 1.0 } else { 0.0 };
                    b[p][v] = at[p] * target + (1.0 - at[p]) * b[p][v];
                }
            }
            for p in 0..n_props {
                let truth = case.scenario.value(t, PropertyId(p));
                if space.property(PropertyId(p)).critical[truth] {
                    total += b[p][truth];
                }
            }
        }
        let non_silence = seq
            .iter()
            .filter(|s| match s {
                None => true,
                Some(u) => lexicon.utterance(UtteranceId(*u)).category != Category::Silence,
            })
            .count();
        let replace = match &best {
            None => true,
            Some((v, ns, _)) => {
                total > v + 1e-12 || ((total - v).abs() <= 1e-12 && non_silence < *ns)
            }
        };
        if replace {
            best = Some((total, non_silence, seq));
        }
    }
    let (value, _, seq) = best.unwrap();
    let labels = seq
        .iter()
        .map(|s| match s {
            None => "(X)".to_string(),
            Some(u) => lexicon.utterance(UtteranceId(*u)).label.clone(),
        })
        .collect();
    OracleBest { value, labels }
}
