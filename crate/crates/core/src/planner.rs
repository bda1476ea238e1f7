//! Speaker variants: greedy per-slot choice and exhaustive finite-horizon
//! search, each with a uniform or user-specific listener prior.
//!
//! Every plan is scored twice. The planner's own listener model picks the
//! sequence (`planner_internal_reward`); the chosen sequence is then replayed
//! under the canonical user dynamics (user prior, direct attention, linear
//! update, critical-only reward) to give the achieved reward all variants
//! are compared on.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lexicon::{
    build_drone_lexicon, Category, Lexicon, Slot, UtteranceId, UtteranceSlotSequence,
};
use crate::pragmatics::{
    attention, reward, update_beliefs, AttentionDistribution, BeliefState, BeliefUpdateMode,
    PragmaticsConfig, PropertyDistribution, Rsa, Signal,
};
use crate::world::{make_drone_world, PropertySpace, WorldScenario};
use crate::{Error, Result};

/// Longest horizon the exhaustive planner accepts.
pub const MAX_EXHAUSTIVE_HORIZON: usize = 7;

/// Rewards closer than this are treated as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ListenerMode {
    UniformPrior,
    UserPrior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelVariant {
    #[serde(rename = "d-RSA")]
    Drsa,
    #[serde(rename = "d-RSA+Priors")]
    DrsaPriors,
    #[serde(rename = "d-RSA+Planning")]
    DrsaPlanning,
    #[serde(rename = "Full")]
    Full,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 4] = [
        ModelVariant::Drsa,
        ModelVariant::DrsaPriors,
        ModelVariant::DrsaPlanning,
        ModelVariant::Full,
    ];

    pub fn new(use_planning: bool, use_user_priors: bool) -> Self {
        match (use_planning, use_user_priors) {
            (false, false) => ModelVariant::Drsa,
            (false, true) => ModelVariant::DrsaPriors,
            (true, false) => ModelVariant::DrsaPlanning,
            (true, true) => ModelVariant::Full,
        }
    }

    pub fn uses_planning(self) -> bool {
        matches!(self, ModelVariant::DrsaPlanning | ModelVariant::Full)
    }

    pub fn uses_user_priors(self) -> bool {
        matches!(self, ModelVariant::DrsaPriors | ModelVariant::Full)
    }

    pub fn listener_mode(self) -> ListenerMode {
        if self.uses_user_priors() {
            ListenerMode::UserPrior
        } else {
            ListenerMode::UniformPrior
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelVariant::Drsa => "d-RSA",
            ModelVariant::DrsaPriors => "d-RSA+Priors",
            ModelVariant::DrsaPlanning => "d-RSA+Planning",
            ModelVariant::Full => "Full",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Property space, lexicon and the precomputed listener tables over them.
#[derive(Debug, Clone)]
pub struct SignalModel {
    space: PropertySpace,
    lexicon: Lexicon,
    rsa: Rsa,
    uniform_l1: Vec<Option<PropertyDistribution>>,
}

impl SignalModel {
    pub fn new(space: PropertySpace, lexicon: Lexicon, rationality: f64) -> Result<Self> {
        if lexicon.properties() != space.len() {
            return Err(Error::validation(
                "lexicon width differs from the property space",
            ));
        }
        let rsa = Rsa::new(&lexicon, rationality)?;
        let uniform = PropertyDistribution::uniform(space.len());
        let uniform_l1 = lexicon
            .utterances()
            .iter()
            .map(|u| match u.category {
                Category::Silence => Ok(None),
                _ => rsa.listener(u.id, &uniform.0).map(Some),
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            space,
            lexicon,
            rsa,
            uniform_l1,
        })
    }

    pub fn drone_world(rationality: f64) -> Result<Self> {
        let space = make_drone_world();
        let lexicon = build_drone_lexicon(&space)?;
        Self::new(space, lexicon, rationality)
    }

    pub fn space(&self) -> &PropertySpace {
        &self.space
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn rsa(&self) -> &Rsa {
        &self.rsa
    }

    /// L1 for `u` heard after beliefs `b_prev`.
    pub fn listen(
        &self,
        u: UtteranceId,
        b_prev: &BeliefState,
        mode: ListenerMode,
        config: &PragmaticsConfig,
    ) -> Result<PropertyDistribution> {
        match mode {
            ListenerMode::UniformPrior => self.uniform_l1[u.0]
                .clone()
                .ok_or_else(|| Error::validation("Silence has no listener interpretation")),
            ListenerMode::UserPrior => {
                let prior =
                    crate::pragmatics::user_prior(b_prev, &self.space, config.prior_smoothing);
                self.rsa.listener(u, &prior.0)
            }
        }
    }

    fn attention_for(
        &self,
        slot: Slot,
        b_prev: &BeliefState,
        mode: ListenerMode,
        config: &PragmaticsConfig,
    ) -> Result<AttentionDistribution> {
        let n = self.space.len();
        Ok(match slot {
            Slot::Block => attention(Signal::Block, n, config),
            Slot::Say(u) if self.lexicon.utterance(u).category == Category::Silence => {
                attention(Signal::Silence, n, config)
            }
            Slot::Say(u) => {
                let l1 = self.listen(u, b_prev, mode, config)?;
                attention(Signal::Utterance(&l1), n, config)
            }
        })
    }

    /// One slot of the belief/reward dynamics at timestep `t` (1-based).
    fn step(
        &self,
        scenario: &WorldScenario,
        b_prev: &BeliefState,
        slot: Slot,
        t: usize,
        mode: ListenerMode,
        config: &PragmaticsConfig,
    ) -> Result<(BeliefState, AttentionDistribution, f64)> {
        let at = self.attention_for(slot, b_prev, mode, config)?;
        let truth = scenario.state(t);
        let crit = scenario.critical_flags(t);
        let next = update_beliefs(b_prev, truth, crit, &at, config);
        let r = reward(&next, truth, crit, b_prev, config);
        Ok((next, at, r))
    }

    /// Reward of a block slot when beliefs are carried unchanged.
    fn carried_reward(
        &self,
        scenario: &WorldScenario,
        beliefs: &BeliefState,
        t: usize,
        config: &PragmaticsConfig,
    ) -> f64 {
        reward(
            beliefs,
            scenario.state(t),
            scenario.critical_flags(t),
            beliefs,
            config,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub sequence: UtteranceSlotSequence,
    pub per_step_reward: Vec<f64>,
    pub cumulative_reward: f64,
    /// b_1 ..= b_H.
    pub belief_trajectory: Vec<BeliefState>,
    /// at_1 ..= at_H.
    pub attention_trajectory: Vec<AttentionDistribution>,
    /// Cumulative reward under the planner's own listener model.
    pub planner_internal_reward: f64,
    /// Candidate utterances (greedy) or full sequences (exhaustive) scored.
    pub candidates_evaluated: u64,
}

impl PlanResult {
    pub fn labels(&self, lexicon: &Lexicon) -> Vec<String> {
        self.sequence.labels(lexicon)
    }

    pub fn to_trace_json(&self, model: &SignalModel, with_beliefs: bool) -> serde_json::Value {
        let mut doc = serde_json::json!({
            "sequence": self.labels(model.lexicon()),
            "perStepReward": self.per_step_reward,
            "cumulativeReward": self.cumulative_reward,
            "plannerInternalReward": self.planner_internal_reward,
        });
        if with_beliefs {
            doc["beliefTrajectory"] = serde_json::Value::Array(
                self.belief_trajectory
                    .iter()
                    .map(|b| b.to_json_value(model.space()))
                    .collect(),
            );
        }
        doc
    }
}

fn check_inputs(
    model: &SignalModel,
    scenario: &WorldScenario,
    b0: &BeliefState,
    config: &PragmaticsConfig,
) -> Result<()> {
    config.validate()?;
    if b0.len() != model.space.len() {
        return Err(Error::validation(
            "initial beliefs do not cover the property space",
        ));
    }
    if scenario.state(1).len() != model.space.len() {
        return Err(Error::validation(
            "scenario does not match the property space",
        ));
    }
    Ok(())
}

/// Replays `seq` slot by slot. A multi-step utterance updates beliefs in
/// full at its initiation slot; its block slots carry zero attention.
pub fn simulate_sequence(
    model: &SignalModel,
    seq: &UtteranceSlotSequence,
    scenario: &WorldScenario,
    b0: &BeliefState,
    mode: ListenerMode,
    config: &PragmaticsConfig,
) -> Result<PlanResult> {
    check_inputs(model, scenario, b0, config)?;
    if seq.len() != scenario.horizon() {
        return Err(Error::IllegalSequence(format!(
            "sequence length {} differs from horizon {}",
            seq.len(),
            scenario.horizon()
        )));
    }
    let seq = UtteranceSlotSequence::new(seq.slots().to_vec(), &model.lexicon)?;
    let mut beliefs = b0.clone();
    let mut per_step_reward = Vec::with_capacity(seq.len());
    let mut belief_trajectory = Vec::with_capacity(seq.len());
    let mut attention_trajectory = Vec::with_capacity(seq.len());
    for (i, slot) in seq.slots().iter().enumerate() {
        let (next, at, r) = model.step(scenario, &beliefs, *slot, i + 1, mode, config)?;
        per_step_reward.push(r);
        belief_trajectory.push(next.clone());
        attention_trajectory.push(at);
        beliefs = next;
    }
    let cumulative_reward = per_step_reward.iter().sum();
    Ok(PlanResult {
        sequence: seq,
        per_step_reward,
        cumulative_reward,
        belief_trajectory,
        attention_trajectory,
        planner_internal_reward: cumulative_reward,
        candidates_evaluated: 1,
    })
}

/// Scores `seq` under the canonical user dynamics shared by all variants.
pub fn evaluate(
    model: &SignalModel,
    seq: &UtteranceSlotSequence,
    scenario: &WorldScenario,
    b0: &BeliefState,
    config: &PragmaticsConfig,
) -> Result<PlanResult> {
    simulate_sequence(
        model,
        seq,
        scenario,
        b0,
        ListenerMode::UserPrior,
        &config.canonical(),
    )
}

/// Greedy order of preference among equal immediate rewards: Silence, then
/// shorter deliveries, then lower ids.
fn greedy_order(lexicon: &Lexicon) -> Vec<UtteranceId> {
    let mut ids: Vec<UtteranceId> = lexicon.utterances().iter().map(|u| u.id).collect();
    ids.sort_by_key(|&u| {
        let utt = lexicon.utterance(u);
        (utt.category != Category::Silence, utt.duration, u.0)
    });
    ids
}

fn finish(
    model: &SignalModel,
    seq: UtteranceSlotSequence,
    scenario: &WorldScenario,
    b0: &BeliefState,
    mode: ListenerMode,
    config: &PragmaticsConfig,
    candidates: u64,
) -> Result<PlanResult> {
    let internal = simulate_sequence(model, &seq, scenario, b0, mode, config)?;
    let mut achieved = evaluate(model, &seq, scenario, b0, config)?;
    achieved.planner_internal_reward = internal.cumulative_reward;
    achieved.candidates_evaluated = candidates;
    Ok(achieved)
}

/// At every free slot, picks the startable utterance with the highest
/// immediate reward under the planner's listener model.
pub fn greedy_plan(
    model: &SignalModel,
    scenario: &WorldScenario,
    b0: &BeliefState,
    mode: ListenerMode,
    config: &PragmaticsConfig,
) -> Result<PlanResult> {
    check_inputs(model, scenario, b0, config)?;
    let horizon = scenario.horizon();
    let order = greedy_order(&model.lexicon);
    let mut beliefs = b0.clone();
    let mut chosen = Vec::new();
    let mut candidates = 0u64;
    let mut t = 1;
    while t <= horizon {
        let mut best: Option<(UtteranceId, f64, BeliefState)> = None;
        for &u in &order {
            if t + model.lexicon.utterance(u).duration - 1 > horizon {
                continue;
            }
            candidates += 1;
            let (next, _, r) = model.step(scenario, &beliefs, Slot::Say(u), t, mode, config)?;
            if best.as_ref().is_none_or(|(_, b, _)| r > b + TIE_TOLERANCE) {
                best = Some((u, r, next));
            }
        }
        let (u, _, mut next) = best.expect("Silence or Beep always fits");
        let duration = model.lexicon.utterance(u).duration;
        for k in 1..duration {
            next = model
                .step(scenario, &next, Slot::Block, t + k, mode, config)?
                .0;
        }
        chosen.push(u);
        beliefs = next;
        t += duration;
    }
    let seq = UtteranceSlotSequence::from_utterances(&chosen, &model.lexicon)?;
    finish(model, seq, scenario, b0, mode, config, candidates)
}

struct Search<'a> {
    model: &'a SignalModel,
    scenario: &'a WorldScenario,
    mode: ListenerMode,
    config: &'a PragmaticsConfig,
    horizon: usize,
    carry_blocks: bool,
    prefix: Vec<Slot>,
    prefix_non_silence: usize,
    best: Option<(f64, usize, Vec<Slot>)>,
    leaves: u64,
}

impl Search<'_> {
    fn visit(&mut self, t: usize, beliefs: &BeliefState, acc: f64) -> Result<()> {
        if t > self.horizon {
            self.leaves += 1;
            let better = match &self.best {
                None => true,
                Some((value, non_silence, _)) => {
                    acc > value + TIE_TOLERANCE
                        || ((acc - value).abs() <= TIE_TOLERANCE
                            && self.prefix_non_silence < *non_silence)
                }
            };
            if better {
                self.best = Some((acc, self.prefix_non_silence, self.prefix.clone()));
            }
            return Ok(());
        }
        let lexicon = &self.model.lexicon;
        for u in lexicon.startable(t, self.horizon) {
            let (id, duration) = (u.id, u.duration);
            let silent = u.category == Category::Silence;
            let (mut next, _, r) = self.model.step(
                self.scenario,
                beliefs,
                Slot::Say(id),
                t,
                self.mode,
                self.config,
            )?;
            let mut total = acc + r;
            for k in 1..duration {
                if self.carry_blocks {
                    total += self
                        .model
                        .carried_reward(self.scenario, &next, t + k, self.config);
                } else {
                    let (b, _, r) = self.model.step(
                        self.scenario,
                        &next,
                        Slot::Block,
                        t + k,
                        self.mode,
                        self.config,
                    )?;
                    next = b;
                    total += r;
                }
            }
            self.prefix.push(Slot::Say(id));
            self.prefix
                .extend(std::iter::repeat_n(Slot::Block, duration - 1));
            let added = if silent { 0 } else { duration };
            self.prefix_non_silence += added;
            self.visit(t + duration, &next, total)?;
            self.prefix_non_silence -= added;
            self.prefix.truncate(self.prefix.len() - duration);
        }
        Ok(())
    }
}

/// Exhaustive search over every legal sequence, maximising cumulative reward
/// under the planner's listener model. Ties go to the sequence with fewer
/// non-Silence slots, then to the earlier one in enumeration order.
pub fn full_plan(
    model: &SignalModel,
    scenario: &WorldScenario,
    b0: &BeliefState,
    mode: ListenerMode,
    config: &PragmaticsConfig,
) -> Result<PlanResult> {
    check_inputs(model, scenario, b0, config)?;
    let horizon = scenario.horizon();
    if horizon > MAX_EXHAUSTIVE_HORIZON {
        return Err(Error::Capacity {
            horizon,
            max: MAX_EXHAUSTIVE_HORIZON,
        });
    }
    let mut search = Search {
        model,
        scenario,
        mode,
        config,
        horizon,
        carry_blocks: config.belief_update_mode == BeliefUpdateMode::Linear,
        prefix: Vec::with_capacity(horizon),
        prefix_non_silence: 0,
        best: None,
        leaves: 0,
    };
    search.visit(1, b0, 0.0)?;
    let (_, _, slots) = search.best.expect("at least one legal sequence");
    let seq = UtteranceSlotSequence::new(slots, &model.lexicon)?;
    finish(model, seq, scenario, b0, mode, config, search.leaves)
}

/// Runs one of the four speaker variants.
pub fn plan(
    model: &SignalModel,
    variant: ModelVariant,
    scenario: &WorldScenario,
    b0: &BeliefState,
    config: &PragmaticsConfig,
) -> Result<PlanResult> {
    let mode = variant.listener_mode();
    if variant.uses_planning() {
        full_plan(model, scenario, b0, mode, config)
    } else {
        greedy_plan(model, scenario, b0, mode, config)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::lexicon::legal_sequences;
    use crate::user_model::{GeneralAwareness, UserProfile};
    use crate::world::{PropertyId, ScenarioConfig};

    fn model() -> SignalModel {
        SignalModel::drone_world(1.0).unwrap()
    }

    /// Drone-world scenario where every property sits on its first safe
    /// value except the scheduled ones, which switch to their first
    /// critical value at onset. `sched` holds (property, onset, aware).
    fn scenario(
        model: &SignalModel,
        horizon: usize,
        sched: &[(usize, usize, bool)],
    ) -> WorldScenario {
        let space = model.space();
        let mut onsets = vec![None; space.len()];
        let mut aware_flags = BTreeMap::new();
        for &(p, onset, aware) in sched {
            onsets[p] = Some(onset);
            aware_flags.insert(PropertyId(p), aware);
        }
        let trajectory = (1..=horizon)
            .map(|t| {
                space
                    .ids()
                    .map(|id| {
                        let prop = space.property(id);
                        match onsets[id.0] {
                            Some(o) if t >= o => prop.critical_values().next().unwrap(),
                            _ => prop.safe_values().next().unwrap(),
                        }
                    })
                    .collect()
            })
            .collect();
        let config = ScenarioConfig {
            critical_count: sched.len(),
            dispersion: 0,
            first_onset: 1,
            horizon,
            awareness_prob: 0.5,
            general_awareness: GeneralAwareness::High,
        };
        let profile = UserProfile {
            critical_awareness_prob: 0.5,
            general_awareness: GeneralAwareness::High,
            aware_flags,
            seed: 0,
        };
        WorldScenario::from_parts(space, 0, config, trajectory, onsets, profile).unwrap()
    }

    /// Uniform beliefs except `overrides`, which put all mass but `1 - mass`
    /// (spread evenly) on one value.
    fn beliefs(model: &SignalModel, overrides: &[(usize, usize, f64)]) -> BeliefState {
        let space = model.space();
        let mut vectors: Vec<Vec<f64>> = space
            .properties()
            .iter()
            .map(|p| vec![1.0 / p.domain_size() as f64; p.domain_size()])
            .collect();
        for &(p, v, mass) in overrides {
            let n = vectors[p].len();
            assert!(v < n);
            let rest = (1.0 - mass) / (n - 1) as f64;
            vectors[p] = (0..n).map(|i| if i == v { mass } else { rest }).collect();
        }
        BeliefState::from_vectors(vectors).unwrap()
    }

    fn seq(model: &SignalModel, labels: &[&str]) -> UtteranceSlotSequence {
        UtteranceSlotSequence::from_labels(labels, model.lexicon()).unwrap()
    }

    fn cfg() -> PragmaticsConfig {
        PragmaticsConfig::default()
    }

    #[test]
    fn immediate_specific_alert_locks_in_full_reward() {
        let m = model();
        let s = scenario(&m, 7, &[(0, 1, false)]);
        let b0 = beliefs(&m, &[]);
        let alert = seq(
            &m,
            &["D1 Battery", "(X)", "(X)", "...", "...", "...", "..."],
        );
        let r = evaluate(&m, &alert, &s, &b0, &cfg()).unwrap();
        assert!((r.cumulative_reward - 7.0).abs() < 1e-12);
        assert_eq!(r.attention_trajectory[1].sum(), 0.0);
    }

    #[test]
    fn silence_only_drifts_by_epsilon() {
        let m = model();
        let s = scenario(&m, 7, &[(0, 1, false)]);
        let b0 = beliefs(&m, &[]);
        let r = evaluate(&m, &seq(&m, &["..."; 7]), &s, &b0, &cfg()).unwrap();
        let start = 1.0 / 11.0;
        let expected: f64 = (1..=7).map(|t| 1.0 - (1.0 - start) * 0.98f64.powi(t)).sum();
        assert!((r.cumulative_reward - expected).abs() < 1e-12);
        let sum: f64 = r.per_step_reward.iter().sum();
        assert!((sum - r.cumulative_reward).abs() < 1e-9);
    }

    #[test]
    fn nothing_critical_means_silence_everywhere() {
        let m = model();
        let s = scenario(&m, 5, &[]);
        let b0 = beliefs(&m, &[]);
        for variant in ModelVariant::ALL {
            let r = plan(&m, variant, &s, &b0, &cfg()).unwrap();
            assert_eq!(r.labels(m.lexicon()), vec!["..."; 5], "{variant}");
            assert_eq!(r.cumulative_reward, 0.0);
        }
    }

    #[test]
    fn trivial_scenario_all_variants_alert_at_once() {
        let m = model();
        let s = scenario(&m, 7, &[(9, 1, false)]);
        let b0 = beliefs(&m, &[(9, 0, 0.9)]);
        for variant in ModelVariant::ALL {
            let r = plan(&m, variant, &s, &b0, &cfg()).unwrap();
            assert_eq!(r.labels(m.lexicon())[0], "D2 Altitude", "{variant}");
        }
    }

    #[test]
    fn unaware_property_is_alerted_before_anticipated_one() {
        let m = model();
        // D1 Battery is expected by the user (mass on its critical bin 0);
        // D3 Rotor is not (mass on the safe value).
        let s = scenario(&m, 7, &[(0, 1, true), (14, 1, false)]);
        let b0 = beliefs(&m, &[(0, 0, 0.9), (14, 0, 0.9)]);
        for variant in ModelVariant::ALL {
            let r = plan(&m, variant, &s, &b0, &cfg()).unwrap();
            assert_eq!(r.labels(m.lexicon())[0], "D3 Rotor", "{variant}");
        }
    }

    #[test]
    fn exhaustive_search_scores_every_sequence() {
        let m = model();
        let s = scenario(&m, 7, &[(3, 2, false), (20, 4, true)]);
        let b0 = beliefs(&m, &[(3, 5, 0.9), (20, 1, 0.9)]);
        let r = full_plan(&m, &s, &b0, ListenerMode::UserPrior, &cfg()).unwrap();
        assert_eq!(r.candidates_evaluated, 20_768);
    }

    #[test]
    fn exhaustive_plan_dominates_greedy_and_random_sequences() {
        let m = model();
        let s = scenario(&m, 7, &[(1, 1, false), (8, 3, true), (17, 3, false)]);
        let b0 = beliefs(&m, &[(1, 4, 0.9), (8, 1, 0.9), (17, 0, 0.9)]);
        for mode in [ListenerMode::UniformPrior, ListenerMode::UserPrior] {
            let full = full_plan(&m, &s, &b0, mode, &cfg()).unwrap();
            let greedy = greedy_plan(&m, &s, &b0, mode, &cfg()).unwrap();
            assert!(full.planner_internal_reward >= greedy.planner_internal_reward - 1e-12);
        }
        let full = full_plan(&m, &s, &b0, ListenerMode::UserPrior, &cfg()).unwrap();
        assert!((full.planner_internal_reward - full.cumulative_reward).abs() < 1e-12);

        let all = legal_sequences(m.lexicon(), 7);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let candidate = &all[rng.gen_range(0..all.len())];
            let r = evaluate(&m, candidate, &s, &b0, &cfg()).unwrap();
            assert!(full.cumulative_reward >= r.cumulative_reward - 1e-12);
        }
    }

    #[test]
    fn plans_are_deterministic() {
        let m = model();
        let s = scenario(&m, 6, &[(5, 2, false), (12, 2, true)]);
        let b0 = beliefs(&m, &[(5, 0, 0.6)]);
        for variant in ModelVariant::ALL {
            let a = plan(&m, variant, &s, &b0, &cfg()).unwrap();
            let b = plan(&m, variant, &s, &b0, &cfg()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn long_horizons_are_rejected_by_exhaustive_search() {
        let m = model();
        let s = scenario(&m, 8, &[(0, 1, false)]);
        let b0 = beliefs(&m, &[]);
        let err = full_plan(&m, &s, &b0, ListenerMode::UserPrior, &cfg()).unwrap_err();
        assert!(matches!(err, Error::Capacity { horizon: 8, max: 7 }));
        // greedy has no such limit
        assert!(greedy_plan(&m, &s, &b0, ListenerMode::UserPrior, &cfg()).is_ok());
    }

    #[test]
    fn simulate_rejects_wrong_length() {
        let m = model();
        let s = scenario(&m, 7, &[(0, 1, false)]);
        let b0 = beliefs(&m, &[]);
        let short = seq(&m, &["..."; 6]);
        assert!(matches!(
            evaluate(&m, &short, &s, &b0, &cfg()),
            Err(Error::IllegalSequence(_))
        ));
    }

    #[test]
    fn variant_names_round_trip() {
        for v in ModelVariant::ALL {
            assert_eq!(ModelVariant::from_name(v.name()), Some(v));
        }
        assert_eq!(ModelVariant::new(true, true), ModelVariant::Full);
        assert_eq!(ModelVariant::new(false, false), ModelVariant::Drsa);
        assert_eq!(ModelVariant::from_name("RSA"), None);
    }
}
