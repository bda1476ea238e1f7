//! Drone World: properties, value domains, critical regions and the seeded
//! per-trial trajectory generator.
//!
//! Values are stored as indices into a property's ordered domain. Timesteps
//! are 1-based throughout the public API (`1..=horizon`).

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::user_model::{sample_profile, GeneralAwareness, UserProfile};
use crate::{Error, Result};

pub const DRONES: u8 = 4;
pub const DEFAULT_HORIZON: usize = 7;
pub const CONTINUOUS_BINS: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Attribute {
    Battery,
    WindSpeed,
    Rotor,
    Altitude,
    NoFlyZone,
    Distance,
}

impl Attribute {
    pub const ALL: [Attribute; 6] = [
        Attribute::Battery,
        Attribute::WindSpeed,
        Attribute::Rotor,
        Attribute::Altitude,
        Attribute::NoFlyZone,
        Attribute::Distance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Battery => "Battery",
            Attribute::WindSpeed => "WindSpeed",
            Attribute::Rotor => "Rotor",
            Attribute::Altitude => "Altitude",
            Attribute::NoFlyZone => "NoFlyZone",
            Attribute::Distance => "Distance",
        }
    }

    /// Surface form used in alert labels.
    pub fn spoken(self) -> &'static str {
        match self {
            Attribute::Battery => "Battery",
            Attribute::WindSpeed => "Wind Speed",
            Attribute::Rotor => "Rotor",
            Attribute::Altitude => "Altitude",
            Attribute::NoFlyZone => "No Fly Zone",
            Attribute::Distance => "Distance",
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(self, Attribute::Rotor | Attribute::NoFlyZone)
    }

    /// Critical bin indices over the 11-bin grid, or the abnormal value for
    /// binary attributes.
    fn critical_bins(self) -> &'static [usize] {
        match self {
            // [0, 0.15]
            Attribute::Battery => &[0, 1],
            // [0.85, 1]
            Attribute::WindSpeed => &[9, 10],
            Attribute::Altitude | Attribute::Distance => &[0, 10],
            Attribute::Rotor | Attribute::NoFlyZone => &[1],
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Index of a property within its [`PropertySpace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PropertyId(pub usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Property {
    /// 1-based drone number.
    pub drone: u8,
    pub attribute: Attribute,
    /// Ordered value domain V(p).
    pub values: Vec<f64>,
    /// `critical[i]` is true when `values[i]` lies in the critical region.
    pub critical: Vec<bool>,
}

impl Property {
    pub fn label(&self) -> String {
        format!("D{}_{}", self.drone, self.attribute.name())
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    pub fn critical_values(&self) -> impl Iterator<Item = usize> + '_ {
        self.critical
            .iter()
            .enumerate()
            .filter(|(_, c)| **c)
            .map(|(i, _)| i)
    }

    pub fn safe_values(&self) -> impl Iterator<Item = usize> + '_ {
        self.critical
            .iter()
            .enumerate()
            .filter(|(_, c)| !**c)
            .map(|(i, _)| i)
    }

    pub fn value_index(&self, value: f64) -> Option<usize> {
        self.values.iter().position(|v| (v - value).abs() < 1e-9)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertySpace {
    properties: Vec<Property>,
}

impl PropertySpace {
    /// Builds a space after checking every domain is non-empty and every
    /// critical region is a non-empty strict subset of its domain.
    pub fn new(properties: Vec<Property>) -> Result<Self> {
        if properties.is_empty() {
            return Err(Error::validation("property space is empty"));
        }
        let mut seen = std::collections::HashSet::new();
        for p in &properties {
            let label = p.label();
            if p.values.is_empty() {
                return Err(Error::validation(format!("{label}: empty value domain")));
            }
            if p.critical.len() != p.values.len() {
                return Err(Error::validation(format!(
                    "{label}: critical mask length differs from domain"
                )));
            }
            let n_crit = p.critical.iter().filter(|c| **c).count();
            if n_crit == 0 || n_crit == p.values.len() {
                return Err(Error::validation(format!(
                    "{label}: critical region must be a non-empty strict subset"
                )));
            }
            if !seen.insert(label.clone()) {
                return Err(Error::validation(format!("duplicate property {label}")));
            }
        }
        Ok(Self { properties })
    }

    pub fn len(&self) -> usize {
        self.properties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.properties.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = PropertyId> {
        (0..self.properties.len()).map(PropertyId)
    }

    pub fn properties(&self) -> &[Property] {
        &self.properties
    }

    pub fn property(&self, id: PropertyId) -> &Property {
        &self.properties[id.0]
    }

    pub fn label(&self, id: PropertyId) -> String {
        self.properties[id.0].label()
    }

    pub fn find(&self, label: &str) -> Option<PropertyId> {
        self.properties
            .iter()
            .position(|p| p.label() == label)
            .map(PropertyId)
    }

    pub fn is_critical(&self, id: PropertyId, value: usize) -> bool {
        self.properties[id.0].critical[value]
    }
}

fn drone_property(drone: u8, attribute: Attribute) -> Property {
    let bins = if attribute.is_binary() {
        2
    } else {
        CONTINUOUS_BINS
    };
    let values = (0..bins)
        .map(|i| i as f64 / (bins - 1) as f64)
        .collect::<Vec<_>>();
    let mut critical = vec![false; bins];
    for &i in attribute.critical_bins() {
        critical[i] = true;
    }
    Property {
        drone,
        attribute,
        values,
        critical,
    }
}

/// The canonical 4-drone × 6-attribute space. Property ids are drone-major:
/// `id = (drone - 1) * 6 + attribute index`.
pub fn make_drone_world() -> PropertySpace {
    let properties = (1..=DRONES)
        .flat_map(|d| Attribute::ALL.iter().map(move |&a| drone_property(d, a)))
        .collect();
    PropertySpace::new(properties).expect("drone world is well formed")
}

/// Per-property critical flags at one timestep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalityVector(pub Vec<bool>);

impl CriticalityVector {
    pub fn get(&self, id: PropertyId) -> bool {
        self.0[id.0]
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|c| **c).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioConfig {
    pub critical_count: usize,
    pub dispersion: usize,
    pub first_onset: usize,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Probability q that the user already anticipates each critical property.
    pub awareness_prob: f64,
    pub general_awareness: GeneralAwareness,
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}

impl ScenarioConfig {
    pub fn validate(&self, space: &PropertySpace) -> Result<()> {
        if !(2..=4).contains(&self.critical_count) {
            return Err(Error::validation(format!(
                "criticalCount {} not in 2..=4",
                self.critical_count
            )));
        }
        if self.critical_count > space.len() {
            return Err(Error::validation(format!(
                "criticalCount {} exceeds {} properties",
                self.critical_count,
                space.len()
            )));
        }
        if self.dispersion > 3 {
            return Err(Error::validation(format!(
                "dispersion {} not in 0..=3",
                self.dispersion
            )));
        }
        if self.horizon == 0 {
            return Err(Error::validation("horizon must be at least 1"));
        }
        if !(1..=3).contains(&self.first_onset) || self.first_onset > self.horizon {
            return Err(Error::validation(format!(
                "firstOnset {} not in 1..=3 within horizon {}",
                self.first_onset, self.horizon
            )));
        }
        if !(0.0..=1.0).contains(&self.awareness_prob) {
            return Err(Error::validation(format!(
                "awarenessProb {} not a probability",
                self.awareness_prob
            )));
        }
        Ok(())
    }

    /// Onset timesteps `first, first + d, first + 2d, ...` clamped to the horizon.
    pub fn onsets(&self) -> Vec<usize> {
        (0..self.critical_count)
            .map(|i| (self.first_onset + i * self.dispersion).min(self.horizon))
            .collect()
    }
}

/// One trial's committed world trajectory with its criticality schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldScenario {
    seed: u64,
    config: ScenarioConfig,
    /// `trajectory[t - 1][p]` is the value index of `p` at timestep `t`.
    trajectory: Vec<Vec<usize>>,
    onsets: Vec<Option<usize>>,
    critical: Vec<Vec<bool>>,
    user_profile: UserProfile,
}

impl WorldScenario {
    /// Assembles a scenario, checking that criticality is exactly the
    /// sustained-onset schedule: a scheduled property is outside its
    /// critical region before onset and inside it from onset through the
    /// horizon; unscheduled properties are never critical.
    pub fn from_parts(
        space: &PropertySpace,
        seed: u64,
        config: ScenarioConfig,
        trajectory: Vec<Vec<usize>>,
        onsets: Vec<Option<usize>>,
        user_profile: UserProfile,
    ) -> Result<Self> {
        let horizon = trajectory.len();
        if horizon == 0 {
            return Err(Error::validation("empty trajectory"));
        }
        if horizon != config.horizon {
            return Err(Error::validation(format!(
                "trajectory length {horizon} differs from horizon {}",
                config.horizon
            )));
        }
        if onsets.len() != space.len() {
            return Err(Error::validation("onset map does not cover the space"));
        }
        let mut critical = Vec::with_capacity(horizon);
        for (ti, row) in trajectory.iter().enumerate() {
            let t = ti + 1;
            if row.len() != space.len() {
                return Err(Error::validation(format!("timestep {t}: wrong width")));
            }
            let mut flags = Vec::with_capacity(row.len());
            for (id, &v) in space.ids().zip(row) {
                let prop = space.property(id);
                if v >= prop.domain_size() {
                    return Err(Error::validation(format!(
                        "{} value index {v} outside domain",
                        prop.label()
                    )));
                }
                let crit = prop.critical[v];
                let expected = matches!(onsets[id.0], Some(o) if t >= o);
                if crit != expected {
                    return Err(Error::validation(format!(
                        "{} criticality at t={t} disagrees with its schedule",
                        prop.label()
                    )));
                }
                flags.push(crit);
            }
            critical.push(flags);
        }
        for (id, onset) in onsets.iter().enumerate() {
            if let Some(o) = onset {
                if *o == 0 || *o > horizon {
                    return Err(Error::validation(format!(
                        "{} onset {o} outside 1..={horizon}",
                        space.label(PropertyId(id))
                    )));
                }
            }
        }
        let scheduled: Vec<PropertyId> = onsets
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_some())
            .map(|(i, _)| PropertyId(i))
            .collect();
        let flagged: Vec<PropertyId> = user_profile.aware_flags.keys().copied().collect();
        if flagged != scheduled {
            return Err(Error::validation(
                "user profile awareness flags must match the scheduled properties",
            ));
        }
        Ok(Self {
            seed,
            config,
            trajectory,
            onsets,
            critical,
            user_profile,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn horizon(&self) -> usize {
        self.trajectory.len()
    }

    pub fn user_profile(&self) -> &UserProfile {
        &self.user_profile
    }

    pub fn onset(&self, id: PropertyId) -> Option<usize> {
        self.onsets[id.0]
    }

    /// Scheduled properties in id order with their onsets.
    pub fn schedule(&self) -> impl Iterator<Item = (PropertyId, usize)> + '_ {
        self.onsets
            .iter()
            .enumerate()
            .filter_map(|(i, o)| o.map(|o| (PropertyId(i), o)))
    }

    pub fn scheduled(&self) -> Vec<PropertyId> {
        self.schedule().map(|(p, _)| p).collect()
    }

    /// True state s_t as value indices. Panics when `t` is outside `1..=H`.
    pub fn state(&self, t: usize) -> &[usize] {
        &self.trajectory[t - 1]
    }

    pub fn value(&self, t: usize, id: PropertyId) -> usize {
        self.trajectory[t - 1][id.0]
    }

    /// Critical flags at `t` without range checking (1-based).
    pub fn critical_flags(&self, t: usize) -> &[bool] {
        &self.critical[t - 1]
    }

    pub fn criticality(&self, t: usize) -> Result<CriticalityVector> {
        if t == 0 || t > self.horizon() {
            return Err(Error::Range {
                t,
                horizon: self.horizon(),
            });
        }
        Ok(CriticalityVector(self.critical[t - 1].clone()))
    }

    pub fn overlap(&self, space: &PropertySpace) -> Result<f64> {
        overlap_metric(space, &self.scheduled())
    }

    pub fn to_json(&self, space: &PropertySpace) -> Result<String> {
        let doc = ScenarioDoc {
            seed: self.seed,
            horizon: self.horizon(),
            properties: space.ids().map(|id| space.label(id)).collect(),
            onsets: self
                .schedule()
                .map(|(id, o)| (space.label(id), o))
                .collect(),
            trajectory: self
                .trajectory
                .iter()
                .map(|row| {
                    space
                        .ids()
                        .map(|id| (space.label(id), space.property(id).values[row[id.0]]))
                        .collect()
                })
                .collect(),
            config: self.config.clone(),
            user_profile: self.user_profile.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(json: &str, space: &PropertySpace) -> Result<Self> {
        let doc: ScenarioDoc = serde_json::from_str(json)?;
        let lookup = |label: &str| {
            space
                .find(label)
                .ok_or_else(|| Error::validation(format!("unknown property {label}")))
        };
        if doc.properties.len() != space.len() {
            return Err(Error::validation("property list does not match the space"));
        }
        let mut onsets = vec![None; space.len()];
        for (label, o) in &doc.onsets {
            onsets[lookup(label)?.0] = Some(*o);
        }
        let mut trajectory = Vec::with_capacity(doc.trajectory.len());
        for row in &doc.trajectory {
            let mut values = vec![usize::MAX; space.len()];
            for (label, value) in row {
                let id = lookup(label)?;
                values[id.0] = space.property(id).value_index(*value).ok_or_else(|| {
                    Error::validation(format!("{label}: value {value} not in domain"))
                })?;
            }
            if values.contains(&usize::MAX) {
                return Err(Error::validation("trajectory row is missing properties"));
            }
            trajectory.push(values);
        }
        if doc.horizon != trajectory.len() {
            return Err(Error::validation(
                "horizon disagrees with trajectory length",
            ));
        }
        Self::from_parts(
            space,
            doc.seed,
            doc.config,
            trajectory,
            onsets,
            doc.user_profile,
        )
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ScenarioDoc {
    seed: u64,
    horizon: usize,
    properties: Vec<String>,
    onsets: BTreeMap<String, usize>,
    trajectory: Vec<BTreeMap<String, f64>>,
    config: ScenarioConfig,
    user_profile: UserProfile,
}

/// Seeded random walk over the property's non-critical values.
fn safe_walk(rng: &mut ChaCha8Rng, prop: &Property, steps: usize) -> Vec<usize> {
    let safe: Vec<usize> = prop.safe_values().collect();
    let mut pos = rng.gen_range(0..safe.len());
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        out.push(safe[pos]);
        let step: i64 = rng.gen_range(-1..=1);
        pos = (pos as i64 + step).clamp(0, safe.len() as i64 - 1) as usize;
    }
    out
}

/// Generates one trial. Critical properties are drawn without replacement;
/// the i-th draw receives the i-th onset of [`ScenarioConfig::onsets`].
/// Everything, including the user's awareness flags, derives from `seed`.
pub fn generate_scenario(
    space: &PropertySpace,
    config: &ScenarioConfig,
    seed: u64,
) -> Result<WorldScenario> {
    config.validate(space)?;
    let horizon = config.horizon;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut onsets = vec![None; space.len()];
    let picks = sample(&mut rng, space.len(), config.critical_count);
    for (p, onset) in picks.iter().zip(config.onsets()) {
        onsets[p] = Some(onset);
    }

    let mut columns = Vec::with_capacity(space.len());
    for id in space.ids() {
        let prop = space.property(id);
        let mut column = safe_walk(&mut rng, prop, horizon);
        if let Some(onset) = onsets[id.0] {
            let crit: Vec<usize> = prop.critical_values().collect();
            let v = crit[rng.gen_range(0..crit.len())];
            for slot in column.iter_mut().skip(onset - 1) {
                *slot = v;
            }
        }
        columns.push(column);
    }
    let trajectory = (0..horizon)
        .map(|t| columns.iter().map(|c| c[t]).collect())
        .collect();

    let scheduled: Vec<PropertyId> = onsets
        .iter()
        .enumerate()
        .filter(|(_, o)| o.is_some())
        .map(|(i, _)| PropertyId(i))
        .collect();
    let profile = sample_profile(
        &mut rng,
        config.awareness_prob,
        config.general_awareness,
        &scheduled,
        seed,
    );
    WorldScenario::from_parts(space, seed, config.clone(), trajectory, onsets, profile)
}

/// Fraction of unordered pairs in `set` that share a drone or an attribute.
pub fn overlap_metric(space: &PropertySpace, set: &[PropertyId]) -> Result<f64> {
    if set.len() < 2 {
        return Err(Error::validation(
            "overlap needs at least two critical properties",
        ));
    }
    let mut shared = 0usize;
    let mut pairs = 0usize;
    for (i, a) in set.iter().enumerate() {
        for b in &set[i + 1..] {
            let (pa, pb) = (space.property(*a), space.property(*b));
            pairs += 1;
            if pa.drone == pb.drone || pa.attribute == pb.attribute {
                shared += 1;
            }
        }
    }
    Ok(shared as f64 / pairs as f64)
}
