//! Utterance inventory, meaning matrix and multi-step delivery constraints.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::world::{Attribute, PropertyId, PropertySpace};
use crate::{Error, Result};

/// Label of the non-selectable delivery filler.
pub const BLOCK_LABEL: &str = "(X)";
pub const SILENCE_LABEL: &str = "...";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    TwoFeature,
    SingleFeature,
    Beep,
    Silence,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::TwoFeature,
        Category::SingleFeature,
        Category::Beep,
        Category::Silence,
    ];

    /// Delivery length in timesteps.
    pub fn duration(self) -> usize {
        match self {
            Category::TwoFeature => 3,
            Category::SingleFeature => 2,
            Category::Beep | Category::Silence => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UtteranceId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: UtteranceId,
    pub label: String,
    pub category: Category,
    pub duration: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    utterances: Vec<Utterance>,
    /// `meaning[u][p]`, shape |U| × |P|.
    meaning: Vec<Vec<bool>>,
}

impl Lexicon {
    pub fn new(utterances: Vec<Utterance>, meaning: Vec<Vec<bool>>) -> Result<Self> {
        if utterances.is_empty() {
            return Err(Error::validation("lexicon has no utterances"));
        }
        if meaning.len() != utterances.len() {
            return Err(Error::validation(
                "meaning matrix row count differs from |U|",
            ));
        }
        let width = meaning[0].len();
        let mut labels = HashSet::new();
        for (i, (u, row)) in utterances.iter().zip(&meaning).enumerate() {
            if u.id.0 != i {
                return Err(Error::validation(format!(
                    "utterance {} out of id order",
                    u.label
                )));
            }
            if u.label == BLOCK_LABEL {
                return Err(Error::validation("(X) cannot be a lexicon entry"));
            }
            if !labels.insert(u.label.as_str()) {
                return Err(Error::validation(format!("duplicate label {}", u.label)));
            }
            if u.duration != u.category.duration() {
                return Err(Error::validation(format!(
                    "{}: duration {} does not match {:?}",
                    u.label, u.duration, u.category
                )));
            }
            if row.len() != width {
                return Err(Error::validation("ragged meaning matrix"));
            }
            match u.category {
                Category::Beep if !row.iter().all(|m| *m) => {
                    return Err(Error::validation("Beep must cover every property"));
                }
                Category::Silence if row.iter().any(|m| *m) => {
                    return Err(Error::validation("Silence must cover no property"));
                }
                _ => {}
            }
        }
        Ok(Self {
            utterances,
            meaning,
        })
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn properties(&self) -> usize {
        self.meaning[0].len()
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn utterance(&self, id: UtteranceId) -> &Utterance {
        &self.utterances[id.0]
    }

    pub fn means(&self, u: UtteranceId, p: PropertyId) -> bool {
        self.meaning[u.0][p.0]
    }

    pub fn meaning_row(&self, u: UtteranceId) -> &[bool] {
        &self.meaning[u.0]
    }

    pub fn find(&self, label: &str) -> Option<UtteranceId> {
        self.utterances
            .iter()
            .find(|u| u.label == label)
            .map(|u| u.id)
    }

    pub fn silence(&self) -> Option<UtteranceId> {
        self.utterances
            .iter()
            .find(|u| u.category == Category::Silence)
            .map(|u| u.id)
    }

    /// Utterances that can start at `t` without running past `horizon`.
    pub fn startable(&self, t: usize, horizon: usize) -> impl Iterator<Item = &Utterance> {
        self.utterances
            .iter()
            .filter(move |u| t + u.duration - 1 <= horizon)
    }

    pub fn to_json(&self, space: &PropertySpace) -> Result<String> {
        let doc = LexiconDoc {
            utterances: self.utterances.clone(),
            meaning: self
                .meaning
                .iter()
                .map(|row| {
                    space
                        .ids()
                        .filter(|p| row[p.0])
                        .map(|p| space.label(p))
                        .collect()
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(json: &str, space: &PropertySpace) -> Result<Self> {
        let doc: LexiconDoc = serde_json::from_str(json)?;
        let mut meaning = Vec::with_capacity(doc.meaning.len());
        for labels in &doc.meaning {
            let mut row = vec![false; space.len()];
            for label in labels {
                let p = space
                    .find(label)
                    .ok_or_else(|| Error::validation(format!("unknown property {label}")))?;
                row[p.0] = true;
            }
            meaning.push(row);
        }
        Self::new(doc.utterances, meaning)
    }
}

#[derive(Serialize, Deserialize)]
struct LexiconDoc {
    utterances: Vec<Utterance>,
    meaning: Vec<Vec<String>>,
}

/// 24 drone-and-attribute alerts, 6 attribute-only alerts, Beep and Silence,
/// in that id order.
pub fn build_drone_lexicon(space: &PropertySpace) -> Result<Lexicon> {
    let n = space.len();
    let mut utterances = Vec::new();
    let mut meaning = Vec::new();
    let mut push = |label: String, category: Category, row: Vec<bool>| {
        utterances.push(Utterance {
            id: UtteranceId(utterances.len()),
            label,
            category,
            duration: category.duration(),
        });
        meaning.push(row);
    };
    for id in space.ids() {
        let p = space.property(id);
        let mut row = vec![false; n];
        row[id.0] = true;
        push(
            format!("D{} {}", p.drone, p.attribute.spoken()),
            Category::TwoFeature,
            row,
        );
    }
    for attr in Attribute::ALL {
        let row: Vec<bool> = space
            .properties()
            .iter()
            .map(|p| p.attribute == attr)
            .collect();
        if row.iter().any(|m| *m) {
            push(attr.spoken().to_string(), Category::SingleFeature, row);
        }
    }
    push("Beep".into(), Category::Beep, vec![true; n]);
    push(SILENCE_LABEL.into(), Category::Silence, vec![false; n]);
    Lexicon::new(utterances, meaning)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    Say(UtteranceId),
    Block,
}

/// A full-horizon slot assignment obeying delivery windows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UtteranceSlotSequence {
    slots: Vec<Slot>,
}

impl UtteranceSlotSequence {
    /// Validates that every utterance is followed by exactly `duration - 1`
    /// blocks and that no delivery overruns the sequence end.
    pub fn new(slots: Vec<Slot>, lexicon: &Lexicon) -> Result<Self> {
        let h = slots.len();
        let mut t = 0;
        while t < h {
            match slots[t] {
                Slot::Block => {
                    return Err(Error::IllegalSequence(format!(
                        "slot {} holds (X) outside a delivery window",
                        t + 1
                    )))
                }
                Slot::Say(u) => {
                    if u.0 >= lexicon.len() {
                        return Err(Error::IllegalSequence(format!("unknown utterance {}", u.0)));
                    }
                    let d = lexicon.utterance(u).duration;
                    if t + d > h {
                        return Err(Error::IllegalSequence(format!(
                            "{} at slot {} overruns horizon {h}",
                            lexicon.utterance(u).label,
                            t + 1
                        )));
                    }
                    if slots[t + 1..t + d].iter().any(|s| *s != Slot::Block) {
                        return Err(Error::IllegalSequence(format!(
                            "{} at slot {} is interrupted",
                            lexicon.utterance(u).label,
                            t + 1
                        )));
                    }
                    t += d;
                }
            }
        }
        Ok(Self { slots })
    }

    /// Expands started utterances into slots, inserting blocks.
    pub fn from_utterances(utterances: &[UtteranceId], lexicon: &Lexicon) -> Result<Self> {
        let mut slots = Vec::new();
        for &u in utterances {
            if u.0 >= lexicon.len() {
                return Err(Error::IllegalSequence(format!("unknown utterance {}", u.0)));
            }
            slots.push(Slot::Say(u));
            slots.extend(std::iter::repeat_n(
                Slot::Block,
                lexicon.utterance(u).duration - 1,
            ));
        }
        Self::new(slots, lexicon)
    }

    pub fn from_labels(labels: &[&str], lexicon: &Lexicon) -> Result<Self> {
        let mut slots = Vec::with_capacity(labels.len());
        for label in labels {
            if *label == BLOCK_LABEL {
                slots.push(Slot::Block);
            } else {
                let u = lexicon
                    .find(label)
                    .ok_or_else(|| Error::IllegalSequence(format!("unknown label {label}")))?;
                slots.push(Slot::Say(u));
            }
        }
        Self::new(slots, lexicon)
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// `(t, utterance)` for every initiated utterance, `t` 1-based.
    pub fn starts(&self) -> impl Iterator<Item = (usize, UtteranceId)> + '_ {
        self.slots.iter().enumerate().filter_map(|(i, s)| match s {
            Slot::Say(u) => Some((i + 1, *u)),
            Slot::Block => None,
        })
    }

    pub fn labels(&self, lexicon: &Lexicon) -> Vec<String> {
        self.slots
            .iter()
            .map(|s| match s {
                Slot::Say(u) => lexicon.utterance(*u).label.clone(),
                Slot::Block => BLOCK_LABEL.to_string(),
            })
            .collect()
    }

    /// Slots not holding Silence (blocks count).
    pub fn non_silence_slots(&self, lexicon: &Lexicon) -> usize {
        self.slots
            .iter()
            .filter(|s| match s {
                Slot::Say(u) => lexicon.utterance(*u).category != Category::Silence,
                Slot::Block => true,
            })
            .count()
    }

    pub fn display<'a>(&'a self, lexicon: &'a Lexicon) -> impl fmt::Display + 'a {
        DisplaySeq { seq: self, lexicon }
    }
}

struct DisplaySeq<'a> {
    seq: &'a UtteranceSlotSequence,
    lexicon: &'a Lexicon,
}

impl fmt::Display for DisplaySeq<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.seq.labels(self.lexicon).join(", "))
    }
}

/// Every legal sequence of length `horizon`, in lexicographic order of
/// utterance ids at each free slot.
pub fn legal_sequences(lexicon: &Lexicon, horizon: usize) -> Vec<UtteranceSlotSequence> {
    fn extend(
        lexicon: &Lexicon,
        horizon: usize,
        prefix: &mut Vec<Slot>,
        out: &mut Vec<UtteranceSlotSequence>,
    ) {
        let t = prefix.len() + 1;
        if t > horizon {
            out.push(UtteranceSlotSequence {
                slots: prefix.clone(),
            });
            return;
        }
        for u in lexicon.startable(t, horizon) {
            let mark = prefix.len();
            prefix.push(Slot::Say(u.id));
            prefix.extend(std::iter::repeat_n(Slot::Block, u.duration - 1));
            extend(lexicon, horizon, prefix, out);
            prefix.truncate(mark);
        }
    }
    let mut out = Vec::new();
    extend(lexicon, horizon, &mut Vec::with_capacity(horizon), &mut out);
    out
}

/// Number of legal sequences by the duration recurrence
/// `count(n) = Σ_d |{u : dur(u) = d}| · count(n - d)`, `count(0) = 1`.
pub fn count_legal_sequences(lexicon: &Lexicon, horizon: usize) -> u64 {
    let mut class_size = std::collections::BTreeMap::<usize, u64>::new();
    for u in lexicon.utterances() {
        *class_size.entry(u.duration).or_default() += 1;
    }
    let mut counts = vec![0u64; horizon + 1];
    counts[0] = 1;
    for n in 1..=horizon {
        counts[n] = class_size
            .iter()
            .filter(|(d, _)| **d <= n)
            .map(|(d, size)| size * counts[n - d])
            .sum();
    }
    counts[horizon]
}
