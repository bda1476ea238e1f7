//! Dynamic pragmatic alert planning.
//!
//! A simulated assistant watches a fleet of drones and chooses which alert to
//! speak at each timestep. Listeners are modelled with a depth-two Rational
//! Speech Acts stack (literal speaker, pragmatic listener), their beliefs are
//! tracked over time, and alert sequences are chosen either greedily or by
//! exhaustive finite-horizon search under multi-step delivery constraints.
//!
//! Module map:
//! - [`world`]: property space, criticality regions, scenario generation.
//! - [`lexicon`]: utterances, meaning matrix, durations, legal slot sequences.
//! - [`pragmatics`]: listeners, user prior, attention, belief update, reward.
//! - [`user_model`]: simulated users' initial beliefs.
//! - [`planner`]: the four speaker variants and sequence evaluation.
//! - [`harness`]: batch experiments, metrics, figure tables, CLI plumbing.

pub mod error;
pub mod harness;
pub mod lexicon;
pub mod planner;
pub mod pragmatics;
pub mod user_model;
pub mod world;

pub use error::{Error, Result};
