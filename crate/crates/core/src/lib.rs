//! Multi-objective evolutionary search driven by the R2 indicator, with a
//! double-deep-Q-network agent that picks which evolutionary operator to run
//! each generation.
//!
//! The crate is organized bottom-up:
//!
//! - [`rng`]: one root seed, per-purpose deterministic streams.
//! - [`types`]: individuals, populations, bounds, run configuration.
//! - [`problems`]: the ten UF benchmark problems with analytic front samplers.
//! - [`r2rank`]: weight vectors, achievement scalarizing function, the R2
//!   indicator, population ranking, and reference-point adaptation.
//! - [`operators`]: the five single-objective operators (EO, WOA, TLBO, ES,
//!   GA) lifted to the ranked-population setting.
//! - [`agent`]: the Q-network, replay buffer, action selection, schedules,
//!   and checkpoint serialization.
//! - [`env`]: the per-generation RL loop: state encoding, reward, episodes.
//! - [`metrics`]: IGD, spacing, run summaries, the Friedman test.
//! - [`harness`]: training, evaluation, comparison runs, CSV reports, and
//!   SVG plots.

pub mod agent;
pub mod env;
pub mod harness;
pub mod metrics;
pub mod operators;
pub mod problems;
pub mod r2rank;
pub mod rng;
pub mod types;

pub use problems::{Problem, ProblemId};
pub use types::{Bounds, Individual, Population, RunConfig};
