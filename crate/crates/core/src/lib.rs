//! Exact solvers for multi-agent influence diagrams (MAIDs) with imperfect recall.
//!
//! The crate is `no_std` with `alloc`. Every probability, utility and LP
//! coefficient is an exact [`Rational`]; there is no floating point anywhere
//! in the solvers.
//!
//! Module map:
//!
//! * [`model`]: the game data model, validation and the normal-form importer.
//! * [`text`]: the line-oriented game, policy, κ and normal-form codecs.
//! * [`graphs`]: d-separation, s-reachability, mechanised graphs, recall
//!   classification, treewidth, relevance ordering and subdiagrams.
//! * [`inference`]: variable elimination over exact rationals and expected utilities.
//! * [`policies`]: pure, behavioural, mixed and mixture policies.
//! * [`equilibria`]: best responses, Nash checks, backward induction and mixed NE.
//! * [`correlation`]: mediator transforms, CE and MAID-CE programs and verifiers.
//! * [`lp`]: exact two-phase simplex with a Bland's-rule fallback against cycling.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod correlation;
pub mod equilibria;
pub mod error;
pub mod graphs;
pub mod inference;
pub mod lp;
pub mod model;
pub mod policies;
pub mod rational;
pub mod text;

mod par;

pub use error::{Error, Result};
pub use model::{AgentId, Maid, UnitId, VarId, VarKind};
pub use rational::Rational;

/// Default cap on enumerated objects (pure policies, joint profiles, outcomes).
pub const DEFAULT_CAP: u64 = 1 << 20;
