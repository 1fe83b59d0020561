//! Iterative celebrity/spammer scoring for directed social graphs.
//!
//! A node is a *celebrity* when many non-spammers follow it without being
//! followed back, and a *spammer* when it follows many non-celebrities who do
//! not follow back. Both scores are computed jointly by a two-phase fixed-point
//! iteration over the graph's unreciprocated arcs ([`scrank`]); the iteration
//! provably decreases a potential function and so cannot cycle.
//!
//! The same potential argument covers any one-variable-at-a-time iteration of
//! monotone updates over a symmetric linear combination of the other
//! variables; [`muesli`] implements that engine and several instances of it.
//! [`synthgen`] plants celebrities and spammers in random graphs and [`eval`]
//! measures convergence, uniqueness and recovery against the planted truth.

pub mod config;
pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod muesli;
pub mod par;
pub mod scrank;
pub mod special;
pub mod synthgen;
pub mod transfer;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use graph::{
    degree_stats, unreciprocated, ArcSet, DegreeStats, DirectedGraph, GraphSummary, NodeId,
};
pub use muesli::{embed_scrank, muesli_potential, ActivationSequence, MuesliSystem, Weights};
pub use par::{Executor, Parallelism};
pub use scrank::{Init, IterationConfig, Outcome, ScRank, ScoreState};
pub use synthgen::{GeneratorParams, GroundTruth, HModel, PlantedInstance};
pub use transfer::{ScoreKind, SoftStep, TransferFunction, TransferMap};
