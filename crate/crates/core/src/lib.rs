//! Generalized Naive Bayes classifiers.
//!
//! A Generalized Naive Bayes (GNB) model is an order-3 cherry junction tree in
//! which every cluster contains the class variable: the attributes form a tree,
//! and each attribute is attached to the class and to one earlier attribute
//! (its *mother*). The crate learns such structures from discrete data, either
//! greedily ([`learn::learn_gnb_a`]) or optimally among structures that contain
//! the most informative triplet ([`learn::learn_gnb_o`], via a maximum-weight
//! arborescence), parameterizes them by maximum likelihood and classifies rows
//! with a zero-probability backoff.
//!
//! Naive Bayes and TAN baselines, quantile discretization, evaluation metrics
//! and feature-importance curves are included so that the whole experimental
//! protocol can be driven from the library or from the `gnb` binary.
//!
//! All information quantities are measured in bits.

pub mod arborescence;
pub mod classify;
pub mod cli;
pub mod data;
pub mod empirical;
pub mod error;
pub mod evaluation;
pub mod featsel;
pub mod learn;
pub mod metrics;
pub mod structure;

pub use classify::{GnbModel, Posterior};
pub use data::{DiscreteTable, DiscretizationSpec, RawTable};
pub use empirical::{EmpiricalDist, VarSet};
pub use error::{GnbError, Result};
pub use learn::{Algorithm, LearnTrace, ScoreMatrix};
pub use metrics::{ConfusionMatrix, EvalReport};
pub use structure::{Arborescence, GnbStructure, ModelStructure, NbStructure};

/// Version tag written into every machine-readable output.
pub const SCHEMA_VERSION: u32 = 1;
