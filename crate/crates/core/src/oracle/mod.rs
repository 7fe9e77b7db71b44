//! Brute-force ground truth for small instances.

mod enumerate;
mod perturb;
mod probability;

pub use enumerate::{
    brute_force_msa, enumerate_arborescences, enumerate_edge_sets, matrix_tree_count, minimum_index,
};
pub use perturb::{
    eligible_perturbation, perturb_and_verify, PerturbMode, PerturbVerdict, PerturbationCase,
};
pub use probability::{
    distribution_report, kruskal, msa_event_probability, Estimate, InstanceDistributionReport,
};

use thiserror::Error;

use crate::cleb::ClebError;
use crate::graph::EdgeId;

/// Default cap on the product of out-degrees an enumeration may face.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance too large to enumerate ({0} candidate maps)")]
    TooLarge(u64),
    #[error("no spanning arborescence exists")]
    NoArborescence,
    #[error("tie between arborescences {0} and {1}")]
    TieDetected(usize, usize),
    #[error("target is not a spanning arborescence of the instance")]
    BadTarget,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("edge {0} is not in the instance")]
    UnknownEdge(EdgeId),
    #[error(transparent)]
    Cleb(#[from] ClebError),
    #[error("weight model: {0}")]
    Weights(String),
}
