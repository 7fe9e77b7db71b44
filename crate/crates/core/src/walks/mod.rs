//! Loop-contracting random walk, simple random walk escape probabilities,
//! weighted loop-erased random walk and invasion percolation.

mod escape;
mod invasion;
mod lcrw;
mod wilson;

pub use escape::{lcrw_escape_mc, srw_escape_exact};
pub use invasion::{
    invasion_equivalence_check, invasion_percolation, unoriented_id, InvasionSequence,
    InvasionVerdict,
};
pub use lcrw::{lcrw_equals_cleb_check, lcrw_run, Lcrw, LcrwEvent, LcrwStep, LcrwTrace, TvReport};
pub use wilson::{
    loop_erase, wilson_lerw, wilson_sandwich_trial, BoltzmannConductance, ErasedEdgeReport,
    LerwRun, SandwichReport, SandwichRow, DEFAULT_LERW_STEP_CAP,
};

use thiserror::Error;

use crate::cleb::ClebError;
use crate::graph::{EdgeId, VertexId};

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("harmonic system is singular")]
    SingularSystem,
    #[error("step cap reached before the boundary")]
    StepCapReached,
    #[error("start vertex {0} is on the boundary")]
    BoundaryStart(VertexId),
    #[error("edge {0} and its reversal carry different weights")]
    NotSymmetric(EdgeId),
    #[error("tie between unoriented edges {0} and {1}")]
    TieDetected(u64, u64),
    #[error("conductances must be finite and strictly positive")]
    BadConductance,
    #[error(transparent)]
    Cleb(#[from] ClebError),
}

/// Replica-parallel map over `0..n` in fixed-size chunks; results come
/// back in index order regardless of scheduling.
pub(crate) fn par_chunks<T, F>(n: u64, chunk: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<u64>) -> T + Sync,
{
    use rayon::prelude::*;
    (0..n.div_ceil(chunk))
        .into_par_iter()
        .map(|c| f(c * chunk..((c + 1) * chunk).min(n)))
        .collect()
}
