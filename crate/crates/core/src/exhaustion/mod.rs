//! Wired exhaustions of infinite graphs: coupled weights, stabilization of
//! the wired MSA, monotone connectivity and LCRW transience diagnostics.

mod family;
mod limits;
mod transience;

pub use family::{FamilyError, GraphFamily, OffspringLaw, MAX_SITES};
pub use limits::{
    component_end_stats, connectivity_monotonicity_check, coupled_weights, wired_msa,
    wired_msa_sequence, ComponentStats, MonotonicityVerdict, MonotonicityViolation, ProbeHistory,
    StabilizationReport,
};
pub use transience::{
    grid_trace, increment_balance, transience_trace, IncrementBalance, TransienceSummary,
};
