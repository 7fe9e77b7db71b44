//! Minimal spanning arborescences via the Chu–Liu–Edmonds–Bock (CLEB)
//! algorithm family, the loop-contracting random walk, weighted loop-erased
//! random walks, invasion percolation and wired exhaustions of infinite
//! graphs.
//!
//! Algorithms that only compare and subtract weights are generic over
//! [`Scalar`]; the aliases below fix the two scalar types used in practice.

pub mod arborescence;
pub mod cleb;
pub mod exhaustion;
pub mod fixtures;
pub mod graph;
pub mod instances;
pub mod oracle;
pub mod scalar;
pub mod seed;
pub mod verify;
pub mod walks;
pub mod weights;

pub use arborescence::{connectivity_profile, validate_arborescence, Arborescence, Verdict};
pub use graph::{build_graph, ContractionStack, DirectedMultigraph, EdgeId, VertexId};
pub use scalar::{Scalar, TIE_TOLERANCE};
pub use weights::{sample_weights, WeightAssignment, WeightModel};

/// Exact rational weights for hand-built instances.
pub type Rational = num_rational::Rational64;

/// Floating point weights for random models.
pub type Weights = WeightAssignment<f64>;

/// Exact weights for fixed instances.
pub type ExactWeights = WeightAssignment<Rational>;
