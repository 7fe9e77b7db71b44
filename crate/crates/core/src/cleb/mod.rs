//! The CLEB algorithm family.
//!
//! All variants share one [`Engine`]: a contraction stack, lazy weights,
//! the currently exposed edge of each supervertex, and a colored log of
//! exposures and contractions.

mod original;
mod sequential;
mod walk;

pub use original::original_cleb;
pub use sequential::{sequential_cleb, Chooser, ChooserView, FixedOrder, RandomOrder};
pub use walk::{
    cleb_walk, cleb_walk_algorithm, recover_branch, walk_connectivity, Branch, Epoch,
    WalkContraction, WalkRecord, WalkStatus,
};

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::arborescence::Arborescence;
use crate::graph::{ContractionError, ContractionStack, DirectedMultigraph, EdgeId, VertexId};
use crate::scalar::Scalar;
use crate::weights::{WeightAssignment, WeightError};

/// Default cap on the number of steps of a single CLEB walk.
pub const DEFAULT_STEP_CAP: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum ClebError {
    #[error("tie between {0} and {1}")]
    TieDetected(EdgeId, EdgeId),
    #[error("{0} cannot reach the boundary")]
    Disconnected(VertexId),
    #[error("chooser returned {0}, which is not a live interior vertex without an exposed edge")]
    BadChooser(VertexId),
    #[error("walk did not reach the boundary")]
    IncompleteWalk,
    #[error("start vertex {0} is on the boundary")]
    BoundaryStart(VertexId),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
}

impl From<WeightError> for ClebError {
    fn from(e: WeightError) -> Self {
        match e {
            WeightError::TieDetected(a, b) => ClebError::TieDetected(a, b),
            WeightError::NoOutgoingEdge(v) => ClebError::Disconnected(v),
            other => unreachable!("weight error outside sampling: {other}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum LogEvent {
    Expose {
        step: u64,
        edge: EdgeId,
        color: u32,
        pi: f64,
    },
    Contract {
        step: u64,
        record: usize,
        supervertex: VertexId,
        cycle: Vec<EdgeId>,
    },
}

/// Exposed edges in order, with colors, interleaved with contractions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExposureLog {
    pub events: Vec<LogEvent>,
}

impl ExposureLog {
    /// Cumulative exposed set in exposure order.
    pub fn exposed(&self) -> Vec<EdgeId> {
        self.events
            .iter()
            .filter_map(|ev| match ev {
                LogEvent::Expose { edge, .. } => Some(*edge),
                _ => None,
            })
            .collect()
    }

    /// Contracted cycles in order.
    pub fn cycles(&self) -> Vec<&[EdgeId]> {
        self.events
            .iter()
            .filter_map(|ev| match ev {
                LogEvent::Contract { cycle, .. } => Some(cycle.as_slice()),
                _ => None,
            })
            .collect()
    }

    /// JSON lines, one per event, with edges written by label.
    pub fn to_json_lines(&self, graph: &DirectedMultigraph) -> String {
        let mut out = String::new();
        for ev in &self.events {
            let line = match ev {
                LogEvent::Expose {
                    step,
                    edge,
                    color,
                    pi,
                } => serde_json::json!({
                    "step": step, "event": "expose", "edge": graph.edge_label(*edge), "color": color, "pi": pi,
                }),
                LogEvent::Contract { step, cycle, .. } => serde_json::json!({
                    "step": step, "event": "contract",
                    "cycle": cycle.iter().map(|e| graph.edge_label(*e)).collect::<Vec<_>>(),
                }),
            };
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

/// The set of (edge, color) pairs exposed during a run.
pub fn colored_exposure_set(log: &ExposureLog) -> BTreeSet<(EdgeId, u32)> {
    log.events
        .iter()
        .filter_map(|ev| match ev {
            LogEvent::Expose { edge, color, .. } => Some((*edge, *color)),
            _ => None,
        })
        .collect()
}

pub(crate) struct Engine<'g, S> {
    pub stack: ContractionStack<'g>,
    pub weights: WeightAssignment<S>,
    exposed: Vec<Option<EdgeId>>,
    color: Vec<u32>,
    edge_color: Vec<u32>,
    pub log: ExposureLog,
    pub step: u64,
}

impl<'g, S: Scalar> Engine<'g, S> {
    pub fn new(graph: &'g DirectedMultigraph, mut weights: WeightAssignment<S>) -> Self {
        weights.reset();
        Engine {
            stack: ContractionStack::new(graph),
            weights,
            exposed: vec![None; graph.num_vertices()],
            color: vec![1; graph.num_vertices()],
            edge_color: vec![0; graph.num_edges()],
            log: ExposureLog::default(),
            step: 0,
        }
    }

    pub fn exposed(&self, s: VertexId) -> Option<EdgeId> {
        self.exposed[s.idx()]
    }

    pub fn edge_color(&self, e: EdgeId) -> u32 {
        self.edge_color[e.idx()]
    }

    /// Live, non-boundary and without an exposed outgoing edge.
    pub fn is_open(&self, s: VertexId) -> bool {
        self.stack.is_live_vertex(s)
            && !self.stack.is_boundary(s)
            && self.exposed[s.idx()].is_none()
    }

    /// Reveals the minimum outgoing edge of `v`; returns it with π_v.
    pub fn expose(&mut self, v: VertexId) -> Result<(EdgeId, S), ClebError> {
        let (e, pi) = self.weights.min_out_subtract(&self.stack, v)?;
        let color = self.color[v.idx()];
        self.exposed[v.idx()] = Some(e);
        self.edge_color[e.idx()] = color;
        self.log.events.push(LogEvent::Expose {
            step: self.step,
            edge: e,
            color,
            pi: pi.as_f64(),
        });
        Ok((e, pi))
    }

    /// Contracts a cycle of exposed edges; returns the record index.
    pub fn contract(&mut self, cycle: &[EdgeId]) -> Result<usize, ClebError> {
        let rec = self.stack.contract(cycle)?;
        self.weights.on_contract(&self.stack, rec);
        let s = self.stack.record(rec).supervertex;
        let color = 1 + cycle
            .iter()
            .map(|e| self.edge_color[e.idx()])
            .max()
            .unwrap_or(0);
        self.exposed.push(None);
        self.color.push(color);
        debug_assert_eq!(self.exposed.len(), s.idx() + 1);
        self.log.events.push(LogEvent::Contract {
            step: self.step,
            record: rec,
            supervertex: s,
            cycle: cycle.to_vec(),
        });
        Ok(rec)
    }

    /// Exposed edges of the live view, uncontracted back to the base graph.
    pub fn finish(&mut self) -> Result<Arborescence, ClebError> {
        let mut arb = Arborescence::new();
        let live: Vec<VertexId> = self.stack.live_vertices().collect();
        for s in live {
            if self.stack.is_boundary(s) {
                continue;
            }
            match self.exposed[s.idx()] {
                Some(e) => {
                    arb.insert(s, e);
                }
                None => return Err(ClebError::Disconnected(s)),
            }
        }
        self.stack.uncontract_all(&mut arb)?;
        Ok(arb)
    }
}
