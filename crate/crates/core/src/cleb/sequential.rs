//! Sequential CLEB: one vertex at a time, chosen by a [`Chooser`].

use rand::seq::IndexedRandom;

use crate::arborescence::Arborescence;
use crate::graph::{ContractionStack, DirectedMultigraph, EdgeId, VertexId};
use crate::scalar::Scalar;
use crate::seed::{self, Rng};
use crate::weights::WeightAssignment;

use super::{ClebError, Engine, ExposureLog};

/// Read-only view handed to a chooser.
pub struct ChooserView<'a, 'g> {
    stack: &'a ContractionStack<'g>,
    exposed: &'a dyn Fn(VertexId) -> Option<EdgeId>,
}

impl ChooserView<'_, '_> {
    pub fn stack(&self) -> &ContractionStack<'_> {
        self.stack
    }

    /// Live interior supervertex without an exposed outgoing edge.
    pub fn is_candidate(&self, s: VertexId) -> bool {
        self.stack.is_live_vertex(s) && !self.stack.is_boundary(s) && (self.exposed)(s).is_none()
    }

    pub fn candidates(&self) -> Vec<VertexId> {
        self.stack
            .live_vertices()
            .filter(|s| self.is_candidate(*s))
            .collect()
    }
}

pub trait Chooser {
    /// Next vertex to expose, or `None` to stop.
    fn choose(&mut self, view: &ChooserView<'_, '_>) -> Option<VertexId>;
}

/// Scans base vertices in a fixed order and picks the supervertex of the
/// first one that is still a candidate.
pub struct FixedOrder(pub Vec<VertexId>);

impl FixedOrder {
    pub fn forward(graph: &DirectedMultigraph) -> Self {
        FixedOrder(graph.vertices().collect())
    }

    pub fn reverse(graph: &DirectedMultigraph) -> Self {
        FixedOrder({
            let mut v: Vec<VertexId> = graph.vertices().collect();
            v.reverse();
            v
        })
    }
}

impl Chooser for FixedOrder {
    fn choose(&mut self, view: &ChooserView<'_, '_>) -> Option<VertexId> {
        self.0
            .iter()
            .map(|v| view.stack().find(*v))
            .find(|s| view.is_candidate(*s))
    }
}

/// Uniformly random candidate.
pub struct RandomOrder(Rng);

impl RandomOrder {
    pub fn new(s: u64) -> Self {
        RandomOrder(seed::rng(s))
    }
}

impl Chooser for RandomOrder {
    fn choose(&mut self, view: &ChooserView<'_, '_>) -> Option<VertexId> {
        view.candidates().choose(&mut self.0).copied()
    }
}

impl<F: FnMut(&ChooserView<'_, '_>) -> Option<VertexId>> Chooser for F {
    fn choose(&mut self, view: &ChooserView<'_, '_>) -> Option<VertexId> {
        self(view)
    }
}

/// If exposing `e` out of `v` closed a cycle, the cycle starting with `e`.
pub(crate) fn closed_cycle<S: Scalar>(
    eng: &Engine<'_, S>,
    v: VertexId,
    e: EdgeId,
) -> Option<Vec<EdgeId>> {
    let mut cycle = vec![e];
    let mut x = eng.stack.head(e);
    while x != v {
        let f = eng.exposed(x)?;
        cycle.push(f);
        x = eng.stack.head(f);
    }
    Some(cycle)
}

pub fn sequential_cleb<S: Scalar>(
    graph: &DirectedMultigraph,
    weights: WeightAssignment<S>,
    chooser: &mut dyn Chooser,
) -> Result<(Arborescence, ExposureLog), ClebError> {
    let mut eng = Engine::new(graph, weights);
    loop {
        let pick = {
            let exposed = |s: VertexId| eng.exposed(s);
            let view = ChooserView {
                stack: &eng.stack,
                exposed: &exposed,
            };
            match chooser.choose(&view) {
                None => None,
                Some(v) if view.is_candidate(v) => Some(v),
                Some(v) => return Err(ClebError::BadChooser(v)),
            }
        };
        let Some(v) = pick else { break };
        eng.step += 1;
        let (e, _) = eng.expose(v)?;
        if let Some(cycle) = closed_cycle(&eng, v, e) {
            eng.contract(&cycle)?;
        }
    }
    let msa = eng.finish()?;
    Ok((msa, eng.log))
}
