//! Original CLEB: expose every vertex at once, contract one zero-weight
//! cycle, repeat.

use crate::arborescence::Arborescence;
use crate::graph::{DirectedMultigraph, EdgeId, VertexId};
use crate::scalar::Scalar;
use crate::weights::WeightAssignment;

use super::{ClebError, Engine, ExposureLog};

/// The cycle of the exposed functional graph through the lowest-numbered
/// live supervertex lying on any cycle, listed from that vertex.
fn lowest_cycle<S: Scalar>(eng: &Engine<'_, S>) -> Option<Vec<EdgeId>> {
    let stack = &eng.stack;
    let next = |s: VertexId| eng.exposed(s).map(|e| stack.head(e));
    let mut state = vec![0u32; stack.id_bound()];
    let mut best: Option<VertexId> = None;
    for (round, s) in stack.live_vertices().enumerate() {
        let tag = round as u32 + 1;
        let mut x = s;
        while state[x.idx()] == 0 {
            state[x.idx()] = tag;
            match next(x) {
                Some(h) => x = h,
                None => break,
            }
        }
        if state[x.idx()] == tag && next(x).is_some() {
            // x is on a cycle first discovered in this round
            let mut lowest = x;
            let mut y = next(x).expect("on a cycle");
            while y != x {
                lowest = lowest.min(y);
                y = next(y).expect("on a cycle");
            }
            best = Some(best.map_or(lowest, |b| b.min(lowest)));
        }
    }
    let start = best?;
    let mut cycle = Vec::new();
    let mut y = start;
    loop {
        let e = eng.exposed(y).expect("on a cycle");
        cycle.push(e);
        y = stack.head(e);
        if y == start {
            return Some(cycle);
        }
    }
}

pub fn original_cleb<S: Scalar>(
    graph: &DirectedMultigraph,
    weights: WeightAssignment<S>,
) -> Result<(Arborescence, ExposureLog), ClebError> {
    let mut eng = Engine::new(graph, weights);
    loop {
        eng.step += 1;
        let open: Vec<VertexId> = eng
            .stack
            .live_vertices()
            .filter(|s| eng.is_open(*s))
            .collect();
        for s in open {
            eng.expose(s)?;
        }
        match lowest_cycle(&eng) {
            Some(cycle) => {
                eng.contract(&cycle)?;
            }
            None => break,
        }
    }
    let msa = eng.finish()?;
    Ok((msa, eng.log))
}
