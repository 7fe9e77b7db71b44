//! Weight models and lazy π-subtraction.
//!
//! A run never rewrites base weights. Each live edge keeps a `reduced`
//! value and each supervertex an `offset`; the effective weight is
//! `reduced(e) - offset(tail)`. Subtracting π at v only moves `offset(v)`.
//! When a cycle is contracted, the edges leaving it are rebased once:
//! `reduced(e) -= offset(member)`, and the new supervertex starts at 0.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::Ratio;
use rand::Rng as _;
use rand_distr::{Exp1, StandardUniform};
use serde_json::Value;
use thiserror::Error;

use crate::graph::{ContractionStack, DirectedMultigraph, EdgeId, VertexId};
use crate::scalar::{Scalar, TIE_TOLERANCE};
use crate::seed;

/// Exact per-edge values keyed by edge label.
pub type FixedWeights = BTreeMap<u64, Ratio<i64>>;

#[derive(Clone, Debug, PartialEq)]
pub enum WeightModel {
    Exponential,
    Uniform,
    Fixed(FixedWeights),
    /// Base weights w with conductances exp(-β w).
    Boltzmann {
        weights: FixedWeights,
        beta: f64,
    },
}

#[derive(Debug, Error, PartialEq)]
pub enum WeightError {
    #[error("unrecognised weight model '{0}'")]
    BadSpec(String),
    #[error("cannot read weight file: {0}")]
    Io(String),
    #[error("no weight given for edge {0}")]
    MissingWeight(u64),
    #[error("weights of edges {0} and {1} collide")]
    GenericityViolation(u64, u64),
    #[error("{0} has no outgoing edge")]
    NoOutgoingEdge(VertexId),
    #[error("tie between {0} and {1}")]
    TieDetected(EdgeId, EdgeId),
}

fn parse_value(v: &Value) -> Option<Ratio<i64>> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(Ratio::from_integer(i))
            } else {
                Ratio::approximate_float(n.as_f64()?)
            }
        }
        Value::String(s) => match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().ok()?;
                let q: i64 = q.trim().parse().ok()?;
                (q != 0).then(|| Ratio::new(p, q))
            }
            None => parse_value(&serde_json::from_str(s.trim()).ok()?),
        },
        _ => None,
    }
}

/// Parses `{"<edge id>": value, ...}` where a value is a JSON number or a
/// string `"p/q"`. A graph file with inline weights is accepted as well.
pub fn parse_fixed_weights(text: &str) -> Result<FixedWeights, WeightError> {
    let root: Value = serde_json::from_str(text).map_err(|e| WeightError::Io(e.to_string()))?;
    let mut out = FixedWeights::new();
    if let Some(edges) = root.get("edges").and_then(Value::as_array) {
        for e in edges {
            let id = e
                .get("id")
                .and_then(Value::as_u64)
                .ok_or_else(|| WeightError::Io("edge without id".into()))?;
            let w = e
                .get("weight")
                .and_then(parse_value)
                .ok_or(WeightError::MissingWeight(id))?;
            out.insert(id, w);
        }
        return Ok(out);
    }
    let obj = root
        .as_object()
        .ok_or_else(|| WeightError::Io("expected a JSON object".into()))?;
    for (k, v) in obj {
        let id: u64 = k
            .parse()
            .map_err(|_| WeightError::Io(format!("bad edge id '{k}'")))?;
        out.insert(id, parse_value(v).ok_or(WeightError::MissingWeight(id))?);
    }
    Ok(out)
}

pub fn load_fixed_weights(path: &Path) -> Result<FixedWeights, WeightError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| WeightError::Io(format!("{}: {e}", path.display())))?;
    parse_fixed_weights(&text)
}

impl WeightModel {
    /// `exp1 | unif01 | fixed:<path> | boltzmann:<path>:<beta>`
    pub fn parse(spec: &str) -> Result<Self, WeightError> {
        match spec {
            "exp1" => return Ok(WeightModel::Exponential),
            "unif01" => return Ok(WeightModel::Uniform),
            _ => {}
        }
        if let Some(path) = spec.strip_prefix("fixed:") {
            return Ok(WeightModel::Fixed(load_fixed_weights(Path::new(path))?));
        }
        if let Some(rest) = spec.strip_prefix("boltzmann:") {
            let (path, beta) = rest
                .rsplit_once(':')
                .ok_or_else(|| WeightError::BadSpec(spec.into()))?;
            let beta: f64 = beta
                .parse()
                .map_err(|_| WeightError::BadSpec(spec.into()))?;
            return Ok(WeightModel::Boltzmann {
                weights: load_fixed_weights(Path::new(path))?,
                beta,
            });
        }
        Err(WeightError::BadSpec(spec.into()))
    }

    pub fn is_random(&self) -> bool {
        matches!(self, WeightModel::Exponential | WeightModel::Uniform)
    }

    /// The weight of the edge labelled `label`, as a float.
    pub fn edge_weight(&self, seed: u64, label: u64) -> Result<f64, WeightError> {
        match self {
            WeightModel::Exponential => Ok(sample_edge(seed, label, true)),
            WeightModel::Uniform => Ok(sample_edge(seed, label, false)),
            WeightModel::Fixed(w) | WeightModel::Boltzmann { weights: w, .. } => {
                let r = w.get(&label).ok_or(WeightError::MissingWeight(label))?;
                Ok(*r.numer() as f64 / *r.denom() as f64)
            }
        }
    }

    fn edge_scalar<S: Scalar>(&self, seed: u64, label: u64) -> Result<S, WeightError> {
        match self {
            WeightModel::Fixed(w) | WeightModel::Boltzmann { weights: w, .. } => w
                .get(&label)
                .map(S::from_ratio)
                .ok_or(WeightError::MissingWeight(label)),
            _ => Ok(S::from_f64_lossy(self.edge_weight(seed, label)?)),
        }
    }
}

/// One i.i.d. draw keyed by (seed, edge label), independent of query order.
pub fn sample_edge(seed: u64, label: u64, exponential: bool) -> f64 {
    let mut rng = seed::rng(seed::derive(seed, label));
    if exponential {
        rng.sample(Exp1)
    } else {
        rng.sample(StandardUniform)
    }
}

/// Conductances c(e) = exp(-β w(e)).
pub fn conductances(weights: &[f64], beta: f64) -> Vec<f64> {
    weights.iter().map(|w| (-beta * w).exp()).collect()
}

/// Comparisons made during a run and the pairs found within tolerance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GuardLog {
    pub comparisons: u64,
    pub collisions: Vec<(EdgeId, EdgeId)>,
}

#[derive(Clone, Debug)]
pub struct WeightAssignment<S> {
    base: Vec<S>,
    reduced: Vec<S>,
    offset: Vec<S>,
    tolerance: f64,
    guard: GuardLog,
}

impl<S: Scalar> WeightAssignment<S> {
    pub fn new(base: Vec<S>) -> Self {
        WeightAssignment {
            reduced: base.clone(),
            base,
            offset: Vec::new(),
            tolerance: TIE_TOLERANCE,
            guard: GuardLog::default(),
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn base(&self) -> &[S] {
        &self.base
    }

    pub fn base_weight(&self, e: EdgeId) -> &S {
        &self.base[e.idx()]
    }

    pub fn guard_log(&self) -> &GuardLog {
        &self.guard
    }

    /// Drops all run state, keeping the base weights.
    pub fn reset(&mut self) {
        self.reduced.clone_from(&self.base);
        self.offset.clear();
        self.guard = GuardLog::default();
    }

    fn offset_of(&self, s: VertexId) -> S {
        self.offset.get(s.idx()).cloned().unwrap_or_else(S::zero)
    }

    fn set_offset(&mut self, s: VertexId, value: S) {
        if self.offset.len() <= s.idx() {
            self.offset.resize(s.idx() + 1, S::zero());
        }
        self.offset[s.idx()] = value;
    }

    /// Effective weight U_{i,e} of a live edge.
    pub fn effective(&self, stack: &ContractionStack<'_>, e: EdgeId) -> S {
        self.reduced[e.idx()].clone() - self.offset_of(stack.tail(e))
    }

    /// Reveals the minimum outgoing edge of `v` and subtracts π_v from all of
    /// 𝒪(v). The returned edge has effective weight exactly zero.
    pub fn min_out_subtract(
        &mut self,
        stack: &ContractionStack<'_>,
        v: VertexId,
    ) -> Result<(EdgeId, S), WeightError> {
        let out = stack.out_edges(v);
        let mut best: Option<EdgeId> = None;
        let mut second: Option<EdgeId> = None;
        for &e in out {
            match best {
                None => best = Some(e),
                Some(b) => {
                    self.guard.comparisons += 1;
                    if self.reduced[e.idx()] < self.reduced[b.idx()] {
                        second = best;
                        best = Some(e);
                    } else if second.is_none_or(|s| self.reduced[e.idx()] < self.reduced[s.idx()]) {
                        second = Some(e);
                    }
                }
            }
        }
        let best = best.ok_or(WeightError::NoOutgoingEdge(v))?;
        if let Some(s) = second {
            if self.reduced[best.idx()].ties_with(&self.reduced[s.idx()], self.tolerance) {
                self.guard.collisions.push((best, s));
                return Err(WeightError::TieDetected(best, s));
            }
        }
        let old = self.offset_of(v);
        let new = self.reduced[best.idx()].clone();
        let pi = new.clone() - old;
        self.set_offset(v, new);
        Ok((best, pi))
    }

    /// Rebases the weights after `stack` contracted record `rec`.
    pub fn on_contract(&mut self, stack: &ContractionStack<'_>, rec: usize) {
        let r = stack.record(rec);
        for &m in &r.absorbed {
            let off = self.offset_of(m);
            if off.is_zero() {
                continue;
            }
            for &e in stack.out_edges(m) {
                if stack.is_live_edge(e) {
                    self.reduced[e.idx()] = self.reduced[e.idx()].clone() - off.clone();
                }
            }
        }
        self.set_offset(r.supervertex, S::zero());
    }
}

/// Samples base weights for every edge of `graph`. Random models are keyed by
/// (seed, edge label). Fixed models are checked for exact ties between
/// edges sharing a tail.
pub fn sample_weights<S: Scalar>(
    model: &WeightModel,
    graph: &DirectedMultigraph,
    seed: u64,
) -> Result<WeightAssignment<S>, WeightError> {
    let base = graph
        .edge_ids()
        .map(|e| model.edge_scalar(seed, graph.edge_label(e)))
        .collect::<Result<Vec<S>, _>>()?;
    let assign = WeightAssignment::new(base);
    if !model.is_random() {
        if let GenericityVerdict::Collision(a, b) = genericity_guard(graph, &assign, 0.0) {
            return Err(WeightError::GenericityViolation(
                graph.edge_label(a),
                graph.edge_label(b),
            ));
        }
    }
    Ok(assign)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenericityVerdict {
    Ok,
    Collision(EdgeId, EdgeId),
}

/// Flags base weights of edges sharing an interior tail that lie within `tolerance` of
/// each other, then any collision recorded by comparisons during a run.
pub fn genericity_guard<S: Scalar>(
    graph: &DirectedMultigraph,
    assign: &WeightAssignment<S>,
    tolerance: f64,
) -> GenericityVerdict {
    for v in graph.interior() {
        let mut out: Vec<EdgeId> = graph.out_edges(v).to_vec();
        out.sort_by(|a, b| {
            assign.base[a.idx()]
                .partial_cmp(&assign.base[b.idx()])
                .expect("weights are comparable")
        });
        for w in out.windows(2) {
            if assign.base[w[0].idx()].ties_with(&assign.base[w[1].idx()], tolerance) {
                return GenericityVerdict::Collision(w[0], w[1]);
            }
        }
    }
    match assign.guard.collisions.first() {
        Some(&(a, b)) => GenericityVerdict::Collision(a, b),
        None => GenericityVerdict::Ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn fixed_passthrough_and_subtraction() {
        let g = build_graph(&[0, 1], &[1], &[(0, 1), (0, 1)]).unwrap();
        let mut w = FixedWeights::new();
        w.insert(0, Ratio::new(3, 10));
        w.insert(1, Ratio::new(7, 10));
        let mut a: WeightAssignment<Ratio<i64>> =
            sample_weights(&WeightModel::Fixed(w), &g, 0).unwrap();
        let st = ContractionStack::new(&g);
        let (e, pi) = a.min_out_subtract(&st, VertexId(0)).unwrap();
        assert_eq!((e, pi), (EdgeId(0), Ratio::new(3, 10)));
        assert_eq!(a.effective(&st, EdgeId(1)), Ratio::new(2, 5));
        let (e, pi) = a.min_out_subtract(&st, VertexId(0)).unwrap();
        assert_eq!((e, pi), (EdgeId(0), Ratio::from_integer(0)));
    }

    #[test]
    fn parallel_ties_are_flagged() {
        let g = build_graph(&[0, 1], &[1], &[(0, 1), (0, 1)]).unwrap();
        let w: FixedWeights = [(0, Ratio::from_integer(1)), (1, Ratio::from_integer(1))].into();
        assert_eq!(
            sample_weights::<f64>(&WeightModel::Fixed(w), &g, 0).unwrap_err(),
            WeightError::GenericityViolation(0, 1)
        );
    }

    #[test]
    fn contraction_takes_min_over_union() {
        // 0⇄1 with residual exits 1.2 (from 0) and 0.9 (from 1)
        let g = build_graph(&[0, 1, 2], &[2], &[(0, 1), (1, 0), (0, 2), (1, 2)]).unwrap();
        let base: Vec<f64> = vec![1.0, 2.0, 2.2, 2.9];
        let mut a = WeightAssignment::new(base.clone());
        let mut st = ContractionStack::new(&g);
        a.min_out_subtract(&st, VertexId(0)).unwrap();
        a.min_out_subtract(&st, VertexId(1)).unwrap();
        let r = st.contract(&[EdgeId(0), EdgeId(1)]).unwrap();
        a.on_contract(&st, r);
        let s = st.record(r).supervertex;
        let (e, pi) = a.min_out_subtract(&st, s).unwrap();
        assert_eq!(e, EdgeId(3));
        // recomputed directly from the base weights
        let direct = (base[2] - base[0]).min(base[3] - base[1]);
        assert!((pi - direct).abs() < 1e-12);
    }

    #[test]
    fn model_specs_parse() {
        assert_eq!(
            WeightModel::parse("exp1").unwrap(),
            WeightModel::Exponential
        );
        assert_eq!(WeightModel::parse("unif01").unwrap(), WeightModel::Uniform);
        assert!(matches!(
            WeightModel::parse("gauss"),
            Err(WeightError::BadSpec(_))
        ));
        let w = parse_fixed_weights(r#"{"3": 0.25, "4": "1/3"}"#).unwrap();
        assert_eq!(w[&3], Ratio::new(1, 4));
        assert_eq!(w[&4], Ratio::new(1, 3));
    }

    #[test]
    fn sampling_is_keyed_by_label() {
        assert_eq!(sample_edge(9, 17, true), sample_edge(9, 17, true));
        assert_ne!(sample_edge(9, 17, true), sample_edge(9, 18, true));
    }
}
