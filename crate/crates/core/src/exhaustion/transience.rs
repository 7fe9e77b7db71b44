//! LCRW runs on realized families.

use serde::Serialize;

use crate::cleb::WalkStatus;
use crate::graph::DirectedMultigraph;
use crate::seed;
use crate::walks::{Lcrw, LcrwEvent, LcrwTrace};

use super::{FamilyError, GraphFamily};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransienceSummary {
    pub steps: usize,
    pub returns_to_empty: usize,
    pub max_path_len: u32,
    pub final_path_len: u32,
    pub censored: bool,
}

impl TransienceSummary {
    pub fn of(trace: &LcrwTrace) -> Self {
        TransienceSummary {
            steps: trace.steps.len(),
            returns_to_empty: trace.returns_to_empty(),
            max_path_len: trace.max_path_len(),
            final_path_len: trace.steps.last().map_or(0, |s| s.path_len),
            censored: trace.status != WalkStatus::HitBoundary,
        }
    }
}

/// One LCRW on the wired ball of `radius` from site `start`.
pub fn transience_trace(
    family: &GraphFamily,
    radius: u64,
    start: u64,
    step_cap: u64,
    s: u64,
) -> Result<(DirectedMultigraph, LcrwTrace, TransienceSummary), FamilyError> {
    let g = family.realize(radius)?;
    let v = g
        .vertex_by_label(start)
        .filter(|v| !g.is_boundary(*v))
        .ok_or_else(|| {
            FamilyError::BadParameters(format!("start site {start} is outside the ball"))
        })?;
    let trace = Lcrw::new(&g).run(v, step_cap, &mut seed::rng(s), false);
    let summary = TransienceSummary::of(&trace);
    Ok((g, trace, summary))
}

/// LCRW from the centre of a `side`×`side` box of ℤ² (`side` is rounded up
/// to an odd number) as CSV `step,event,path_len,cycle_len,x,y`.
pub fn grid_trace(
    side: u64,
    step_cap: u64,
    s: u64,
) -> Result<(String, TransienceSummary), FamilyError> {
    let fam = GraphFamily::LatticeBox { d: 2 };
    let (g, trace, summary) = transience_trace(&fam, side / 2, fam.origin(), step_cap, s)?;
    let site = |v| {
        let label = g.vertex_label(v);
        match fam.coords(label) {
            Some(c) if !g.is_boundary(v) => (c[0], c[1]),
            _ => (i64::MIN, i64::MIN),
        }
    };
    Ok((trace.to_csv(&g, Some(&site)), summary))
}

/// Counts of +1 and -1 path-length increments taken while the path is
/// nonempty, and the χ² statistic against equal frequencies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IncrementBalance {
    pub up: u64,
    pub down: u64,
    /// Increments other than ±1.
    pub other: u64,
    pub chi_square: f64,
}

pub fn increment_balance<'a>(
    traces: impl IntoIterator<Item = &'a LcrwTrace>,
    limit: u64,
) -> IncrementBalance {
    let (mut up, mut down, mut other) = (0u64, 0u64, 0u64);
    'outer: for t in traces {
        let mut prev = 0u32;
        for s in &t.steps {
            if up + down + other >= limit {
                break 'outer;
            }
            if prev >= 1 {
                match (s.event, s.path_len as i64 - prev as i64) {
                    (LcrwEvent::Extend, 1) => up += 1,
                    (LcrwEvent::Contract(_), -1) => down += 1,
                    _ => other += 1,
                }
            }
            prev = s.path_len;
        }
    }
    let n = (up + down) as f64;
    let chi_square = if n > 0.0 {
        (up as f64 - down as f64).powi(2) / n
    } else {
        0.0
    };
    IncrementBalance {
        up,
        down,
        other,
        chi_square,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_increments_are_unit() {
        let fam = GraphFamily::PathSegment;
        let (_, trace, summary) = transience_trace(&fam, 20, 0, 100_000, 5).unwrap();
        assert!(!summary.censored);
        let b = increment_balance([&trace], u64::MAX);
        assert_eq!(b.other, 0);
    }

    #[test]
    fn grid_trace_has_coordinates() {
        let (csv, _) = grid_trace(11, 50, 1).unwrap();
        assert!(csv.starts_with("step,event,path_len,cycle_len,x,y\n1,extend,1,0,"));
    }
}
