//! Infinite graph families and their wired finite realizations.
//!
//! Every family names its sites and unoriented edges by stable 64-bit
//! codes, so a site or edge keeps its label at every radius. Unoriented
//! edge `id` joining `(a, b)` is realized as `a→b` with label `2·id` and
//! `b→a` with label `2·id+1`.

use std::collections::{HashMap, VecDeque};

use rand::Rng as _;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{wire_boundary, DirectedMultigraph, GraphBuilder, GraphError, VertexId};
use crate::seed;

/// Realizations with more sites than this are refused.
pub const MAX_SITES: usize = 4_000_000;

const COORD_BITS: u32 = 16;
const COORD_OFFSET: i64 = 1 << 15;
const SUBDIVISION_TAG: u64 = 1 << 63;

#[derive(Debug, Error, PartialEq)]
pub enum FamilyError {
    #[error("realization would exceed {MAX_SITES} sites")]
    TooLarge,
    #[error("bad family parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase")]
pub enum OffspringLaw {
    /// P(Z = k) = (1-p)^(k-1) p for k ≥ 1.
    Geometric {
        p: f64,
    },
    Fixed {
        children: u32,
    },
}

impl OffspringLaw {
    fn sample(&self, rng: &mut seed::Rng) -> u32 {
        match self {
            OffspringLaw::Geometric { p } => {
                1 + Geometric::new(*p).expect("checked parameter").sample(rng) as u32
            }
            OffspringLaw::Fixed { children } => *children,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphFamily {
    /// ℤ^d; the ball of radius r is the box [-r, r]^d.
    LatticeBox {
        d: u32,
    },
    /// Rooted tree where every vertex has `arity` children.
    RegularTree {
        arity: u32,
    },
    /// Each edge of `base` replaced by a path of length in {1, …, max_len},
    /// drawn once per edge from `seed`.
    BoundedSubdivision {
        base: Box<GraphFamily>,
        max_len: u32,
        seed: u64,
    },
    GaltonWatson {
        law: OffspringLaw,
        seed: u64,
    },
    /// ℤ.
    PathSegment,
}

/// Undirected site graph: sites with their distance from the origin, and
/// edges `(a, b, id)`.
#[derive(Default)]
struct SiteGraph {
    sites: Vec<(u64, u64)>,
    edges: Vec<(u64, u64, u64)>,
}

fn zigzag(i: i64) -> u64 {
    ((i << 1) ^ (i >> 63)) as u64
}

fn unzigzag(z: u64) -> i64 {
    ((z >> 1) as i64) ^ -((z & 1) as i64)
}

fn pack(coords: &[i64]) -> u64 {
    coords.iter().rev().fold(0u64, |acc, c| {
        (acc << COORD_BITS) | (c + COORD_OFFSET) as u64
    })
}

fn unpack(code: u64, d: u32) -> Vec<i64> {
    (0..d)
        .map(|j| ((code >> (COORD_BITS * j)) & 0xFFFF) as i64 - COORD_OFFSET)
        .collect()
}

impl GraphFamily {
    /// Parses `path`, `tree:<arity>`, `lattice:<d>`, `gw:geom:<p>:<seed>`,
    /// `gw:fixed:<k>:<seed>` or `subdiv:<M>:<seed>:<base spec>`.
    pub fn parse(spec: &str) -> Result<Self, FamilyError> {
        let bad = || FamilyError::BadParameters(spec.to_string());
        let parts: Vec<&str> = spec.splitn(4, ':').collect();
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
        let fam = match parts.as_slice() {
            ["path"] => GraphFamily::PathSegment,
            ["tree", a] => GraphFamily::RegularTree {
                arity: num(a)? as u32,
            },
            ["lattice", d] => GraphFamily::LatticeBox { d: num(d)? as u32 },
            ["gw", "geom", p, s] => GraphFamily::GaltonWatson {
                law: OffspringLaw::Geometric {
                    p: p.parse().map_err(|_| bad())?,
                },
                seed: num(s)?,
            },
            ["gw", "fixed", k, s] => GraphFamily::GaltonWatson {
                law: OffspringLaw::Fixed {
                    children: num(k)? as u32,
                },
                seed: num(s)?,
            },
            ["subdiv", m, s, base] => GraphFamily::BoundedSubdivision {
                base: Box::new(GraphFamily::parse(base)?),
                max_len: num(m)? as u32,
                seed: num(s)?,
            },
            _ => return Err(bad()),
        };
        fam.validate()?;
        Ok(fam)
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        let bad = |m: &str| Err(FamilyError::BadParameters(m.into()));
        match self {
            GraphFamily::LatticeBox { d } if !(1..=3).contains(d) => {
                bad("lattice dimension must be 1, 2 or 3")
            }
            GraphFamily::RegularTree { arity } if *arity < 1 => bad("arity must be positive"),
            GraphFamily::GaltonWatson {
                law: OffspringLaw::Geometric { p },
                ..
            } if !(*p > 0.0 && *p <= 1.0) => bad("geometric parameter must lie in (0, 1]"),
            GraphFamily::GaltonWatson {
                law: OffspringLaw::Fixed { children: 0 },
                ..
            } => bad("offspring must be at least 1"),
            GraphFamily::BoundedSubdivision { base, max_len, .. } => {
                if *max_len < 1 {
                    return bad("subdivision length bound must be positive");
                }
                base.validate()
            }
            _ => Ok(()),
        }
    }

    /// Label of the origin site.
    pub fn origin(&self) -> u64 {
        match self {
            GraphFamily::LatticeBox { d } => pack(&vec![0; *d as usize]),
            GraphFamily::BoundedSubdivision { base, .. } => base.origin(),
            _ => 0,
        }
    }

    /// Lattice coordinates of a site label, for lattice families.
    pub fn coords(&self, site: u64) -> Option<Vec<i64>> {
        match self {
            GraphFamily::LatticeBox { d } => Some(unpack(site, *d)),
            GraphFamily::PathSegment => Some(vec![unzigzag(site)]),
            _ => None,
        }
    }

    /// Site label of a lattice point (or of an integer on ℤ).
    pub fn lattice_site(&self, coords: &[i64]) -> Option<u64> {
        match self {
            GraphFamily::LatticeBox { d } if coords.len() == *d as usize => coords
                .iter()
                .all(|c| c.abs() < COORD_OFFSET)
                .then(|| pack(coords)),
            GraphFamily::PathSegment if coords.len() == 1 => Some(zigzag(coords[0])),
            _ => None,
        }
    }

    /// Heap index of the tree vertex reached from the root by `path`
    /// (child positions), for regular trees.
    pub fn tree_site(&self, path: &[u32]) -> Option<u64> {
        match self {
            GraphFamily::RegularTree { arity } => Some(
                path.iter()
                    .fold(0u64, |v, c| v * *arity as u64 + 1 + *c as u64),
            ),
            _ => None,
        }
    }

    /// Sites and edges up to distance `depth` from the origin.
    fn sites(&self, depth: u64) -> Result<SiteGraph, FamilyError> {
        match self {
            GraphFamily::PathSegment => {
                let r = depth as i64;
                let mut g = SiteGraph::default();
                for i in -r..=r {
                    g.sites.push((zigzag(i), i.unsigned_abs()));
                    if i < r {
                        g.edges.push((zigzag(i), zigzag(i + 1), zigzag(i)));
                    }
                }
                Ok(g)
            }
            GraphFamily::LatticeBox { d } => lattice_sites(*d, depth),
            GraphFamily::RegularTree { arity } => {
                let arity = *arity as u64;
                tree_sites(depth, |v| (1..=arity).map(|k| v * arity + k).collect())
            }
            GraphFamily::GaltonWatson { law, seed: s } => tree_sites(depth, |v| {
                let z = law.sample(&mut seed::rng(seed::derive(*s, v)));
                (1..=z as u64)
                    .map(|k| (seed::derive(v, k) >> 2).max(1))
                    .collect()
            }),
            GraphFamily::BoundedSubdivision {
                base,
                max_len,
                seed: s,
            } => {
                let inner = base.sites(depth + 1)?;
                let mut g = SiteGraph {
                    sites: inner.sites.iter().map(|(v, _)| (*v, 0)).collect(),
                    ..Default::default()
                };
                for &(a, b, id) in &inner.edges {
                    let len = 1 + seed::rng(seed::derive(*s, id)).random_range(0..*max_len as u64);
                    if len == 1 {
                        g.edges.push((a, b, id));
                        continue;
                    }
                    let mut prev = a;
                    for k in 1..=len {
                        let next = if k == len {
                            b
                        } else {
                            let site = SUBDIVISION_TAG | (seed::derive(id, k) >> 1);
                            g.sites.push((site, 0));
                            site
                        };
                        g.edges
                            .push((prev, next, seed::derive(id ^ SUBDIVISION_TAG, k) >> 2));
                        prev = next;
                    }
                }
                bfs_depths(&mut g, base.origin(), depth);
                Ok(g)
            }
        }
    }

    /// The wired graph G_r^w: sites within distance `radius` of the origin,
    /// everything farther identified into one boundary vertex.
    pub fn realize(&self, radius: u64) -> Result<DirectedMultigraph, FamilyError> {
        self.validate()?;
        let sg = self.sites(radius + 1)?;
        if sg.sites.len() > MAX_SITES {
            return Err(FamilyError::TooLarge);
        }
        let mut b = GraphBuilder::new();
        let mut ids: HashMap<u64, VertexId> = HashMap::with_capacity(sg.sites.len());
        let mut kept = Vec::new();
        for &(site, depth) in &sg.sites {
            if depth > radius + 1 {
                continue;
            }
            let v = b.add_vertex(site, false)?;
            ids.insert(site, v);
            if depth <= radius {
                kept.push(v);
            }
        }
        for &(x, y, id) in &sg.edges {
            if let (Some(&a), Some(&c)) = (ids.get(&x), ids.get(&y)) {
                b.add_edge_ids(2 * id, a, c)?;
                b.add_edge_ids(2 * id + 1, c, a)?;
            }
        }
        Ok(wire_boundary(&b.build_unrooted(), &kept)?)
    }
}

fn lattice_sites(d: u32, depth: u64) -> Result<SiteGraph, FamilyError> {
    let r = depth as i64;
    if r >= COORD_OFFSET {
        return Err(FamilyError::TooLarge);
    }
    let side = (2 * r + 1) as usize;
    if side.checked_pow(d).is_none_or(|n| n > MAX_SITES) {
        return Err(FamilyError::TooLarge);
    }
    let mut g = SiteGraph::default();
    let mut x = vec![-r; d as usize];
    loop {
        let code = pack(&x);
        g.sites
            .push((code, x.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)));
        for j in 0..d as usize {
            if x[j] < r {
                let mut y = x.clone();
                y[j] += 1;
                g.edges.push((code, pack(&y), code * d as u64 + j as u64));
            }
        }
        // odometer increment
        let mut j = 0;
        while j < d as usize && x[j] == r {
            x[j] = -r;
            j += 1;
        }
        if j == d as usize {
            break;
        }
        x[j] += 1;
    }
    Ok(g)
}

/// BFS generation of a rooted tree from site 0. Edge ids are child labels,
/// oriented child → parent.
fn tree_sites(depth: u64, children: impl Fn(u64) -> Vec<u64>) -> Result<SiteGraph, FamilyError> {
    let mut g = SiteGraph::default();
    g.sites.push((0, 0));
    let mut frontier = vec![0u64];
    for level in 1..=depth {
        let mut next = Vec::new();
        for &v in &frontier {
            for c in children(v) {
                g.sites.push((c, level));
                g.edges.push((c, v, c));
                next.push(c);
            }
        }
        if g.sites.len() > MAX_SITES {
            return Err(FamilyError::TooLarge);
        }
        frontier = next;
    }
    Ok(g)
}

/// Recomputes site depths as graph distance from `origin`, marking
/// unreachable or too distant sites with `u64::MAX`.
fn bfs_depths(g: &mut SiteGraph, origin: u64, limit: u64) {
    let mut adj: HashMap<u64, Vec<u64>> = HashMap::new();
    for &(a, b, _) in &g.edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut dist: HashMap<u64, u64> = HashMap::from([(origin, 0)]);
    let mut queue = VecDeque::from([origin]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[&v];
        if dv == limit {
            continue;
        }
        for &w in adj.get(&v).into_iter().flatten() {
            if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(w) {
                slot.insert(dv + 1);
                queue.push_back(w);
            }
        }
    }
    for s in &mut g.sites {
        s.1 = dist.get(&s.0).copied().unwrap_or(u64::MAX);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_is_wired_at_both_ends() {
        let g = GraphFamily::PathSegment.realize(3).unwrap();
        // -3..=3 plus ∂
        assert_eq!(g.num_vertices(), 8);
        assert_eq!(g.boundary().len(), 1);
        let d = g.boundary()[0];
        assert_eq!(
            g.vertices()
                .filter(|v| g.out_edges(*v).iter().any(|e| g.head(*e) == d))
                .count(),
            2
        );
    }

    #[test]
    fn binary_tree_leaves_are_wired() {
        let g = GraphFamily::RegularTree { arity: 2 }.realize(3).unwrap();
        assert_eq!(g.num_vertices(), 15 + 1);
        // 15 tree edges plus 16 edges into ∂, both orientations
        assert_eq!(g.num_edges(), 2 * (14 + 16));
    }

    #[test]
    fn labels_are_stable_across_radii() {
        for fam in [
            GraphFamily::PathSegment,
            GraphFamily::RegularTree { arity: 3 },
            GraphFamily::LatticeBox { d: 2 },
            GraphFamily::GaltonWatson {
                law: OffspringLaw::Geometric { p: 0.5 },
                seed: 9,
            },
            GraphFamily::parse("subdiv:3:4:tree:2").unwrap(),
        ] {
            let small = fam.realize(2).unwrap();
            let large = fam.realize(4).unwrap();
            for e in small.edge_ids() {
                let (t, h) = (small.tail(e), small.head(e));
                if small.is_boundary(t) || small.is_boundary(h) {
                    continue;
                }
                let f = large
                    .edge_by_label(small.edge_label(e))
                    .expect("edge survives");
                assert_eq!(large.vertex_label(large.tail(f)), small.vertex_label(t));
                assert_eq!(large.vertex_label(large.head(f)), small.vertex_label(h));
            }
        }
    }

    #[test]
    fn galton_watson_is_reproducible() {
        let fam = GraphFamily::parse("gw:geom:0.5:17").unwrap();
        let (a, b) = (fam.realize(6).unwrap(), fam.realize(6).unwrap());
        assert_eq!(a.edge_labels(), b.edge_labels());
        // no vertex without children: every kept site has an edge away from the root
        assert!(a.num_vertices() >= 8);
    }

    #[test]
    fn lattice_coordinates_round_trip() {
        let fam = GraphFamily::LatticeBox { d: 2 };
        let s = fam.lattice_site(&[-3, 7]).unwrap();
        assert_eq!(fam.coords(s).unwrap(), vec![-3, 7]);
        assert_eq!(fam.realize(1).unwrap().num_vertices(), 9 + 1);
    }
}
