//! JSON graph files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DirectedMultigraph, GraphBuilder, GraphError};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFileEdge {
    pub id: u64,
    pub tail: u64,
    pub head: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<u64>,
    pub boundary: Vec<u64>,
    pub edges: Vec<GraphFileEdge>,
}

impl GraphFile {
    pub fn build(&self) -> Result<DirectedMultigraph, GraphError> {
        let mut b = GraphBuilder::new();
        for &v in &self.vertices {
            b.add_vertex(v, false)?;
        }
        for &v in &self.boundary {
            b.set_boundary(v)?;
        }
        for e in &self.edges {
            b.add_edge(e.id, e.tail, e.head)?;
        }
        b.build()
    }

    /// Inline weights keyed by edge label, if every edge carries one.
    pub fn weights(&self) -> Option<BTreeMap<u64, f64>> {
        self.edges
            .iter()
            .map(|e| e.weight.map(|w| (e.id, w)))
            .collect()
    }

    pub fn from_graph(graph: &DirectedMultigraph, weights: Option<&[f64]>) -> Self {
        GraphFile {
            vertices: graph.vertices().map(|v| graph.vertex_label(v)).collect(),
            boundary: graph
                .boundary()
                .iter()
                .map(|v| graph.vertex_label(*v))
                .collect(),
            edges: graph
                .edge_ids()
                .map(|e| GraphFileEdge {
                    id: graph.edge_label(e),
                    tail: graph.vertex_label(graph.tail(e)),
                    head: graph.vertex_label(graph.head(e)),
                    weight: weights.map(|w| w[e.idx()]),
                })
                .collect(),
        }
    }
}

pub fn parse_graph(text: &str) -> Result<(DirectedMultigraph, GraphFile), GraphError> {
    let file: GraphFile =
        serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
    Ok((file.build()?, file))
}

pub fn load_graph(path: &Path) -> Result<(DirectedMultigraph, GraphFile), GraphError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| GraphError::Format(format!("{}: {e}", path.display())))?;
    parse_graph(&text)
}

pub fn save_graph(graph: &DirectedMultigraph, weights: Option<&[f64]>) -> String {
    serde_json::to_string_pretty(&GraphFile::from_graph(graph, weights)).expect("graph serialises")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"vertices":[0,1,2],"boundary":[2],
            "edges":[{"id":4,"tail":0,"head":1,"weight":0.5},{"id":9,"tail":1,"head":2,"weight":1.5}]}"#;
        let (g, f) = parse_graph(text).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(f.weights().unwrap()[&9], 1.5);
        let again = save_graph(&g, Some(&[0.5, 1.5]));
        let (h, _) = parse_graph(&again).unwrap();
        assert_eq!(h.edge_labels(), g.edge_labels());
    }

    #[test]
    fn loader_rejects_duplicates_and_loops() {
        let dup = r#"{"vertices":[0,1],"boundary":[1],
            "edges":[{"id":1,"tail":0,"head":1},{"id":1,"tail":0,"head":1}]}"#;
        assert_eq!(
            parse_graph(dup).unwrap_err(),
            GraphError::DuplicateEdgeId(1)
        );
        let lp = r#"{"vertices":[0,1],"boundary":[1],"edges":[{"id":1,"tail":0,"head":0}]}"#;
        assert_eq!(parse_graph(lp).unwrap_err(), GraphError::SelfLoop(1));
    }
}
