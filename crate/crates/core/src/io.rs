//! JSON graph documents.
//!
//! ```text
//! {"name": "Q2", "vertices": ["", "1", "2", "12"],
//!  "edges": [{"u": "", "v": "1", "w": 1}, ...], "start": ""}
//! ```
//!
//! Edges name their endpoints by vertex label. Saved documents list edges in
//! canonical order.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::LoadError;
use crate::game::GameGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    pub start: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub u: String,
    pub v: String,
    pub w: i64,
}

impl GraphDoc {
    pub fn from_graph(graph: &GameGraph) -> Self {
        Self {
            name: graph.name().to_string(),
            vertices: graph.vertices().to_vec(),
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    u: graph.label(e.u).to_string(),
                    v: graph.label(e.v).to_string(),
                    w: i64::from(e.weight),
                })
                .collect(),
            start: graph.label(graph.start()).to_string(),
        }
    }

    pub fn into_graph(self) -> Result<GameGraph, LoadError> {
        let mut edges = Vec::with_capacity(self.edges.len());
        let lookup: std::collections::HashMap<&str, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        for (i, e) in self.edges.iter().enumerate() {
            let u = *lookup
                .get(e.u.as_str())
                .ok_or_else(|| LoadError::UnknownLabel {
                    edge: i,
                    label: e.u.clone(),
                })?;
            let v = *lookup
                .get(e.v.as_str())
                .ok_or_else(|| LoadError::UnknownLabel {
                    edge: i,
                    label: e.v.clone(),
                })?;
            let w = u32::try_from(e.w)
                .ok()
                .filter(|&w| w >= 1)
                .ok_or(LoadError::NonPositiveWeight { edge: i })?;
            edges.push((u, v, w));
        }
        let start = *lookup
            .get(self.start.as_str())
            .ok_or_else(|| LoadError::UnknownStart(self.start.clone()))?;
        Ok(GameGraph::new(self.name, self.vertices, edges, start)?)
    }
}

pub fn parse_graph(text: &str) -> Result<GameGraph, LoadError> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|e| LoadError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.into_graph()
}

pub fn load_graph<R: Read>(mut reader: R) -> Result<GameGraph, LoadError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_graph(&text)
}

pub fn graph_to_string(graph: &GameGraph) -> String {
    let mut out = serde_json::to_string_pretty(&GraphDoc::from_graph(graph))
        .expect("graph documents always serialize");
    out.push('\n');
    out
}

pub fn save_graph<W: Write>(graph: &GameGraph, mut writer: W) -> std::io::Result<()> {
    writer.write_all(graph_to_string(graph).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::diamond;
    use crate::hypercube::{generate_hypercube, CubeSpec};
    use proptest::prelude::*;

    const DIAMOND: &str = r#"{"name": "diamond", "vertices": ["v1", "v2", "v3", "v4"],
        "edges": [{"u": "v1", "v": "v2", "w": 2}, {"u": "v1", "v": "v4", "w": 5},
                  {"u": "v2", "v": "v3", "w": 3}, {"u": "v2", "v": "v4", "w": 2},
                  {"u": "v3", "v": "v4", "w": 4}],
        "start": "v1"}"#;

    #[test]
    fn diamond_round_trip() {
        let g = parse_graph(DIAMOND).unwrap();
        assert_eq!(&g, diamond().as_ref());
        let saved = graph_to_string(&g);
        let original: serde_json::Value = serde_json::from_str(DIAMOND).unwrap();
        let resaved: serde_json::Value = serde_json::from_str(&saved).unwrap();
        assert_eq!(original, resaved);
    }

    #[test]
    fn q3_document_loads() {
        let q3 = generate_hypercube(CubeSpec::unit(3)).unwrap();
        let g = parse_graph(&graph_to_string(&q3)).unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edge_count(), 12);
        assert_eq!(g, q3);
    }

    #[test]
    fn unknown_label_is_rejected() {
        let doc = r#"{"name": "x", "vertices": ["1", "2"], "edges": [{"u": "1", "v": "99", "w": 1}], "start": "1"}"#;
        match parse_graph(doc) {
            Err(LoadError::UnknownLabel { edge: 0, label }) => assert_eq!(label, "99"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_weights_and_syntax() {
        for w in ["0", "-3"] {
            let doc = format!(
                r#"{{"name": "x", "vertices": ["a", "b"], "edges": [{{"u": "a", "v": "b", "w": {w}}}], "start": "a"}}"#
            );
            assert!(matches!(
                parse_graph(&doc),
                Err(LoadError::NonPositiveWeight { edge: 0 })
            ));
        }
        let err = parse_graph("{\"name\": \"x\",\n \"vertices\": [").unwrap_err();
        assert!(matches!(err, LoadError::Syntax { line: 2, .. }), "{err}");
        let dup = r#"{"name": "x", "vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "w": 1}, {"u": "b", "v": "a", "w": 1}], "start": "a"}"#;
        assert!(matches!(parse_graph(dup), Err(LoadError::Invalid(_))));
        let start = r#"{"name": "x", "vertices": ["a"], "edges": [], "start": "q"}"#;
        assert!(matches!(
            parse_graph(start),
            Err(LoadError::UnknownStart(_))
        ));
    }

    proptest! {
        #[test]
        fn save_then_load_is_identity(n in 1u32..=5, k in 1u32..=4, cut in 0u32..=5) {
            let mut g = generate_hypercube(CubeSpec { n, uniform_weight: k }).unwrap();
            if cut <= n {
                g = crate::hypercube::truncate_levels(&g, cut).unwrap();
            }
            let back = parse_graph(&graph_to_string(&g)).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
