//! Graph JSON: `{"n": int, "edges": [[u, v, w], ...]}` with 0-based indices.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let raw: GraphFile = serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))?;
    WeightedGraph::new(raw.n, raw.edges.iter().copied()).map_err(|e| match e {
        Error::DegenerateGraph(msg) => Error::MalformedInput(format!("field `n`: {msg}")),
        other => {
            let pos = raw
                .edges
                .iter()
                .position(|&(u, v, w)| u >= raw.n || v >= raw.n || u == v || !(w.is_finite() && w > 0.0));
            match pos {
                Some(i) => Error::MalformedInput(format!("field `edges[{i}]`: {other}")),
                None => Error::MalformedInput(format!("field `edges`: {other}")),
            }
        }
    })
}

/// Canonical serialization: edges in sorted `u < v` order, one compact line.
pub fn graph_to_json(g: &WeightedGraph) -> String {
    let raw = GraphFile {
        n: g.n(),
        edges: g.edges().iter().map(|e| (e.u, e.v, e.weight)).collect(),
    };
    let mut s = serde_json::to_string(&raw).expect("graph serialization is infallible");
    s.push('\n');
    s
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn write_graph(g: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, graph_to_json(g))?;
    Ok(())
}
