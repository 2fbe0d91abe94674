//! JSON graph files:
//!
//! ```json
//! { "vertices": [ {"id": "x", "m": 1.0, "c": 0.0} ],
//!   "edges":    [ {"u": "x", "v": "y", "b": 1.0} ] }
//! ```
//!
//! `m` defaults to 1 and `c` to 0. Every undirected edge is listed once.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{VertexId, WeightedGraph};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum IdRepr {
    Text(String),
    Number(i64),
}

impl From<IdRepr> for VertexId {
    fn from(r: IdRepr) -> Self {
        match r {
            IdRepr::Text(s) => VertexId::parse(&s),
            IdRepr::Number(x) => VertexId::Int(x),
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize, Serialize)]
struct VertexRecord {
    id: IdRepr,
    #[serde(default = "one")]
    m: f64,
    #[serde(default)]
    c: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
struct EdgeRecord {
    u: IdRepr,
    v: IdRepr,
    b: f64,
}

/// Serialized form of a [`WeightedGraph`].
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct GraphFile {
    vertices: Vec<VertexRecord>,
    #[serde(default)]
    edges: Vec<EdgeRecord>,
}

impl GraphFile {
    pub fn from_graph(g: &WeightedGraph) -> Self {
        let vertices = (0..g.len())
            .map(|i| VertexRecord {
                id: IdRepr::Text(g.ids()[i].to_string()),
                m: g.measure_at(i),
                c: g.killing_at(i),
            })
            .collect();
        let edges = g
            .edges()
            .into_iter()
            .map(|(i, j, b)| EdgeRecord {
                u: IdRepr::Text(g.ids()[i].to_string()),
                v: IdRepr::Text(g.ids()[j].to_string()),
                b,
            })
            .collect();
        GraphFile { vertices, edges }
    }

    pub fn into_graph(self) -> Result<WeightedGraph> {
        let vertices = self.vertices.into_iter().map(|v| (v.id.into(), v.m, v.c)).collect();
        let edges = self.edges.into_iter().map(|e| (e.u.into(), e.v.into(), e.b)).collect();
        WeightedGraph::new(vertices, edges)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph data serializes")
    }
}

/// Reads and validates a graph file.
pub fn load_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    GraphFile::parse(&text)?.into_graph()
}

/// Writes `graph` in canonical order (vertices sorted, edges `(u < v)`
/// sorted), so that save followed by load is the identity.
pub fn save_graph(graph: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, GraphFile::from_graph(graph).to_json())
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })
}
