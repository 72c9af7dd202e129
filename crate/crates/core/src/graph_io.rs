//! Edge-list files.
//!
//! Text form:
//!
//! ```text
//! undirected K=2
//! node 0 0
//! node 1 1
//! edge 0 1
//! ```
//!
//! Node ids must cover `0..n` exactly once. Blank lines and `#` comments are
//! ignored. The JSON form carries the same content as
//! `{"directed": false, "k": 2, "nodes": [{"id": 0, "type": 0}], "edges": [[0, 1]]}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::TypedGraph;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct JsonNode {
    pub id: usize,
    #[serde(rename = "type")]
    pub node_type: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct JsonGraph {
    pub directed: bool,
    pub k: usize,
    pub nodes: Vec<JsonNode>,
    pub edges: Vec<(usize, usize)>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn assemble(
    directed: bool,
    k: usize,
    nodes: &[(usize, usize, usize)],
    edges: &[(usize, usize, usize)],
) -> Result<TypedGraph> {
    let mut types = vec![None; nodes.len()];
    for &(line, id, ty) in nodes {
        let slot =
            types.get_mut(id).ok_or_else(|| parse_err(line, format!("node id {id} outside 0..{}", nodes.len())))?;
        if slot.replace(ty).is_some() {
            return Err(parse_err(line, format!("node {id} declared twice")));
        }
    }
    let types: Vec<usize> = types.into_iter().map(|t| t.expect("all ids covered")).collect();
    let mut g = TypedGraph::new(types, k, directed)?;
    for &(line, u, v) in edges {
        g.add_edge(u, v).map_err(|e| parse_err(line, e.to_string()))?;
    }
    Ok(g)
}

pub fn parse_edge_list(text: &str) -> Result<TypedGraph> {
    let mut header = None;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|e| parse_err(line_no, format!("{s:?}: {e}")));
        if header.is_none() {
            let [kind, k] = fields[..] else {
                return Err(parse_err(line_no, "expected `directed|undirected K=<int>`"));
            };
            let directed = match kind {
                "directed" => true,
                "undirected" => false,
                other => return Err(parse_err(line_no, format!("unknown graph kind {other:?}"))),
            };
            let k = k.strip_prefix("K=").ok_or_else(|| parse_err(line_no, "expected K=<int>")).and_then(num)?;
            header = Some((directed, k));
            continue;
        }
        match fields[..] {
            ["node", id, ty] => nodes.push((line_no, num(id)?, num(ty)?)),
            ["edge", u, v] => edges.push((line_no, num(u)?, num(v)?)),
            _ => return Err(parse_err(line_no, format!("unrecognised line {line:?}"))),
        }
    }
    let (directed, k) = header.ok_or_else(|| parse_err(0, "missing header"))?;
    assemble(directed, k, &nodes, &edges)
}

pub fn write_edge_list(g: &TypedGraph) -> String {
    let mut out = String::new();
    let kind = if g.is_directed() { "directed" } else { "undirected" };
    writeln!(out, "{kind} K={}", g.num_types()).unwrap();
    for (u, t) in g.node_types().iter().enumerate() {
        writeln!(out, "node {u} {t}").unwrap();
    }
    for (u, v) in g.edges() {
        writeln!(out, "edge {u} {v}").unwrap();
    }
    out
}

impl From<&TypedGraph> for JsonGraph {
    fn from(g: &TypedGraph) -> Self {
        JsonGraph {
            directed: g.is_directed(),
            k: g.num_types(),
            nodes: g.node_types().iter().enumerate().map(|(id, &node_type)| JsonNode { id, node_type }).collect(),
            edges: g.edges().collect(),
        }
    }
}

impl TryFrom<JsonGraph> for TypedGraph {
    type Error = Error;

    fn try_from(j: JsonGraph) -> Result<Self> {
        let nodes: Vec<_> = j.nodes.iter().map(|n| (0, n.id, n.node_type)).collect();
        let edges: Vec<_> = j.edges.iter().map(|&(u, v)| (0, u, v)).collect();
        assemble(j.directed, j.k, &nodes, &edges)
    }
}

pub fn parse_json_graph(text: &str) -> Result<TypedGraph> {
    let j: JsonGraph = serde_json::from_str(text)?;
    j.try_into()
}

pub fn write_json_graph(g: &TypedGraph) -> Result<String> {
    Ok(serde_json::to_string(&JsonGraph::from(g))?)
}
