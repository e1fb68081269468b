//! Graph ingestion (edge lists, structured documents) and DOT export.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MultiGraph, VertexId};

/// `{vertices: [ids], edges: [[u, v, multiplicity]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub vertices: Vec<u32>,
    pub edges: Vec<[u32; 3]>,
}

/// Explicit edge-id listing used inside certificates, so a replayed graph has
/// exactly the ids the certificate refers to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentifiedGraph {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<IdEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdEdge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
}

impl IdentifiedGraph {
    pub fn from_graph(g: &MultiGraph) -> Self {
        IdentifiedGraph {
            vertices: g.vertices().collect(),
            edges: g.edges().map(|(id, u, v)| IdEdge { id, u, v }).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<MultiGraph> {
        let mut g = MultiGraph::new();
        for &v in &self.vertices {
            g.insert_vertex(v);
        }
        for e in &self.edges {
            g.insert_edge(e.id, e.u, e.v)?;
        }
        Ok(g)
    }
}

/// Serde adapter writing a map as a list of `[key, value]` pairs, so keys
/// need not be strings and survive tagged enums.
pub mod map_as_pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(m: &BTreeMap<K, V>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, K, V, D>(d: D) -> Result<BTreeMap<K, V>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        Ok(Vec::<(K, V)>::deserialize(d)?.into_iter().collect())
    }
}

/// Parses one `u v` pair per line; repeated lines give parallel edges.
/// Blank lines and `#` comments are skipped. Vertex ids are the integers
/// as written; isolated vertices cannot be expressed in this format.
pub fn parse_edge_list(text: &str) -> Result<MultiGraph> {
    let mut g = MultiGraph::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<&str> = line.split_whitespace().collect();
        if nums.len() != 2 {
            return Err(Error::Parse(format!("line {}: expected two ids", lineno + 1)));
        }
        let parse = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| Error::Parse(format!("line {}: bad id {s:?}", lineno + 1)))
        };
        let (u, v) = (VertexId(parse(nums[0])?), VertexId(parse(nums[1])?));
        g.insert_vertex(u);
        g.insert_vertex(v);
        g.add_edge(u, v)
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
    }
    Ok(g)
}

pub fn from_document(doc: &GraphDocument) -> Result<MultiGraph> {
    let mut g = MultiGraph::new();
    for &v in &doc.vertices {
        g.insert_vertex(VertexId(v));
    }
    for &[u, v, m] in &doc.edges {
        for _ in 0..m {
            g.add_edge(VertexId(u), VertexId(v))?;
        }
    }
    Ok(g)
}

pub fn to_document(g: &MultiGraph) -> GraphDocument {
    let mut mult: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for (_, u, v) in g.edges() {
        *mult.entry((u.0, v.0)).or_default() += 1;
    }
    GraphDocument {
        vertices: g.vertices().map(|v| v.0).collect(),
        edges: mult.into_iter().map(|((u, v), m)| [u, v, m]).collect(),
    }
}

/// Reads either format: JSON if the text starts with `{`, edge list otherwise.
pub fn parse_graph(text: &str) -> Result<MultiGraph> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        if let Ok(doc) = serde_json::from_str::<GraphDocument>(trimmed) {
            return from_document(&doc);
        }
        let ident: IdentifiedGraph =
            serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        ident.to_graph()
    } else {
        parse_edge_list(text)
    }
}

/// Undirected DOT with edge-id labels.
pub fn to_dot(g: &MultiGraph) -> String {
    let mut out = String::from("graph G {\n");
    for v in g.vertices() {
        match g.label(v) {
            Some(l) => writeln!(out, "  {} [label=\"{}:{}\"];", v.0, v.0, l).unwrap(),
            None => writeln!(out, "  {};", v.0).unwrap(),
        }
    }
    for (e, u, v) in g.edges() {
        writeln!(out, "  {} -- {} [label=\"{}\"];", u.0, v.0, e).unwrap();
    }
    out.push_str("}\n");
    out
}
