use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use edgelink::family::{FamilyDescriptor, LazyFamily, VertexKey};
use edgelink::io::{parse_graph, GraphDocument};
use edgelink::{MultiGraph, VertexId};
use serde::{Deserialize, Serialize};

use crate::RunConfig;

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// `{graph | family, k, pairs | terminals}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<(u32, u32)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terminals: Vec<(VertexKey, VertexKey)>,
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn graph(run: &RunConfig) -> Result<MultiGraph> {
    let path = run.graph.as_deref().ok_or_else(|| usage("--graph is required"))?;
    parse_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn family(run: &RunConfig) -> Result<(LazyFamily, Vec<VertexKey>)> {
    let d = match run.family.as_deref() {
        Some(path) => serde_json::from_str::<FamilyDescriptor>(&read(path)?)
            .with_context(|| format!("parsing {}", path.display()))?,
        None => return Err(usage("--family is required")),
    };
    Ok(LazyFamily::from_descriptor(&d)?)
}

pub fn vertex(g: &MultiGraph, v: u32) -> Result<VertexId> {
    let v = VertexId(v);
    if g.contains_vertex(v) {
        Ok(v)
    } else {
        Err(usage(format!("{v} is not a vertex of the graph")))
    }
}

pub fn pair(text: &str) -> Result<(u32, u32)> {
    let (a, b) = text.split_once('-').ok_or_else(|| usage(format!("pair {text:?} is not of the form s-t")))?;
    let num = |x: &str| x.trim().parse::<u32>().map_err(|_| usage(format!("bad vertex {x:?}")));
    Ok((num(a)?, num(b)?))
}

pub fn vertex_key(text: &str) -> Result<VertexKey> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || usage(format!("vertex {text:?} is not x,y or x,y,cell"));
    let int = |s: &str| s.parse::<i64>().map_err(|_| bad());
    match parts.as_slice() {
        [x, y] => Ok(VertexKey::new(int(x)?, int(y)?, 0)),
        [x, y, c] => Ok(VertexKey::new(int(x)?, int(y)?, c.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}
