//! Finite multigraphs with stable edge identities.
//!
//! Parallel edges are distinct edge ids; loops are rejected. All derived
//! graphs (lifts, contractions, subgraphs) keep the ids of surviving edges,
//! so certificates can name individual edges across transformations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Provenance of an edge created by lifting `first` and `second` at `at`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftRecord {
    pub first: EdgeId,
    pub second: EdgeId,
    pub at: VertexId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultiGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, (VertexId, VertexId)>,
    incidence: BTreeMap<VertexId, Vec<EdgeId>>,
    labels: BTreeMap<VertexId, String>,
    lifts: BTreeMap<EdgeId, LiftRecord>,
    next_vertex: u32,
    next_edge: u32,
}

/// A vertex set together with its boundary `δ(A)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCut {
    pub side: BTreeSet<VertexId>,
    pub boundary: Vec<EdgeId>,
}

/// Result of contracting a connected vertex set to one fresh vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub vertex: VertexId,
    pub members: BTreeSet<VertexId>,
    /// For every retained boundary edge, its former endpoint inside the set.
    pub inner_end: BTreeMap<EdgeId, VertexId>,
}

impl MultiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph on vertices `0..n` with no edges.
    pub fn with_vertices(n: u32) -> Self {
        let mut g = Self::new();
        for _ in 0..n {
            g.add_vertex();
        }
        g
    }

    /// Builds a graph on `0..n` from endpoint pairs; edge ids follow the input order.
    pub fn from_edges(n: u32, pairs: &[(u32, u32)]) -> Result<Self> {
        let mut g = Self::with_vertices(n);
        for &(u, v) in pairs {
            g.add_edge(VertexId(u), VertexId(v))?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let v = VertexId(self.next_vertex);
        self.insert_vertex(v);
        v
    }

    /// Inserts a vertex with a caller-chosen id (no-op if present).
    pub fn insert_vertex(&mut self, v: VertexId) {
        self.vertices.insert(v);
        self.incidence.entry(v).or_default();
        self.next_vertex = self.next_vertex.max(v.0 + 1);
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        let e = EdgeId(self.next_edge);
        self.insert_edge(e, u, v)?;
        Ok(e)
    }

    /// Inserts an edge with a caller-chosen id.
    pub fn insert_edge(&mut self, e: EdgeId, u: VertexId, v: VertexId) -> Result<()> {
        for x in [u, v] {
            if !self.vertices.contains(&x) {
                return Err(Error::UnknownVertex(x));
            }
        }
        if u == v {
            return Err(Error::Loop(u));
        }
        if self.edges.contains_key(&e) {
            return Err(Error::Internal(format!("duplicate edge id {e}")));
        }
        self.edges.insert(e, (u.min(v), u.max(v)));
        for x in [u, v] {
            let list = self.incidence.entry(x).or_default();
            let pos = list.partition_point(|&f| f < e);
            list.insert(pos, e);
        }
        self.next_edge = self.next_edge.max(e.0 + 1);
        Ok(())
    }

    pub fn remove_edge(&mut self, e: EdgeId) -> Result<(VertexId, VertexId)> {
        let (u, v) = self.edges.remove(&e).ok_or(Error::UnknownEdge(e))?;
        for x in [u, v] {
            if let Some(list) = self.incidence.get_mut(&x) {
                list.retain(|&f| f != e);
            }
        }
        self.lifts.remove(&e);
        Ok((u, v))
    }

    /// Removes a vertex and every edge incident with it.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<()> {
        if !self.vertices.contains(&v) {
            return Err(Error::UnknownVertex(v));
        }
        for e in self.incident(v).to_vec() {
            self.remove_edge(e)?;
        }
        self.vertices.remove(&v);
        self.incidence.remove(&v);
        self.labels.remove(&v);
        Ok(())
    }

    pub fn set_label(&mut self, v: VertexId, label: impl Into<String>) {
        self.labels.insert(v, label.into());
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(&v).map(String::as_str)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_set(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    /// Edges in increasing id order as `(id, u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.edges.iter().map(|(&e, &(u, v))| (e, u, v))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn endpoints(&self, e: EdgeId) -> Result<(VertexId, VertexId)> {
        self.edges.get(&e).copied().ok_or(Error::UnknownEdge(e))
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other_end(&self, e: EdgeId, v: VertexId) -> Result<VertexId> {
        let (a, b) = self.endpoints(e)?;
        if a == v {
            Ok(b)
        } else if b == v {
            Ok(a)
        } else {
            Err(Error::NotIncident { edge: e, vertex: v })
        }
    }

    /// Edge ids incident with `v`, sorted; empty for unknown vertices.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        self.incidence.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incident(v).len()
    }

    pub fn neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.incident(v)
            .iter()
            .filter_map(|&e| self.other_end(e, v).ok())
            .collect()
    }

    pub fn lift_record(&self, e: EdgeId) -> Option<&LiftRecord> {
        self.lifts.get(&e)
    }

    pub fn lift_records(&self) -> &BTreeMap<EdgeId, LiftRecord> {
        &self.lifts
    }

    pub fn next_vertex_id(&self) -> VertexId {
        VertexId(self.next_vertex)
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.next_edge)
    }

    /// Edges with exactly one end in `side`.
    pub fn boundary(&self, side: &BTreeSet<VertexId>) -> Vec<EdgeId> {
        self.edges()
            .filter(|&(_, u, v)| side.contains(&u) != side.contains(&v))
            .map(|(e, _, _)| e)
            .collect()
    }

    /// Edges with one end in `a` and the other in `b` (`a`, `b` disjoint).
    pub fn edges_between(&self, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>) -> Vec<EdgeId> {
        self.edges()
            .filter(|&(_, u, v)| {
                (a.contains(&u) && b.contains(&v)) || (a.contains(&v) && b.contains(&u))
            })
            .map(|(e, _, _)| e)
            .collect()
    }

    pub fn cut(&self, side: BTreeSet<VertexId>) -> VertexCut {
        let boundary = self.boundary(&side);
        VertexCut { side, boundary }
    }

    /// Subgraph induced on `keep`; ids are preserved.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> MultiGraph {
        let mut g = self.clone();
        let drop: Vec<_> = self.vertices().filter(|v| !keep.contains(v)).collect();
        for v in drop {
            g.remove_vertex(v).expect("vertex present");
        }
        g
    }

    /// Copy of the graph with the given edges removed (unknown ids ignored).
    pub fn without_edges(&self, drop: &BTreeSet<EdgeId>) -> MultiGraph {
        let mut g = self.clone();
        for &e in drop {
            let _ = g.remove_edge(e);
        }
        g
    }

    pub fn without_vertex(&self, v: VertexId) -> Result<MultiGraph> {
        let mut g = self.clone();
        g.remove_vertex(v)?;
        Ok(g)
    }

    /// Connected components, each sorted, in order of their least vertex.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.vertices() {
            if seen.contains(&start) {
                continue;
            }
            let comp = self.reach(start, |_| true);
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    /// Vertices reachable from `start` through vertices accepted by `allow`.
    pub fn reach(&self, start: VertexId, allow: impl Fn(VertexId) -> bool) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &e in self.incident(x) {
                let y = self.other_end(e, x).expect("incident edge");
                if allow(y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        match self.vertices().next() {
            None => true,
            Some(v) => self.reach(v, |_| true).len() == self.vertex_count(),
        }
    }

    /// Whether `set` is nonempty and induces a connected subgraph.
    pub fn induces_connected(&self, set: &BTreeSet<VertexId>) -> bool {
        match set.iter().next() {
            None => false,
            Some(&v) => self.reach(v, |x| set.contains(&x)).len() == set.len(),
        }
    }

    /// Lifts `e = sx` and `f = sy` at `s`: both are deleted and a fresh edge
    /// `xy` is added, unless `x = y`, in which case the loop is discarded.
    pub fn lift(&self, s: VertexId, e: EdgeId, f: EdgeId) -> Result<MultiGraph> {
        self.lift_with_edge(s, e, f).map(|(g, _)| g)
    }

    /// As [`MultiGraph::lift`], also returning the id of the new edge.
    pub fn lift_with_edge(
        &self,
        s: VertexId,
        e: EdgeId,
        f: EdgeId,
    ) -> Result<(MultiGraph, Option<EdgeId>)> {
        if !self.contains_vertex(s) {
            return Err(Error::UnknownVertex(s));
        }
        if e == f {
            return Err(Error::SameEdge(e));
        }
        let x = self.other_end(e, s)?;
        let y = self.other_end(f, s)?;
        let mut g = self.clone();
        g.remove_edge(e)?;
        g.remove_edge(f)?;
        if x == y {
            return Ok((g, None));
        }
        let new = g.add_edge(x, y)?;
        g.lifts.insert(new, LiftRecord { first: e, second: f, at: s });
        Ok((g, Some(new)))
    }

    /// Identifies the connected set `set` into one fresh vertex. Edges inside
    /// the set disappear; boundary edges keep their ids.
    pub fn contract(&self, set: &BTreeSet<VertexId>) -> Result<(MultiGraph, Contraction)> {
        for &v in set {
            if !self.contains_vertex(v) {
                return Err(Error::UnknownVertex(v));
            }
        }
        if !self.induces_connected(set) {
            return Err(Error::DisconnectedContractionSet);
        }
        let mut g = MultiGraph {
            next_vertex: self.next_vertex,
            next_edge: self.next_edge,
            ..MultiGraph::default()
        };
        for v in self.vertices().filter(|v| !set.contains(v)) {
            g.insert_vertex(v);
            if let Some(l) = self.label(v) {
                g.set_label(v, l);
            }
        }
        let c = g.add_vertex();
        let mut inner_end = BTreeMap::new();
        for (e, u, v) in self.edges() {
            match (set.contains(&u), set.contains(&v)) {
                (true, true) => {}
                (false, false) => g.insert_edge(e, u, v)?,
                (true, false) => {
                    inner_end.insert(e, u);
                    g.insert_edge(e, c, v)?;
                }
                (false, true) => {
                    inner_end.insert(e, v);
                    g.insert_edge(e, u, c)?;
                }
            }
            if let Some(rec) = self.lifts.get(&e) {
                if g.contains_edge(e) {
                    g.lifts.insert(e, *rec);
                }
            }
        }
        Ok((
            g,
            Contraction {
                vertex: c,
                members: set.clone(),
                inner_end,
            },
        ))
    }

    /// Identifies the vertices of `set` into its least member, dropping the
    /// edges that become loops. Returns the graph and the dropped edge ids.
    pub fn identify(&self, set: &BTreeSet<VertexId>) -> Result<(MultiGraph, Vec<EdgeId>)> {
        let Some(&rep) = set.iter().next() else {
            return Ok((self.clone(), Vec::new()));
        };
        let mut g = MultiGraph {
            next_vertex: self.next_vertex,
            next_edge: self.next_edge,
            ..MultiGraph::default()
        };
        for v in self.vertices().filter(|v| !set.contains(v) || *v == rep) {
            g.insert_vertex(v);
        }
        let mut dropped = Vec::new();
        let map = |x: VertexId| if set.contains(&x) { rep } else { x };
        for (e, u, v) in self.edges() {
            let (a, b) = (map(u), map(v));
            if a == b {
                dropped.push(e);
            } else {
                g.insert_edge(e, a, b)?;
            }
        }
        Ok((g, dropped))
    }
}

impl MultiGraph {
    /// A shortest `from`–`to` path using only edges accepted by `keep`;
    /// ties broken towards lower edge ids.
    pub fn shortest_path(
        &self,
        from: VertexId,
        to: VertexId,
        keep: impl Fn(EdgeId) -> bool,
    ) -> Option<crate::walk::Walk> {
        if !self.contains_vertex(from) || !self.contains_vertex(to) {
            return None;
        }
        let mut pred: BTreeMap<VertexId, (VertexId, EdgeId)> = BTreeMap::new();
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                break;
            }
            for &e in self.incident(x) {
                if !keep(e) {
                    continue;
                }
                let y = self.other_end(e, x).expect("incident edge");
                if seen.insert(y) {
                    pred.insert(y, (x, e));
                    queue.push_back(y);
                }
            }
        }
        if !seen.contains(&to) {
            return None;
        }
        let mut walk = crate::walk::Walk::trivial(to);
        let mut cur = to;
        while cur != from {
            let (p, e) = pred[&cur];
            walk.vertices.push(p);
            walk.edges.push(e);
            cur = p;
        }
        Some(walk.reversed())
    }
}
