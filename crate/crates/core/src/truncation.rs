//! Finite balls of a [`LazyFamily`] with deterministic ids.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::family::{EdgeKey, LazyFamily, VertexKey};
use crate::graph::{EdgeId, MultiGraph, VertexId};

pub const FRONTIER_LABEL: &str = "frontier";

/// The subgraph induced on all vertices within distance `depth` of the roots.
///
/// Vertex ids follow the order (distance, key) and edge ids the order
/// (larger endpoint distance, key), so the ball of a smaller depth is an
/// id-prefix of the ball of a larger one.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub family: LazyFamily,
    pub roots: Vec<VertexKey>,
    pub depth: u32,
    pub graph: MultiGraph,
    dist: Vec<u32>,
    keys: Vec<VertexKey>,
    ids: BTreeMap<VertexKey, VertexId>,
    edge_keys: Vec<EdgeKey>,
    edge_ids: BTreeMap<EdgeKey, EdgeId>,
    frontier: BTreeSet<VertexId>,
}

/// BFS distances from `roots`, up to `depth`.
fn ball(f: &LazyFamily, roots: &[VertexKey], depth: u32) -> BTreeMap<VertexKey, u32> {
    let mut dist = BTreeMap::new();
    let mut queue = VecDeque::new();
    for r in roots {
        if dist.insert(*r, 0).is_none() {
            queue.push_back(*r);
        }
    }
    while let Some(v) = queue.pop_front() {
        let dv = dist[&v];
        if dv == depth {
            continue;
        }
        for (_, w) in f.incident(&v) {
            if !dist.contains_key(&w) {
                dist.insert(w, dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Explores the family to distance `depth` from `roots`.
pub fn truncate(f: &LazyFamily, roots: &[VertexKey], depth: u32) -> Result<Truncation> {
    for r in roots {
        if !f.contains(r) {
            return Err(Error::PreconditionViolated(format!("root {r} is not a vertex")));
        }
    }
    let dist_map = ball(f, roots, depth);
    let mut order: Vec<(u32, VertexKey)> = dist_map.iter().map(|(&k, &d)| (d, k)).collect();
    order.sort();
    let mut graph = MultiGraph::new();
    let mut keys = Vec::with_capacity(order.len());
    let mut dist = Vec::with_capacity(order.len());
    let mut ids = BTreeMap::new();
    for (i, &(d, k)) in order.iter().enumerate() {
        let id = VertexId(i as u32);
        graph.insert_vertex(id);
        keys.push(k);
        dist.push(d);
        ids.insert(k, id);
    }
    let mut edges: BTreeMap<EdgeKey, (VertexKey, VertexKey)> = BTreeMap::new();
    let mut frontier = BTreeSet::new();
    for &(_, k) in &order {
        for (e, w) in f.incident(&k) {
            if dist_map.contains_key(&w) {
                edges.insert(e, (k, w));
            } else {
                frontier.insert(ids[&k]);
            }
        }
    }
    let mut edge_order: Vec<(u32, EdgeKey)> = edges
        .iter()
        .map(|(&e, (a, b))| (dist_map[a].max(dist_map[b]), e))
        .collect();
    edge_order.sort();
    let mut edge_keys = Vec::with_capacity(edge_order.len());
    let mut edge_ids = BTreeMap::new();
    for (i, &(_, e)) in edge_order.iter().enumerate() {
        let (a, b) = edges[&e];
        let id = EdgeId(i as u32);
        graph.insert_edge(id, ids[&a], ids[&b])?;
        edge_keys.push(e);
        edge_ids.insert(e, id);
    }
    for &v in &frontier {
        graph.set_label(v, FRONTIER_LABEL);
    }
    Ok(Truncation {
        family: f.clone(),
        roots: roots.to_vec(),
        depth,
        graph,
        dist,
        keys,
        ids,
        edge_keys,
        edge_ids,
        frontier,
    })
}

impl Truncation {
    pub fn key(&self, v: VertexId) -> VertexKey {
        self.keys[v.0 as usize]
    }

    pub fn id(&self, k: &VertexKey) -> Option<VertexId> {
        self.ids.get(k).copied()
    }

    pub fn edge_key(&self, e: EdgeId) -> EdgeKey {
        self.edge_keys[e.0 as usize]
    }

    pub fn edge_id(&self, k: &EdgeKey) -> Option<EdgeId> {
        self.edge_ids.get(k).copied()
    }

    /// Distance from the roots.
    pub fn dist(&self, v: VertexId) -> u32 {
        self.dist[v.0 as usize]
    }

    /// Vertices with a neighbour outside the ball.
    pub fn frontier(&self) -> &BTreeSet<VertexId> {
        &self.frontier
    }

    pub fn is_frontier(&self, v: VertexId) -> bool {
        self.frontier.contains(&v)
    }

    /// Vertices within distance `r` of the roots.
    pub fn within(&self, r: u32) -> BTreeSet<VertexId> {
        self.graph.vertices().filter(|&v| self.dist(v) <= r).collect()
    }

    /// Vertices within graph distance `r` of `set`, measured inside the ball.
    pub fn neighborhood(&self, set: &BTreeSet<VertexId>, r: u32) -> BTreeSet<VertexId> {
        let mut seen: BTreeSet<VertexId> = set.clone();
        let mut layer: Vec<VertexId> = set.iter().copied().collect();
        for _ in 0..r {
            let mut next = Vec::new();
            for v in layer {
                for w in self.graph.neighbors(v) {
                    if seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            layer = next;
        }
        seen
    }

    pub fn ids_of(&self, keys: &BTreeSet<VertexKey>) -> Result<BTreeSet<VertexId>> {
        keys.iter()
            .map(|k| {
                self.id(k)
                    .ok_or_else(|| Error::PreconditionViolated(format!("{k} outside the truncation")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_balls() {
        let f = LazyFamily::grid(1);
        let o = [f.origin()];
        let t0 = truncate(&f, &o, 0).unwrap();
        assert_eq!((t0.graph.vertex_count(), t0.graph.edge_count()), (1, 0));
        let t1 = truncate(&f, &o, 1).unwrap();
        assert_eq!((t1.graph.vertex_count(), t1.graph.edge_count()), (5, 4));
        let t2 = truncate(&f, &o, 2).unwrap();
        assert_eq!(t2.graph.vertex_count(), 13);
        assert_eq!(t2.frontier().len(), 8);
        assert_eq!(t2.key(VertexId(0)), f.origin());
    }

    #[test]
    fn smaller_ball_is_id_prefix() {
        for f in [LazyFamily::grid(1), LazyFamily::ladder(3).unwrap(), LazyFamily::tree_levels(3).unwrap()] {
            let o = [f.origin()];
            let small = truncate(&f, &o, 2).unwrap();
            let big = truncate(&f, &o, 3).unwrap();
            let keep = big.within(2);
            assert_eq!(big.graph.induced(&keep).edges().collect::<Vec<_>>(), small.graph.edges().collect::<Vec<_>>());
            for v in small.graph.vertices() {
                assert_eq!(small.key(v), big.key(v));
            }
        }
    }

    #[test]
    fn key_lookup_round_trips() {
        let f = LazyFamily::ladder(5).unwrap();
        let t = truncate(&f, &[f.origin()], 3).unwrap();
        for v in t.graph.vertices() {
            assert_eq!(t.id(&t.key(v)), Some(v));
        }
        for e in t.graph.edge_ids() {
            assert_eq!(t.edge_id(&t.edge_key(e)), Some(e));
        }
        assert!(t.id(&VertexKey::new(10, 0, 0)).is_none());
    }
}
