//! Orientations of finite multigraphs: arc-connectivity checks, Euler
//! orientations and extension of a consistently oriented Eulerian part.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::connectivity::{euler_circuit_from, euler_tour, is_k_edge_connected};
use crate::error::{Error, Result};
use crate::flow::{directed_flow, local_edge_connectivity};
use crate::graph::{EdgeId, MultiGraph, VertexId};

/// Direction `(tail, head)` for each oriented edge.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    #[serde(with = "crate::io::map_as_pairs")]
    pub arcs: BTreeMap<EdgeId, (VertexId, VertexId)>,
}

impl Orientation {
    pub fn direct(&mut self, e: EdgeId, tail: VertexId, head: VertexId) {
        self.arcs.insert(e, (tail, head));
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// True when every arc of `other` appears here with the same direction.
    pub fn extends(&self, other: &Orientation) -> bool {
        other.arcs.iter().all(|(e, d)| self.arcs.get(e) == Some(d))
    }

    /// Every edge of `g` directed once, between its own endpoints, and
    /// nothing else.
    pub fn covers(&self, g: &MultiGraph) -> std::result::Result<(), String> {
        if self.arcs.len() != g.edge_count() {
            return Err(format!("{} arcs for {} edges", self.arcs.len(), g.edge_count()));
        }
        for (e, u, v) in g.edges() {
            match self.arcs.get(&e) {
                Some(&(a, b)) if (a, b) == (u, v) || (a, b) == (v, u) => {}
                Some(_) => return Err(format!("arc {e} has the wrong endpoints")),
                None => return Err(format!("edge {e} is not oriented")),
            }
        }
        Ok(())
    }

    /// `(in, out)` degree at every vertex touched by an arc.
    pub fn balance(&self) -> BTreeMap<VertexId, (usize, usize)> {
        let mut out: BTreeMap<VertexId, (usize, usize)> = BTreeMap::new();
        for &(a, b) in self.arcs.values() {
            out.entry(a).or_default().1 += 1;
            out.entry(b).or_default().0 += 1;
        }
        out
    }

    /// In-degree equals out-degree everywhere.
    pub fn is_eulerian_consistent(&self) -> bool {
        self.balance().values().all(|(i, o)| i == o)
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph {name} {{\n");
        for (e, (a, b)) in &self.arcs {
            let _ = writeln!(s, "  {} -> {} [label=\"{}\"];", a.0, b.0, e.0);
        }
        s.push_str("}\n");
        s
    }
}

/// Outcome of a rooted arc-connectivity check on a terminal set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcReport {
    pub pairs_checked: usize,
    /// Smallest directed flow found, capped at the requested level.
    pub min_flow: usize,
}

struct Digraph {
    index: BTreeMap<VertexId, usize>,
    arcs: Vec<(usize, usize)>,
}

impl Digraph {
    fn new(g: &MultiGraph, arcs: impl IntoIterator<Item = (VertexId, VertexId)>) -> Digraph {
        let index: BTreeMap<VertexId, usize> = g.vertices().enumerate().map(|(i, v)| (v, i)).collect();
        let arcs = arcs.into_iter().map(|(a, b)| (index[&a], index[&b])).collect();
        Digraph { index, arcs }
    }

    fn flow(&self, x: VertexId, y: VertexId, limit: usize) -> usize {
        directed_flow(self.index.len(), &self.arcs, self.index[&x], self.index[&y], limit)
    }

    /// Flows from and to the least terminal; enough since directed
    /// connectivity satisfies `λ(x,y) ≥ min(λ(x,r), λ(r,y))`.
    fn rooted(&self, terminals: &BTreeSet<VertexId>, k: usize) -> ArcReport {
        let mut report = ArcReport { pairs_checked: 0, min_flow: k };
        let Some(&r) = terminals.iter().next() else {
            return report;
        };
        for &x in terminals.iter().skip(1) {
            for (a, b) in [(r, x), (x, r)] {
                report.pairs_checked += 1;
                report.min_flow = report.min_flow.min(self.flow(a, b, k));
                if report.min_flow == 0 {
                    return report;
                }
            }
        }
        report
    }
}

/// Directed flow between `x` and `y` in the oriented graph, capped at `limit`.
pub fn directed_connectivity(g: &MultiGraph, o: &Orientation, x: VertexId, y: VertexId, limit: usize) -> usize {
    Digraph::new(g, o.arcs.values().copied()).flow(x, y, limit)
}

/// Arc-connectivity between the vertices of `terminals`, capped at `k`.
pub fn arc_report(g: &MultiGraph, o: &Orientation, terminals: &BTreeSet<VertexId>, k: usize) -> ArcReport {
    Digraph::new(g, o.arcs.values().copied()).rooted(terminals, k)
}

/// Every edge oriented and every ordered pair joined by `k` arc-disjoint
/// directed paths.
pub fn verify_k_arc_connected(g: &MultiGraph, o: &Orientation, k: usize) -> bool {
    o.covers(g).is_ok() && arc_report(g, o, g.vertex_set(), k).min_flow >= k
}

/// Every ordered pair has directed connectivity at least half its
/// undirected local edge-connectivity, rounded down.
pub fn verify_well_balanced(g: &MultiGraph, o: &Orientation) -> bool {
    if o.covers(g).is_err() {
        return false;
    }
    let d = Digraph::new(g, o.arcs.values().copied());
    for x in g.vertices() {
        for y in g.vertices().filter(|&y| y > x) {
            let half = local_edge_connectivity(g, x, y).expect("known vertices") / 2;
            if d.flow(x, y, half) < half || d.flow(y, x, half) < half {
                return false;
            }
        }
    }
    true
}

/// Directs every edge along one Euler tour.
pub fn orient_eulerian_consistent(g: &MultiGraph) -> Result<Orientation> {
    let tour = euler_tour(g)?;
    let mut o = Orientation::default();
    for (i, &e) in tour.edges.iter().enumerate() {
        o.direct(e, tour.vertices[i], tour.vertices[i + 1]);
    }
    Ok(o)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtendConfig {
    /// Search nodes allowed in the exhaustive phase.
    pub node_budget: u64,
    /// Components of an Eulerian remainder for which all direction flips
    /// are tried before falling back to search.
    pub max_flip_components: usize,
}

impl Default for ExtendConfig {
    fn default() -> Self {
        ExtendConfig { node_budget: 200_000, max_flip_components: 6 }
    }
}

/// Which strategy produced an extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendStrategy {
    ClosedTrails,
    Search,
}

/// Extends `pre` to a `k`-arc-connected orientation of `g`. First tries
/// orienting an Eulerian remainder along closed trails, then a depth-first
/// search over the remaining edges that prunes whenever the partial
/// orientation, with undecided edges usable both ways, already has a
/// directed cut below `k`.
pub fn extend_orientation(
    g: &MultiGraph,
    k: usize,
    pre: &Orientation,
    cfg: ExtendConfig,
) -> Result<(Orientation, ExtendStrategy)> {
    for (&e, &(a, b)) in &pre.arcs {
        let (u, v) = g.endpoints(e).map_err(|_| Error::PreconditionViolated(format!("{e} is not an edge")))?;
        if (a, b) != (u, v) && (a, b) != (v, u) {
            return Err(Error::PreconditionViolated(format!("arc {e} has the wrong endpoints")));
        }
    }
    if !pre.is_eulerian_consistent() {
        return Err(Error::PreconditionViolated("pre-orientation is not Eulerian-consistent".into()));
    }
    if !is_k_edge_connected(g, 2 * k) {
        return Err(Error::PreconditionViolated(format!("graph is not {}-edge-connected", 2 * k)));
    }
    let rest_edges: BTreeSet<EdgeId> = g.edge_ids().filter(|e| !pre.arcs.contains_key(e)).collect();
    if let Some(o) = by_closed_trails(g, k, pre, &rest_edges, cfg.max_flip_components) {
        return Ok((o, ExtendStrategy::ClosedTrails));
    }
    let mut s = Search::new(g, k, pre, &rest_edges, cfg.node_budget);
    if s.run(0)? {
        return Ok((s.orientation(pre), ExtendStrategy::Search));
    }
    Err(Error::Internal(format!("no {k}-arc-connected extension exists")))
}

fn by_closed_trails(
    g: &MultiGraph,
    k: usize,
    pre: &Orientation,
    rest: &BTreeSet<EdgeId>,
    max_flip: usize,
) -> Option<Orientation> {
    let drop: BTreeSet<EdgeId> = pre.arcs.keys().copied().collect();
    let r = g.without_edges(&drop);
    if r.vertices().any(|v| r.degree(v) % 2 == 1) {
        return None;
    }
    let trails: Vec<Vec<(EdgeId, VertexId, VertexId)>> = r
        .components()
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|c| {
            let w = euler_circuit_from(&r.induced(&c), *c.iter().next().expect("nonempty"));
            w.edges.iter().enumerate().map(|(i, &e)| (e, w.vertices[i], w.vertices[i + 1])).collect()
        })
        .collect();
    debug_assert_eq!(trails.iter().map(Vec::len).sum::<usize>(), rest.len());
    if trails.len() > max_flip {
        return None;
    }
    for flips in 0u32..1 << trails.len() {
        let mut o = pre.clone();
        for (i, trail) in trails.iter().enumerate() {
            for &(e, a, b) in trail {
                if flips >> i & 1 == 1 {
                    o.direct(e, b, a);
                } else {
                    o.direct(e, a, b);
                }
            }
        }
        if verify_k_arc_connected(g, &o, k) {
            return Some(o);
        }
    }
    None
}

struct Search<'g> {
    g: &'g MultiGraph,
    k: usize,
    fixed: Vec<(VertexId, VertexId)>,
    free: Vec<(EdgeId, VertexId, VertexId)>,
    choice: Vec<Option<bool>>,
    nodes: u64,
    budget: u64,
}

impl<'g> Search<'g> {
    fn new(g: &'g MultiGraph, k: usize, pre: &Orientation, rest: &BTreeSet<EdgeId>, budget: u64) -> Self {
        let free: Vec<(EdgeId, VertexId, VertexId)> = g.edges().filter(|(e, _, _)| rest.contains(e)).collect();
        Search {
            g,
            k,
            fixed: pre.arcs.values().copied().collect(),
            choice: vec![None; free.len()],
            free,
            nodes: 0,
            budget,
        }
    }

    fn relaxed_ok(&self) -> bool {
        let mut arcs = self.fixed.clone();
        for (i, &(_, u, v)) in self.free.iter().enumerate() {
            match self.choice[i] {
                Some(true) => arcs.push((u, v)),
                Some(false) => arcs.push((v, u)),
                None => arcs.extend([(u, v), (v, u)]),
            }
        }
        Digraph::new(self.g, arcs).rooted(self.g.vertex_set(), self.k).min_flow >= self.k
    }

    fn run(&mut self, i: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ResourceBudgetExceeded(self.budget));
        }
        if i == self.free.len() {
            return Ok(self.relaxed_ok());
        }
        for dir in [true, false] {
            self.choice[i] = Some(dir);
            if self.relaxed_ok() && self.run(i + 1)? {
                return Ok(true);
            }
        }
        self.choice[i] = None;
        Ok(false)
    }

    fn orientation(&self, pre: &Orientation) -> Orientation {
        let mut o = pre.clone();
        for (i, &(e, u, v)) in self.free.iter().enumerate() {
            if self.choice[i] == Some(true) {
                o.direct(e, u, v);
            } else {
                o.direct(e, v, u);
            }
        }
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn c4() -> MultiGraph {
        MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn cycle_orientations() {
        let g = c4();
        let mut o = orient_eulerian_consistent(&g).unwrap();
        assert!(verify_k_arc_connected(&g, &o, 1));
        let (a, b) = o.arcs[&EdgeId(0)];
        o.direct(EdgeId(0), b, a);
        assert!(!verify_k_arc_connected(&g, &o, 1));
    }

    #[test]
    fn doubled_cycle_and_k5_are_two_arc_connected() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(verify_k_arc_connected(&g, &orient_eulerian_consistent(&g).unwrap(), 2));
        let pairs: Vec<(u32, u32)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        let k5 = MultiGraph::from_edges(5, &pairs).unwrap();
        let o = orient_eulerian_consistent(&k5).unwrap();
        assert!(verify_k_arc_connected(&k5, &o, 2));
        assert!(verify_well_balanced(&k5, &o));
    }

    #[test]
    fn well_balanced_checks() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let mut o = Orientation::default();
        o.direct(EdgeId(0), v(0), v(1));
        o.direct(EdgeId(1), v(1), v(2));
        assert!(verify_well_balanced(&g, &o));
        let pairs: Vec<(u32, u32)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
        let k4 = MultiGraph::from_edges(4, &pairs).unwrap();
        let mut bad = Orientation::default();
        for (e, a, b) in k4.edges() {
            bad.direct(e, a.min(b), a.max(b));
        }
        assert!(!verify_well_balanced(&k4, &bad));
    }

    #[test]
    fn extension_keeps_a_preoriented_triangle() {
        // doubled C4 plus both chords; the triangle 0-1-2 uses one copy of
        // 0-1, one of 1-2 and the chord 0-2
        let g = MultiGraph::from_edges(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)],
        )
        .unwrap();
        assert!(is_k_edge_connected(&g, 4));
        let mut pre = Orientation::default();
        pre.direct(EdgeId(0), v(0), v(1));
        pre.direct(EdgeId(1), v(1), v(2));
        pre.direct(EdgeId(8), v(2), v(0));
        let (o, _) = extend_orientation(&g, 2, &pre, ExtendConfig::default()).unwrap();
        assert!(o.extends(&pre));
        assert!(verify_k_arc_connected(&g, &o, 2));
    }

    #[test]
    fn unbalanced_preorientation_rejected() {
        let g = c4();
        let mut pre = Orientation::default();
        pre.direct(EdgeId(0), v(0), v(1));
        let r = extend_orientation(&g, 1, &pre, ExtendConfig::default());
        assert!(matches!(r, Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn empty_preorientation_on_eulerian_graph() {
        let g = c4();
        let (o, how) = extend_orientation(&g, 1, &Orientation::default(), ExtendConfig::default()).unwrap();
        assert_eq!(how, ExtendStrategy::ClosedTrails);
        assert!(verify_k_arc_connected(&g, &o, 1));
    }

    #[test]
    fn search_handles_odd_degrees() {
        // K4 is 3-edge-connected with odd degrees
        let pairs: Vec<(u32, u32)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
        let k4 = MultiGraph::from_edges(4, &pairs).unwrap();
        let (o, how) = extend_orientation(&k4, 1, &Orientation::default(), ExtendConfig::default()).unwrap();
        assert_eq!(how, ExtendStrategy::Search);
        assert!(verify_k_arc_connected(&k4, &o, 1));
    }
}
