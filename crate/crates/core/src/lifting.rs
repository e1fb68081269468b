//! The k-lifting graph at a vertex, its structure classification, dangerous
//! sets and greedy admissible splitting-off.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::connectivity::is_sk_edge_connected;
use crate::error::{Error, Result};
use crate::flow::{local_edge_connectivity_capped, min_set_cut};
use crate::graph::{EdgeId, MultiGraph, VertexId};

fn check_pair_at(g: &MultiGraph, s: VertexId, e: EdgeId, f: EdgeId) -> Result<()> {
    if !g.contains_vertex(s) {
        return Err(Error::UnknownVertex(s));
    }
    if e == f {
        return Err(Error::SameEdge(e));
    }
    for x in [e, f] {
        g.other_end(x, s)?;
    }
    Ok(())
}

fn require_sk(g: &MultiGraph, s: VertexId, k: usize) -> Result<()> {
    if is_sk_edge_connected(g, s, k)? {
        Ok(())
    } else {
        Err(Error::PreconditionViolated(format!(
            "graph is not ({s},{k})-edge-connected"
        )))
    }
}

/// Liftability without re-checking that `g` itself is (s,k)-edge-connected.
pub(crate) fn liftable_unchecked(
    g: &MultiGraph,
    s: VertexId,
    k: usize,
    e: EdgeId,
    f: EdgeId,
) -> Result<bool> {
    let h = g.lift(s, e, f)?;
    is_sk_edge_connected(&h, s, k)
}

/// Whether lifting `e`, `f` at `s` keeps the graph (s,k)-edge-connected.
pub fn is_liftable(g: &MultiGraph, s: VertexId, k: usize, e: EdgeId, f: EdgeId) -> Result<bool> {
    check_pair_at(g, s, e, f)?;
    require_sk(g, s, k)?;
    liftable_unchecked(g, s, k, e, f)
}

/// L(G,s,k): nodes are the edges at `s`, adjacency is k-liftability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftingGraph {
    pub s: VertexId,
    pub k: usize,
    pub nodes: Vec<EdgeId>,
    /// Unordered pairs stored as `(min, max)`.
    pub adj: BTreeSet<(EdgeId, EdgeId)>,
}

impl LiftingGraph {
    pub fn adjacent(&self, e: EdgeId, f: EdgeId) -> bool {
        self.adj.contains(&(e.min(f), e.max(f)))
    }

    pub fn degree(&self, e: EdgeId) -> usize {
        self.nodes.iter().filter(|&&f| f != e && self.adjacent(e, f)).count()
    }

    /// Connected components of the complement graph.
    pub fn complement_components(&self) -> Vec<Vec<EdgeId>> {
        let mut seen: BTreeSet<EdgeId> = BTreeSet::new();
        let mut out = Vec::new();
        for &start in &self.nodes {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &y in &self.nodes {
                    if y != x && !self.adjacent(x, y) && seen.insert(y) {
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    /// The subgraph induced by the nodes in `keep`.
    pub fn restrict(&self, keep: &BTreeSet<EdgeId>) -> LiftingGraph {
        LiftingGraph {
            s: self.s,
            k: self.k,
            nodes: self.nodes.iter().copied().filter(|e| keep.contains(e)).collect(),
            adj: self
                .adj
                .iter()
                .copied()
                .filter(|(a, b)| keep.contains(a) && keep.contains(b))
                .collect(),
        }
    }

    pub fn is_subgraph_of(&self, other: &LiftingGraph) -> bool {
        let nodes: BTreeSet<_> = other.nodes.iter().collect();
        self.nodes.iter().all(|e| nodes.contains(e)) && self.adj.is_subset(&other.adj)
    }
}

/// All pairwise liftability checks at `s`.
pub fn lifting_graph(g: &MultiGraph, s: VertexId, k: usize) -> Result<LiftingGraph> {
    if !g.contains_vertex(s) {
        return Err(Error::UnknownVertex(s));
    }
    require_sk(g, s, k)?;
    let nodes: Vec<EdgeId> = g.incident(s).to_vec();
    let mut adj = BTreeSet::new();
    for (i, &e) in nodes.iter().enumerate() {
        for &f in &nodes[i + 1..] {
            if liftable_unchecked(g, s, k, e, f)? {
                adj.insert((e, f));
            }
        }
    }
    Ok(LiftingGraph { s, k, nodes, adj })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StructureTag {
    ComplementDisconnected,
    IsolatedPlusBalancedBipartite,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructureWitness {
    Components(Vec<Vec<EdgeId>>),
    Bipartite {
        isolated: EdgeId,
        left: Vec<EdgeId>,
        right: Vec<EdgeId>,
    },
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureClass {
    pub tag: StructureTag,
    pub witness: StructureWitness,
}

impl StructureClass {
    /// Re-checks the witness against `l`.
    pub fn validate(&self, l: &LiftingGraph) -> bool {
        match (&self.tag, &self.witness) {
            (StructureTag::ComplementDisconnected, StructureWitness::Components(parts)) => {
                if parts.len() < 2 {
                    return false;
                }
                let all: Vec<EdgeId> = parts.iter().flatten().copied().collect();
                let set: BTreeSet<EdgeId> = all.iter().copied().collect();
                if set.len() != all.len() || set != l.nodes.iter().copied().collect() {
                    return false;
                }
                // Nodes in different parts must be adjacent in L.
                parts.iter().enumerate().all(|(i, p)| {
                    parts[i + 1..]
                        .iter()
                        .all(|q| p.iter().all(|&a| q.iter().all(|&b| l.adjacent(a, b))))
                })
            }
            (
                StructureTag::IsolatedPlusBalancedBipartite,
                StructureWitness::Bipartite {
                    isolated,
                    left,
                    right,
                },
            ) => matches_template(l, *isolated, left, right),
            (StructureTag::Other, StructureWitness::None) => {
                classify_structure(l).tag == StructureTag::Other
            }
            _ => false,
        }
    }
}

fn matches_template(l: &LiftingGraph, iso: EdgeId, left: &[EdgeId], right: &[EdgeId]) -> bool {
    if left.is_empty() || left.len() != right.len() || left.len() * 2 + 1 != l.nodes.len() {
        return false;
    }
    let mut all: BTreeSet<EdgeId> = left.iter().chain(right).copied().collect();
    all.insert(iso);
    if all.len() != l.nodes.len() || all != l.nodes.iter().copied().collect() {
        return false;
    }
    if l.degree(iso) != 0 {
        return false;
    }
    let side_clean = |side: &[EdgeId]| {
        side.iter()
            .enumerate()
            .all(|(i, &a)| side[i + 1..].iter().all(|&b| !l.adjacent(a, b)))
    };
    let complete = left.iter().all(|&a| right.iter().all(|&b| l.adjacent(a, b)));
    side_clean(left) && side_clean(right) && complete
}

/// Complement-disconnected, isolated node plus balanced complete bipartite,
/// or neither.
pub fn classify_structure(l: &LiftingGraph) -> StructureClass {
    let comps = l.complement_components();
    if comps.len() >= 2 {
        return StructureClass {
            tag: StructureTag::ComplementDisconnected,
            witness: StructureWitness::Components(comps),
        };
    }
    let other = StructureClass {
        tag: StructureTag::Other,
        witness: StructureWitness::None,
    };
    let isolated: Vec<EdgeId> = l.nodes.iter().copied().filter(|&e| l.degree(e) == 0).collect();
    if l.nodes.len() < 3 || isolated.len() != 1 {
        return other;
    }
    let iso = isolated[0];
    let rest: Vec<EdgeId> = l.nodes.iter().copied().filter(|&e| e != iso).collect();
    // 2-colour the rest by BFS in L.
    let mut colour: BTreeMap<EdgeId, bool> = BTreeMap::new();
    colour.insert(rest[0], false);
    let mut queue = VecDeque::from([rest[0]]);
    while let Some(x) = queue.pop_front() {
        for &y in &rest {
            if y != x && l.adjacent(x, y) && !colour.contains_key(&y) {
                colour.insert(y, !colour[&x]);
                queue.push_back(y);
            }
        }
    }
    if colour.len() != rest.len() {
        return other;
    }
    let left: Vec<EdgeId> = rest.iter().copied().filter(|e| !colour[e]).collect();
    let right: Vec<EdgeId> = rest.iter().copied().filter(|e| colour[e]).collect();
    if matches_template(l, iso, &left, &right) {
        StructureClass {
            tag: StructureTag::IsolatedPlusBalancedBipartite,
            witness: StructureWitness::Bipartite {
                isolated: iso,
                left,
                right,
            },
        }
    } else {
        other
    }
}

/// A vertex set `A` with `s ∉ A`, `|δ(A)| ≤ k+1` and a vertex outside
/// `A ∪ {s}`. Any two edges from `s` into `A` form a non-liftable pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DangerousSet {
    pub side: BTreeSet<VertexId>,
    pub boundary: usize,
}

impl DangerousSet {
    pub fn validate(&self, g: &MultiGraph, s: VertexId, k: usize) -> bool {
        !self.side.contains(&s)
            && self.side.iter().all(|&v| g.contains_vertex(v))
            && g.boundary(&self.side).len() == self.boundary
            && self.boundary <= k + 1
            && g.vertices().any(|v| v != s && !self.side.contains(&v))
    }
}

/// Subsets of `V − s` are enumerated exhaustively up to this vertex count.
pub const EXHAUSTIVE_DANGEROUS_LIMIT: usize = 20;

fn dangerous_preconditions(g: &MultiGraph, s: VertexId, k: usize, edges: &[EdgeId]) -> Result<BTreeSet<VertexId>> {
    if !g.contains_vertex(s) {
        return Err(Error::UnknownVertex(s));
    }
    if edges.is_empty() {
        return Err(Error::PreconditionViolated("empty edge set".into()));
    }
    if g.degree(s) == 3 {
        return Err(Error::PreconditionViolated("deg(s) = 3".into()));
    }
    let mut ends = BTreeSet::new();
    for &e in edges {
        ends.insert(g.other_end(e, s)?);
    }
    for x in g.neighbors(s) {
        if local_edge_connectivity_capped(g, s, x, 2)? < 2 {
            return Err(Error::PreconditionViolated(format!("cut-edge between {s} and {x}")));
        }
    }
    require_sk(g, s, k)?;
    for (i, &e) in edges.iter().enumerate() {
        for &f in &edges[i + 1..] {
            if e == f {
                return Err(Error::SameEdge(e));
            }
            if liftable_unchecked(g, s, k, e, f)? {
                return Err(Error::PreconditionViolated(format!("{e} and {f} are liftable")));
            }
        }
    }
    Ok(ends)
}

/// Finds a dangerous set containing the non-`s` ends of `edges`, preferring
/// the smallest side, then the smallest boundary.
pub fn find_dangerous_set(g: &MultiGraph, s: VertexId, k: usize, edges: &[EdgeId]) -> Result<DangerousSet> {
    let ends = dangerous_preconditions(g, s, k, edges)?;
    if g.vertex_count() <= EXHAUSTIVE_DANGEROUS_LIMIT {
        dangerous_exhaustive(g, s, k, &ends)
    } else {
        dangerous_by_cuts(g, s, k, &ends)
    }
}

/// Exhaustive search over all subsets of `V − s` containing `ends`.
pub(crate) fn dangerous_exhaustive(
    g: &MultiGraph,
    s: VertexId,
    k: usize,
    ends: &BTreeSet<VertexId>,
) -> Result<DangerousSet> {
    let others: Vec<VertexId> = g.vertices().filter(|&v| v != s).collect();
    let n = others.len();
    if n > 30 {
        return Err(Error::ResourceBudgetExceeded(1 << 30));
    }
    let bit: BTreeMap<VertexId, u32> = others.iter().enumerate().map(|(i, &v)| (v, 1 << i)).collect();
    let edge_masks: Vec<(u32, u32)> = g
        .edges()
        .map(|(_, u, v)| (bit.get(&u).copied().unwrap_or(0), bit.get(&v).copied().unwrap_or(0)))
        .collect();
    let required: u32 = ends.iter().map(|v| bit[v]).sum();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best: Option<(u32, usize, u32)> = None;
    let free = full & !required;
    // Enumerate supersets of `required` via subsets of `free`.
    let mut sub = 0u32;
    loop {
        let mask = required | sub;
        if mask != full {
            let cut = edge_masks
                .iter()
                .filter(|&&(a, b)| ((a & mask) != 0) != ((b & mask) != 0))
                .count();
            if cut <= k + 1 {
                let key = (mask.count_ones(), cut, mask);
                if best.map_or(true, |b| key < b) {
                    best = Some((key.0, key.1, key.2));
                }
            }
        }
        if sub == free {
            break;
        }
        sub = (sub.wrapping_sub(free)) & free;
    }
    let (_, cut, mask) = best.ok_or(Error::NotFound)?;
    let side = others
        .iter()
        .filter(|v| bit[v] & mask != 0)
        .copied()
        .collect();
    Ok(DangerousSet { side, boundary: cut })
}

/// For each candidate `z` outside `ends ∪ {s}`, a minimum cut separating
/// `ends` from `{s, z}`; a dangerous set exists iff one of these is small.
pub(crate) fn dangerous_by_cuts(
    g: &MultiGraph,
    s: VertexId,
    k: usize,
    ends: &BTreeSet<VertexId>,
) -> Result<DangerousSet> {
    let mut best: Option<DangerousSet> = None;
    for z in g.vertices() {
        if z == s || ends.contains(&z) {
            continue;
        }
        let cut = min_set_cut(g, ends, &BTreeSet::from([s, z]))?;
        if cut.boundary.len() <= k + 1 {
            let cand = DangerousSet {
                boundary: cut.boundary.len(),
                side: cut.side,
            };
            let better = match &best {
                None => true,
                Some(b) => {
                    (cand.side.len(), cand.boundary, &cand.side) < (b.side.len(), b.boundary, &b.side)
                }
            };
            if better {
                best = Some(cand);
            }
        }
    }
    best.ok_or(Error::NotFound)
}

/// One lift performed at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftStep {
    pub first: EdgeId,
    pub second: EdgeId,
    /// `None` when both edges went to the same neighbour.
    pub new_edge: Option<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    pub s: VertexId,
    pub k: usize,
    pub steps: Vec<LiftStep>,
    pub graph: MultiGraph,
}

/// Degree at which splitting stops: 0 for even degree, `k + 1` for odd.
pub fn splitting_target(deg: usize, k: usize) -> Result<usize> {
    if deg % 2 == 0 {
        Ok(0)
    } else if deg >= k + 1 {
        Ok(k + 1)
    } else {
        Err(Error::PreconditionViolated(format!(
            "odd degree {deg} below k + 1 = {}",
            k + 1
        )))
    }
}

/// Lifts the lowest-id liftable pair at `s` until the degree target is hit.
/// The vertex `s` is deleted when it becomes isolated.
pub fn admissible_splitting(g: &MultiGraph, s: VertexId, k: usize) -> Result<Splitting> {
    if k % 2 == 1 {
        return Err(Error::OddK(k));
    }
    if !g.contains_vertex(s) {
        return Err(Error::UnknownVertex(s));
    }
    require_sk(g, s, k)?;
    let target = splitting_target(g.degree(s), k)?;
    let mut h = g.clone();
    let mut steps = Vec::new();
    while h.degree(s) > target {
        let at = h.incident(s).to_vec();
        let pair = 'search: {
            for (i, &e) in at.iter().enumerate() {
                for &f in &at[i + 1..] {
                    if liftable_unchecked(&h, s, k, e, f)? {
                        break 'search Some((e, f));
                    }
                }
            }
            None
        };
        let (e, f) = pair.ok_or_else(|| {
            Error::Stuck(format!("no liftable pair at {s} with degree {}", h.degree(s)))
        })?;
        let (next, new_edge) = h.lift_with_edge(s, e, f)?;
        h = next;
        steps.push(LiftStep {
            first: e,
            second: f,
            new_edge,
        });
    }
    if h.degree(s) == 0 {
        h.remove_vertex(s)?;
    }
    Ok(Splitting { s, k, steps, graph: h })
}

/// Per-instance line record for lifting experiments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftReport {
    pub deg_s: usize,
    pub k: usize,
    pub class_tag: StructureTag,
    pub complement_component_count: usize,
    pub dangerous_set: Option<Vec<VertexId>>,
}

/// Builds the lifting graph, classifies it and, when the lifting graph has an
/// independent pair, looks for a dangerous set containing it.
pub fn lift_report(g: &MultiGraph, s: VertexId, k: usize) -> Result<LiftReport> {
    let l = lifting_graph(g, s, k)?;
    let class = classify_structure(&l);
    let mut dangerous = None;
    'pairs: for (i, &e) in l.nodes.iter().enumerate() {
        for &f in &l.nodes[i + 1..] {
            if !l.adjacent(e, f) {
                match find_dangerous_set(g, s, k, &[e, f]) {
                    Ok(d) => dangerous = Some(d.side.into_iter().collect()),
                    Err(err) if matches!(err, Error::PreconditionViolated(_) | Error::NotFound) => {}
                    Err(err) => return Err(err),
                }
                break 'pairs;
            }
        }
    }
    Ok(LiftReport {
        deg_s: g.degree(s),
        k,
        class_tag: class.tag,
        complement_component_count: l.complement_components().len(),
        dangerous_set: dangerous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_sk_instance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    /// λ(u, v) by enumerating every vertex subset containing `u` but not `v`.
    fn brute_lambda(g: &MultiGraph, u: VertexId, w: VertexId) -> usize {
        let vs: Vec<VertexId> = g.vertices().collect();
        let mut best = usize::MAX;
        for mask in 0u32..(1 << vs.len()) {
            let side: BTreeSet<VertexId> =
                vs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect();
            if side.contains(&u) && !side.contains(&w) {
                best = best.min(g.boundary(&side).len());
            }
        }
        best
    }

    fn brute_sk(g: &MultiGraph, s: VertexId, k: usize) -> bool {
        let vs: Vec<VertexId> = g.vertices().filter(|&x| x != s).collect();
        vs.iter().enumerate().all(|(i, &a)| vs[i + 1..].iter().all(|&b| brute_lambda(g, a, b) >= k))
    }

    #[test]
    fn triangle_pair_liftable_for_k1() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert!(is_liftable(&g, v(0), 1, EdgeId(0), EdgeId(1)).unwrap());
    }

    #[test]
    fn two_paths_with_chord_matches_cut_enumeration() {
        // s=0, x=1, y=2, t=3
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 3), (0, 2), (2, 3), (1, 2)]).unwrap();
        let got = is_liftable(&g, v(0), 2, EdgeId(0), EdgeId(2)).unwrap();
        let lifted = g.lift(v(0), EdgeId(0), EdgeId(2)).unwrap();
        assert_eq!(got, brute_sk(&lifted, v(0), 2));
        assert!(got);
    }

    #[test]
    fn liftable_requires_sk_connectivity() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        assert!(matches!(
            is_liftable(&g, v(0), 2, EdgeId(0), EdgeId(1)),
            Err(Error::PreconditionViolated(_))
        ));
        assert_eq!(is_liftable(&g, v(0), 1, EdgeId(0), EdgeId(0)), Err(Error::SameEdge(EdgeId(0))));
    }

    #[test]
    fn lifting_graph_degree_two() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let l = lifting_graph(&g, v(0), 1).unwrap();
        assert_eq!(l.nodes, vec![EdgeId(0), EdgeId(1)]);
        assert_eq!(l.adj.len(), 1);
    }

    fn synthetic(n: u32, adj: &[(u32, u32)]) -> LiftingGraph {
        LiftingGraph {
            s: v(0),
            k: 2,
            nodes: (0..n).map(EdgeId).collect(),
            adj: adj.iter().map(|&(a, b)| (EdgeId(a.min(b)), EdgeId(a.max(b)))).collect(),
        }
    }

    #[test]
    fn classify_complete_and_template() {
        let complete = synthetic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let c = classify_structure(&complete);
        assert_eq!(c.tag, StructureTag::ComplementDisconnected);
        assert!(matches!(&c.witness, StructureWitness::Components(p) if p.len() == 4));
        assert!(c.validate(&complete));

        // node 0 isolated, K_{2,2} on {1,3} x {2,4}
        let t = synthetic(5, &[(1, 2), (1, 4), (3, 2), (3, 4)]);
        let c = classify_structure(&t);
        assert_eq!(c.tag, StructureTag::IsolatedPlusBalancedBipartite);
        match &c.witness {
            StructureWitness::Bipartite { isolated, left, right } => {
                assert_eq!(*isolated, EdgeId(0));
                assert_eq!(left.len(), 2);
                assert_eq!(right.len(), 2);
            }
            w => panic!("unexpected witness {w:?}"),
        }
        assert!(c.validate(&t));

        // a path on 4 nodes has connected complement and no isolated node
        let p = synthetic(4, &[(0, 1), (1, 2), (2, 3)]);
        let c = classify_structure(&p);
        assert_eq!(c.tag, StructureTag::Other);
        assert!(c.validate(&p));
        assert!(!c.validate(&t));
    }

    #[test]
    fn singleton_dangerous_set() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (0, 2), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let d = find_dangerous_set(&g, v(0), 2, &[EdgeId(0)]).unwrap();
        assert_eq!(d.side, BTreeSet::from([v(1)]));
        assert_eq!(d.boundary, 3);
        assert!(d.validate(&g, v(0), 2));
    }

    #[test]
    fn dangerous_set_rejects_liftable_pair_and_degree_three() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (0, 1), (0, 2), (0, 2), (1, 2), (1, 2)]).unwrap();
        assert!(is_liftable(&g, v(0), 2, EdgeId(0), EdgeId(2)).unwrap());
        assert!(matches!(
            find_dangerous_set(&g, v(0), 2, &[EdgeId(0), EdgeId(2)]),
            Err(Error::PreconditionViolated(_))
        ));
        let h = MultiGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (3, 1)]).unwrap();
        assert!(matches!(
            find_dangerous_set(&h, v(0), 1, &[EdgeId(0)]),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn dangerous_search_methods_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        for _ in 0..60 {
            let (g, s) = random_sk_instance(&mut rng, 6, 4, 2);
            let l = lifting_graph(&g, s, 2).unwrap();
            let Some(&(e, f)) = l
                .nodes
                .iter()
                .enumerate()
                .flat_map(|(i, &e)| l.nodes[i + 1..].iter().map(move |&f| (e, f)))
                .filter(|&(e, f)| !l.adjacent(e, f))
                .collect::<Vec<_>>()
                .first()
            else {
                continue;
            };
            let ends = match dangerous_preconditions(&g, s, 2, &[e, f]) {
                Ok(ends) => ends,
                Err(Error::PreconditionViolated(_)) => continue,
                Err(err) => panic!("{err}"),
            };
            let a = dangerous_exhaustive(&g, s, 2, &ends).unwrap();
            let b = dangerous_by_cuts(&g, s, 2, &ends).unwrap();
            for d in [&a, &b] {
                assert!(d.validate(&g, s, 2));
                assert!(ends.is_subset(&d.side));
            }
            // Lifting the pair produces a small cut around the side.
            let lifted = g.lift(s, e, f).unwrap();
            assert!(lifted.boundary(&a.side).len() < 2);
            checked += 1;
        }
        assert!(checked > 5, "only {checked} instances exercised");
    }

    #[test]
    fn splitting_degree_two() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2), (1, 2)]).unwrap();
        let sp = admissible_splitting(&g, v(0), 2).unwrap();
        assert_eq!(sp.steps.len(), 1);
        assert!(!sp.graph.contains_vertex(v(0)));
        assert_eq!(sp.graph.edge_count(), 3);
    }

    #[test]
    fn splitting_odd_degree_stops_at_k_plus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (g, s) = random_sk_instance(&mut rng, 5, 5, 2);
        let sp = admissible_splitting(&g, s, 2).unwrap();
        assert_eq!(sp.graph.degree(s), 3);
        assert_eq!(sp.steps.len(), 1);
        assert!(matches!(admissible_splitting(&g, s, 3), Err(Error::OddK(3))));
    }

    #[test]
    fn report_serializes_as_one_line() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2), (1, 2)]).unwrap();
        let r = lift_report(&g, v(0), 2).unwrap();
        let line = serde_json::to_string(&r).unwrap();
        assert!(!line.contains('\n'));
        assert_eq!(r.class_tag, StructureTag::ComplementDisconnected);
        assert_eq!(r.complement_component_count, 2);
    }
}
