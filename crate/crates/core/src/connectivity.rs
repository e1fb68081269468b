//! Edge-connectivity predicates, the intersecting-cuts counting identity,
//! block decomposition and Euler tours.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::local_edge_connectivity_capped;
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::walk::Walk;

/// Whether every pair of vertices is joined by `k` edge-disjoint paths.
///
/// Graphs with fewer than two vertices are k-edge-connected for every `k`
/// (the pair set is empty). Uses one root against all other vertices, which
/// suffices because `λ(u, w) ≥ min(λ(u, v), λ(v, w))`.
pub fn is_k_edge_connected(g: &MultiGraph, k: usize) -> bool {
    let mut vs = g.vertices();
    let Some(root) = vs.next() else { return true };
    if k == 0 {
        return true;
    }
    vs.all(|v| local_edge_connectivity_capped(g, root, v, k).map_or(false, |c| c >= k))
}

/// Edge connectivity `min λ(u, v)`, or `None` for graphs with < 2 vertices.
pub fn edge_connectivity(g: &MultiGraph) -> Option<usize> {
    let mut vs = g.vertices();
    let root = vs.next()?;
    vs.map(|v| local_edge_connectivity_capped(g, root, v, usize::MAX).unwrap_or(0))
        .min()
}

/// Whether every pair of vertices of `g − s` has `k` edge-disjoint paths in
/// `g` (paths may use `s`).
pub fn is_sk_edge_connected(g: &MultiGraph, s: VertexId, k: usize) -> Result<bool> {
    if !g.contains_vertex(s) {
        return Err(Error::UnknownVertex(s));
    }
    let mut others = g.vertices().filter(|&v| v != s);
    let Some(root) = others.next() else {
        return Ok(true);
    };
    if k == 0 {
        return Ok(true);
    }
    Ok(others.all(|v| local_edge_connectivity_capped(g, root, v, k).map_or(false, |c| c >= k)))
}

/// Both sides of the counting identity for two intersecting sets:
///
/// `2[|δ(A₁)| + |δ(A₂)| − (|δ(A₁∩A₂ : V∖(A₁∪A₂))| + |δ(A₂∖A₁ : A₁∖A₂)|)]`
/// against `|δ(A₁∩A₂)| + |δ(A₂∖A₁)| + |δ(A₁∖A₂)| + |δ(V∖(A₁∪A₂))|`.
pub fn cut_identity_sides(
    g: &MultiGraph,
    a1: &BTreeSet<VertexId>,
    a2: &BTreeSet<VertexId>,
) -> Result<(usize, usize)> {
    for v in a1.iter().chain(a2) {
        if !g.contains_vertex(*v) {
            return Err(Error::UnknownVertex(*v));
        }
    }
    let both: BTreeSet<_> = a1.intersection(a2).copied().collect();
    if both.is_empty() {
        return Err(Error::NonIntersectingSets);
    }
    let only2: BTreeSet<_> = a2.difference(a1).copied().collect();
    let only1: BTreeSet<_> = a1.difference(a2).copied().collect();
    let outside: BTreeSet<_> = g
        .vertices()
        .filter(|v| !a1.contains(v) && !a2.contains(v))
        .collect();
    let d = |s: &BTreeSet<VertexId>| g.boundary(s).len();
    let between = |s: &BTreeSet<VertexId>, t: &BTreeSet<VertexId>| g.edges_between(s, t).len();
    let lhs = 2 * (d(a1) + d(a2) - (between(&both, &outside) + between(&only2, &only1)));
    let rhs = d(&both) + d(&only2) + d(&only1) + d(&outside);
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub vertices: BTreeSet<VertexId>,
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockTreeNode {
    Block(usize),
    Cut(VertexId),
}

/// Blocks (maximal 2-connected pieces, bridges, or a lone vertex) and
/// cut-vertices, with cut-vertex/block incidences as tree edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCutTree {
    pub blocks: Vec<Block>,
    pub cut_vertices: BTreeSet<VertexId>,
    pub incidences: Vec<(VertexId, usize)>,
}

impl BlockCutTree {
    pub fn node_count(&self) -> usize {
        self.blocks.len() + self.cut_vertices.len()
    }

    pub fn neighbors(&self, node: BlockTreeNode) -> Vec<BlockTreeNode> {
        self.incidences
            .iter()
            .filter_map(|&(c, b)| match node {
                BlockTreeNode::Block(x) if x == b => Some(BlockTreeNode::Cut(c)),
                BlockTreeNode::Cut(x) if x == c => Some(BlockTreeNode::Block(b)),
                _ => None,
            })
            .collect()
    }

    /// Blocks containing `v`, in index order.
    pub fn blocks_of(&self, v: VertexId) -> Vec<usize> {
        (0..self.blocks.len())
            .filter(|&b| self.blocks[b].vertices.contains(&v))
            .collect()
    }

    /// The unique tree path between two nodes (inclusive).
    pub fn path(&self, from: BlockTreeNode, to: BlockTreeNode) -> Option<Vec<BlockTreeNode>> {
        let mut parent: BTreeMap<BlockTreeNode, BlockTreeNode> = BTreeMap::new();
        let mut seen = BTreeSet::from([from]);
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                let mut path = vec![to];
                let mut cur = to;
                while let Some(&p) = parent.get(&cur) {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for y in self.neighbors(x) {
                if seen.insert(y) {
                    parent.insert(y, x);
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// Tree check: connected with `nodes − 1` incidences.
    pub fn is_tree(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        if self.incidences.len() + 1 != n {
            return false;
        }
        let start = BlockTreeNode::Block(0);
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for y in self.neighbors(x) {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.len() == n
    }
}

/// Block/cut-vertex decomposition of a connected multigraph (iterative
/// Hopcroft–Tarjan over edge ids, so parallel edges form 2-connected blocks).
pub fn block_cut_tree(g: &MultiGraph) -> Result<BlockCutTree> {
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let mut blocks: Vec<Block> = Vec::new();
    if g.edge_count() == 0 {
        if let Some(v) = g.vertices().next() {
            blocks.push(Block {
                vertices: BTreeSet::from([v]),
                edges: Vec::new(),
            });
        }
        return Ok(BlockCutTree {
            blocks,
            cut_vertices: BTreeSet::new(),
            incidences: Vec::new(),
        });
    }
    let root = g.vertices().next().expect("nonempty");
    let mut disc: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut low: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    // frame: (vertex, edge used to enter, next incident index)
    let mut stack: Vec<(VertexId, Option<EdgeId>, usize)> = vec![(root, None, 0)];
    disc.insert(root, 0);
    low.insert(root, 0);
    let mut counter = 1;
    while let Some(&mut (x, via, ref mut next)) = stack.last_mut() {
        let inc = g.incident(x);
        if *next < inc.len() {
            let e = inc[*next];
            *next += 1;
            if Some(e) == via {
                continue;
            }
            let y = g.other_end(e, x)?;
            match disc.get(&y) {
                None => {
                    edge_stack.push(e);
                    disc.insert(y, counter);
                    low.insert(y, counter);
                    counter += 1;
                    stack.push((y, Some(e), 0));
                }
                Some(&dy) => {
                    if dy < disc[&x] {
                        edge_stack.push(e);
                        let lx = low[&x].min(dy);
                        low.insert(x, lx);
                    }
                }
            }
        } else {
            stack.pop();
            if let (Some(e), Some(&(p, _, _))) = (via, stack.last()) {
                let lx = low[&x];
                let lp = low[&p].min(lx);
                low.insert(p, lp);
                if lx >= disc[&p] {
                    let mut edges = Vec::new();
                    while let Some(f) = edge_stack.pop() {
                        edges.push(f);
                        if f == e {
                            break;
                        }
                    }
                    edges.sort();
                    let mut vertices = BTreeSet::new();
                    for &f in &edges {
                        let (a, b) = g.endpoints(f)?;
                        vertices.insert(a);
                        vertices.insert(b);
                    }
                    blocks.push(Block { vertices, edges });
                }
            }
        }
    }
    let mut count: BTreeMap<VertexId, usize> = BTreeMap::new();
    for b in &blocks {
        for &v in &b.vertices {
            *count.entry(v).or_default() += 1;
        }
    }
    let cut_vertices: BTreeSet<VertexId> =
        count.into_iter().filter(|&(_, c)| c > 1).map(|(v, _)| v).collect();
    let mut incidences = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        for &v in &b.vertices {
            if cut_vertices.contains(&v) {
                incidences.push((v, i));
            }
        }
    }
    incidences.sort();
    Ok(BlockCutTree {
        blocks,
        cut_vertices,
        incidences,
    })
}

/// Closed walk through every edge exactly once (Hierholzer), or
/// [`Error::NotEulerian`] when the graph is disconnected or has an odd degree.
/// A graph without edges has the trivial tour at its least vertex.
pub fn euler_tour(g: &MultiGraph) -> Result<Walk> {
    if !g.is_connected() || g.vertices().any(|v| g.degree(v) % 2 == 1) {
        return Err(Error::NotEulerian);
    }
    let Some(start) = g.vertices().next() else {
        return Ok(Walk::default());
    };
    Ok(euler_circuit_from(g, start))
}

/// Hierholzer from `start` over the component containing it; assumes all
/// degrees in that component are even.
pub(crate) fn euler_circuit_from(g: &MultiGraph, start: VertexId) -> Walk {
    let mut used: BTreeSet<EdgeId> = BTreeSet::new();
    let mut ptr: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut stack: Vec<(VertexId, Option<EdgeId>)> = vec![(start, None)];
    let mut circuit: Vec<(VertexId, Option<EdgeId>)> = Vec::new();
    while let Some(&(x, _)) = stack.last() {
        let inc = g.incident(x);
        let p = ptr.entry(x).or_insert(0);
        while *p < inc.len() && used.contains(&inc[*p]) {
            *p += 1;
        }
        if *p < inc.len() {
            let e = inc[*p];
            used.insert(e);
            let y = g.other_end(e, x).expect("incident");
            stack.push((y, Some(e)));
        } else {
            circuit.push(stack.pop().expect("nonempty"));
        }
    }
    circuit.reverse();
    let mut walk = Walk::trivial(circuit[0].0);
    for &(v, e) in &circuit[1..] {
        walk.push(e.expect("entered by an edge"), v);
    }
    walk
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> MultiGraph {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        MultiGraph::from_edges(n, &pairs).unwrap()
    }

    fn complete(n: u32) -> MultiGraph {
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((a, b));
            }
        }
        MultiGraph::from_edges(n, &pairs).unwrap()
    }

    fn bowtie_chain(b: u32) -> MultiGraph {
        // triangles (2i, 2i+1, 2i+2)
        let mut pairs = Vec::new();
        for i in 0..b {
            let x = 2 * i;
            pairs.extend([(x, x + 1), (x + 1, x + 2), (x, x + 2)]);
        }
        MultiGraph::from_edges(2 * b + 1, &pairs).unwrap()
    }

    #[test]
    fn cycle_connectivity() {
        assert!(is_k_edge_connected(&cycle(4), 2));
        assert!(!is_k_edge_connected(&cycle(4), 3));
        assert!(is_k_edge_connected(&complete(5), 4));
        assert!(!is_k_edge_connected(&complete(5), 5));
    }

    #[test]
    fn single_vertex_is_connected_for_every_k() {
        let g = MultiGraph::with_vertices(1);
        assert!(is_k_edge_connected(&g, 100));
        assert_eq!(edge_connectivity(&g), None);
    }

    #[test]
    fn star_is_s1_but_not_s2_connected() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(is_sk_edge_connected(&g, VertexId(0), 1).unwrap());
        assert!(!is_sk_edge_connected(&g, VertexId(0), 2).unwrap());
        assert!(is_sk_edge_connected(&g, VertexId(9), 1).is_err());
    }

    #[test]
    fn identity_on_equal_sets() {
        let g = complete(5);
        let a = BTreeSet::from([VertexId(0), VertexId(1)]);
        let (l, r) = cut_identity_sides(&g, &a, &a).unwrap();
        assert_eq!(l, r);
        assert_eq!(l, 2 * g.boundary(&a).len());
        let b = BTreeSet::from([VertexId(3)]);
        assert_eq!(cut_identity_sides(&g, &a, &b), Err(Error::NonIntersectingSets));
    }

    #[test]
    fn two_connected_graph_is_one_block() {
        for g in [complete(4), cycle(5)] {
            let t = block_cut_tree(&g).unwrap();
            assert_eq!(t.blocks.len(), 1);
            assert!(t.cut_vertices.is_empty());
        }
    }

    #[test]
    fn bowtie_has_two_blocks() {
        let t = block_cut_tree(&bowtie_chain(2)).unwrap();
        assert_eq!(t.blocks.len(), 2);
        assert_eq!(t.cut_vertices, BTreeSet::from([VertexId(2)]));
        assert!(t.is_tree());
        let p = t.path(BlockTreeNode::Block(0), BlockTreeNode::Block(1)).unwrap();
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn bowtie_chain_node_count() {
        for b in 1..6 {
            let t = block_cut_tree(&bowtie_chain(b)).unwrap();
            assert_eq!(t.node_count() as u32, 2 * b - 1);
            assert!(t.is_tree());
        }
    }

    #[test]
    fn disconnected_block_tree_errors() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(block_cut_tree(&g), Err(Error::DisconnectedGraph));
    }

    #[test]
    fn euler_tours() {
        let t = euler_tour(&cycle(4)).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.start(), t.end());
        assert_eq!(euler_tour(&complete(4)), Err(Error::NotEulerian));
        let b = bowtie_chain(2);
        let t = euler_tour(&b).unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.is_walk_in(&b));
        assert!(!t.has_repeated_edge());
    }
}
