//! Unit-capacity augmenting-path flows over edge ids.
//!
//! Every network edge carries one unit. Undirected edges admit flow in
//! `[-1, 1]` (sign gives direction), arcs admit flow in `[0, 1]`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MultiGraph, VertexCut, VertexId};
use crate::walk::Walk;

#[derive(Debug, Clone)]
pub(crate) struct FlowNet {
    adj: Vec<Vec<usize>>,
    ends: Vec<(usize, usize)>,
    lo: Vec<i8>,
    flow: Vec<i8>,
}

impl FlowNet {
    pub(crate) fn new(n: usize) -> Self {
        FlowNet {
            adj: vec![Vec::new(); n],
            ends: Vec::new(),
            lo: Vec::new(),
            flow: Vec::new(),
        }
    }

    fn add(&mut self, a: usize, b: usize, lo: i8) -> usize {
        let i = self.ends.len();
        self.ends.push((a, b));
        self.lo.push(lo);
        self.flow.push(0);
        self.adj[a].push(i);
        self.adj[b].push(i);
        i
    }

    pub(crate) fn add_undirected(&mut self, a: usize, b: usize) -> usize {
        self.add(a, b, -1)
    }

    pub(crate) fn add_arc(&mut self, from: usize, to: usize) -> usize {
        self.add(from, to, 0)
    }

    /// Residual step from `x` along edge `i`: returns the far node and the
    /// flow delta to apply, if capacity remains.
    fn step(&self, i: usize, x: usize) -> Option<(usize, i8)> {
        let (a, b) = self.ends[i];
        if a == x && self.flow[i] < 1 {
            Some((b, 1))
        } else if b == x && self.flow[i] > self.lo[i] {
            Some((a, -1))
        } else {
            None
        }
    }

    fn augment(&mut self, s: usize, t: usize) -> bool {
        let n = self.adj.len();
        let mut parent: Vec<Option<(usize, usize, i8)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if x == t {
                break;
            }
            for &i in &self.adj[x] {
                if let Some((y, d)) = self.step(i, x) {
                    if !seen[y] {
                        seen[y] = true;
                        parent[y] = Some((x, i, d));
                        queue.push_back(y);
                    }
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut y = t;
        while let Some((x, i, d)) = parent[y] {
            self.flow[i] += d;
            y = x;
        }
        true
    }

    /// Pushes flow from `s` to `t` until no augmenting path or `limit` reached.
    pub(crate) fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        if s == t {
            return limit;
        }
        let mut value = 0;
        while value < limit && self.augment(s, t) {
            value += 1;
        }
        value
    }

    /// Nodes reachable from `s` in the residual network.
    pub(crate) fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &i in &self.adj[x] {
                if let Some((y, _)) = self.step(i, x) {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        seen
    }

    /// Decomposes the current flow into unit `s`–`t` paths, given as node and
    /// network-edge sequences with closed subwalks removed.
    pub(crate) fn paths(&self, s: usize, t: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); self.adj.len()];
        for (i, &(a, b)) in self.ends.iter().enumerate() {
            match self.flow[i] {
                1 => out_edges[a].push(i),
                -1 => out_edges[b].push(i),
                _ => {}
            }
        }
        for list in &mut out_edges {
            list.reverse();
        }
        let mut result = Vec::new();
        while let Some(first) = out_edges[s].pop() {
            let mut nodes = vec![s];
            let mut edges = vec![first];
            let mut x = self.far(first, s);
            nodes.push(x);
            while x != t {
                let Some(i) = out_edges[x].pop() else { break };
                x = self.far(i, x);
                edges.push(i);
                nodes.push(x);
            }
            if x == t {
                result.push(remove_cycles(nodes, edges));
            }
        }
        result
    }

    fn far(&self, i: usize, x: usize) -> usize {
        let (a, b) = self.ends[i];
        if a == x {
            b
        } else {
            a
        }
    }
}

fn remove_cycles(nodes: Vec<usize>, edges: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
    let mut out_n: Vec<usize> = Vec::new();
    let mut out_e: Vec<usize> = Vec::new();
    let mut pos: HashMap<usize, usize> = HashMap::new();
    for (i, &x) in nodes.iter().enumerate() {
        if let Some(&p) = pos.get(&x) {
            for u in out_n.drain(p + 1..) {
                pos.remove(&u);
            }
            out_e.truncate(p);
        } else {
            if i > 0 {
                out_e.push(edges[i - 1]);
            }
            pos.insert(x, out_n.len());
            out_n.push(x);
        }
    }
    (out_n, out_e)
}

/// A unit-capacity network built over a [`MultiGraph`], with optional super
/// source/sink attachments.
pub struct GraphFlow<'g> {
    graph: &'g MultiGraph,
    net: FlowNet,
    index: HashMap<VertexId, usize>,
    verts: Vec<VertexId>,
    edge_of: Vec<Option<EdgeId>>,
    tag_of: Vec<Option<usize>>,
    source: usize,
    sink: usize,
}

impl<'g> GraphFlow<'g> {
    /// Network on the edges of `g` accepted by `keep`.
    pub fn new(g: &'g MultiGraph, keep: impl Fn(EdgeId) -> bool) -> Self {
        let verts: Vec<VertexId> = g.vertices().collect();
        let index: HashMap<VertexId, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut net = FlowNet::new(verts.len() + 2);
        let mut edge_of = Vec::new();
        let mut tag_of = Vec::new();
        for (e, u, v) in g.edges() {
            if keep(e) {
                net.add_undirected(index[&u], index[&v]);
                edge_of.push(Some(e));
                tag_of.push(None);
            }
        }
        let source = verts.len();
        let sink = verts.len() + 1;
        GraphFlow {
            graph: g,
            net,
            index,
            verts,
            edge_of,
            tag_of,
            source,
            sink,
        }
    }

    fn idx(&self, v: VertexId) -> Result<usize> {
        self.index.get(&v).copied().ok_or(Error::UnknownVertex(v))
    }

    /// Unit arc from the super source into `v`, remembered under `tag`.
    pub fn attach_source(&mut self, v: VertexId, tag: usize) -> Result<()> {
        let x = self.idx(v)?;
        self.net.add_arc(self.source, x);
        self.edge_of.push(None);
        self.tag_of.push(Some(tag));
        Ok(())
    }

    /// `cap` unit arcs from `v` into the super sink.
    pub fn attach_sink(&mut self, v: VertexId, cap: usize) -> Result<()> {
        let x = self.idx(v)?;
        for _ in 0..cap {
            self.net.add_arc(x, self.sink);
            self.edge_of.push(None);
            self.tag_of.push(None);
        }
        Ok(())
    }

    pub fn run(&mut self, limit: usize) -> usize {
        self.net.max_flow(self.source, self.sink, limit)
    }

    /// Paths of the current flow with their source tags; super arcs stripped.
    pub fn tagged_paths(&self) -> Vec<(usize, Walk)> {
        self.net
            .paths(self.source, self.sink)
            .into_iter()
            .map(|(nodes, edges)| {
                let tag = self.tag_of[edges[0]].expect("source arc");
                let inner = &nodes[1..nodes.len() - 1];
                let walk = Walk {
                    vertices: inner.iter().map(|&i| self.verts[i]).collect(),
                    edges: edges[1..edges.len() - 1]
                        .iter()
                        .map(|&i| self.edge_of[i].expect("graph edge"))
                        .collect(),
                };
                (tag, walk)
            })
            .collect()
    }

    pub fn graph(&self) -> &MultiGraph {
        self.graph
    }
}

fn check_pair(g: &MultiGraph, u: VertexId, v: VertexId) -> Result<()> {
    for x in [u, v] {
        if !g.contains_vertex(x) {
            return Err(Error::UnknownVertex(x));
        }
    }
    if u == v {
        return Err(Error::SameVertex(u));
    }
    Ok(())
}

struct PairNet {
    net: FlowNet,
    verts: Vec<VertexId>,
    edge_of: Vec<EdgeId>,
    s: usize,
    t: usize,
}

fn pair_net(g: &MultiGraph, u: VertexId, v: VertexId, keep: impl Fn(EdgeId) -> bool) -> PairNet {
    let verts: Vec<VertexId> = g.vertices().collect();
    let index: HashMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut net = FlowNet::new(verts.len());
    let mut edge_of = Vec::new();
    for (e, a, b) in g.edges() {
        if keep(e) {
            net.add_undirected(index[&a], index[&b]);
            edge_of.push(e);
        }
    }
    PairNet {
        net,
        s: index[&u],
        t: index[&v],
        verts,
        edge_of,
    }
}

/// Maximum number of pairwise edge-disjoint `u`–`v` paths.
pub fn local_edge_connectivity(g: &MultiGraph, u: VertexId, v: VertexId) -> Result<usize> {
    check_pair(g, u, v)?;
    let mut p = pair_net(g, u, v, |_| true);
    Ok(p.net.max_flow(p.s, p.t, usize::MAX))
}

/// `min(λ(u, v), limit)`; stops augmenting once `limit` is reached.
pub fn local_edge_connectivity_capped(
    g: &MultiGraph,
    u: VertexId,
    v: VertexId,
    limit: usize,
) -> Result<usize> {
    check_pair(g, u, v)?;
    let mut p = pair_net(g, u, v, |_| true);
    Ok(p.net.max_flow(p.s, p.t, limit))
}

/// Up to `limit` pairwise edge-disjoint simple `u`–`v` paths using only edges
/// accepted by `keep`.
pub fn edge_disjoint_paths(
    g: &MultiGraph,
    u: VertexId,
    v: VertexId,
    limit: usize,
    keep: impl Fn(EdgeId) -> bool,
) -> Result<Vec<Walk>> {
    check_pair(g, u, v)?;
    let mut p = pair_net(g, u, v, keep);
    p.net.max_flow(p.s, p.t, limit);
    Ok(p.net
        .paths(p.s, p.t)
        .into_iter()
        .map(|(nodes, edges)| Walk {
            vertices: nodes.iter().map(|&i| p.verts[i]).collect(),
            edges: edges.iter().map(|&i| p.edge_of[i]).collect(),
        })
        .collect())
}

/// A minimum `u`–`v` cut, returned as the side containing `u`.
pub fn min_cut(g: &MultiGraph, u: VertexId, v: VertexId) -> Result<VertexCut> {
    check_pair(g, u, v)?;
    let mut p = pair_net(g, u, v, |_| true);
    p.net.max_flow(p.s, p.t, usize::MAX);
    let side_mask = p.net.source_side(p.s);
    let side: BTreeSet<VertexId> = p
        .verts
        .iter()
        .zip(side_mask)
        .filter(|(_, inside)| *inside)
        .map(|(&x, _)| x)
        .collect();
    Ok(g.cut(side))
}

/// Minimum cut separating the vertex set `from` from the set `to` (disjoint,
/// both nonempty); returns the side containing `from`.
pub fn min_set_cut(
    g: &MultiGraph,
    from: &BTreeSet<VertexId>,
    to: &BTreeSet<VertexId>,
) -> Result<VertexCut> {
    let mut flow = GraphFlow::new(g, |_| true);
    for &x in from {
        // Many unit arcs make the attachment effectively uncapacitated.
        for _ in 0..=g.degree(x) {
            flow.attach_source(x, 0)?;
        }
    }
    for &y in to {
        flow.attach_sink(y, g.degree(y) + 1)?;
    }
    flow.run(usize::MAX);
    let mask = flow.net.source_side(flow.source);
    let side: BTreeSet<VertexId> = flow
        .verts
        .iter()
        .enumerate()
        .filter(|(i, _)| mask[*i])
        .map(|(_, &x)| x)
        .collect();
    Ok(g.cut(side))
}

/// Number of pairwise vertex-disjoint paths (capped at `limit`) with one end
/// in `a` and the other in `b`, using only edges accepted by `keep`. A vertex
/// in both sets counts as a trivial path.
pub fn vertex_disjoint_connectors(
    g: &MultiGraph,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    limit: usize,
    keep: impl Fn(EdgeId) -> bool,
) -> usize {
    let verts: Vec<VertexId> = g.vertices().collect();
    let index: HashMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let n = verts.len();
    // node i -> in = 2i, out = 2i + 1
    let mut net = FlowNet::new(2 * n + 2);
    let (s, t) = (2 * n, 2 * n + 1);
    for i in 0..n {
        net.add_arc(2 * i, 2 * i + 1);
    }
    for (e, x, y) in g.edges() {
        if keep(e) {
            let (i, j) = (index[&x], index[&y]);
            net.add_arc(2 * i + 1, 2 * j);
            net.add_arc(2 * j + 1, 2 * i);
        }
    }
    for x in a {
        if let Some(&i) = index.get(x) {
            net.add_arc(s, 2 * i);
        }
    }
    for y in b {
        if let Some(&j) = index.get(y) {
            net.add_arc(2 * j + 1, t);
        }
    }
    net.max_flow(s, t, limit)
}

/// Directed unit-capacity flow on arcs `(tail, head)` over `n` nodes.
pub fn directed_flow(n: usize, arcs: &[(usize, usize)], s: usize, t: usize, limit: usize) -> usize {
    let mut net = FlowNet::new(n);
    for &(a, b) in arcs {
        net.add_arc(a, b);
    }
    net.max_flow(s, t, limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn path_has_connectivity_one() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(local_edge_connectivity(&g, v(0), v(2)).unwrap(), 1);
    }

    #[test]
    fn cycle_has_connectivity_two() {
        let g = MultiGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                if a != b {
                    assert_eq!(local_edge_connectivity(&g, v(a), v(b)).unwrap(), 2);
                }
            }
        }
    }

    #[test]
    fn errors_on_bad_pairs() {
        let g = MultiGraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(local_edge_connectivity(&g, v(0), v(0)), Err(Error::SameVertex(v(0))));
        assert_eq!(local_edge_connectivity(&g, v(0), v(7)), Err(Error::UnknownVertex(v(7))));
    }

    #[test]
    fn disjoint_paths_are_edge_disjoint() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (1, 3), (0, 2), (2, 3), (0, 3), (1, 2)])
            .unwrap();
        let paths = edge_disjoint_paths(&g, v(0), v(3), 10, |_| true).unwrap();
        assert_eq!(paths.len(), 3);
        let mut used = BTreeSet::new();
        for p in &paths {
            assert!(p.is_walk_in(&g));
            assert!(p.is_simple());
            for e in &p.edges {
                assert!(used.insert(*e));
            }
        }
    }

    #[test]
    fn min_cut_side_matches_value() {
        let g = MultiGraph::from_edges(4, &[(0, 1), (0, 1), (1, 2), (2, 3), (2, 3)]).unwrap();
        let cut = min_cut(&g, v(0), v(3)).unwrap();
        assert_eq!(cut.boundary.len(), 1);
        assert!(cut.side.contains(&v(0)) && !cut.side.contains(&v(3)));
    }

    #[test]
    fn vertex_connectors_count_shared_vertex() {
        let g = MultiGraph::from_edges(3, &[(0, 2), (1, 2)]).unwrap();
        let a = BTreeSet::from([v(0), v(1)]);
        let b = BTreeSet::from([v(1), v(2)]);
        assert_eq!(vertex_disjoint_connectors(&g, &a, &b, 5, |_| true), 2);
        let path = MultiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let a = BTreeSet::from([v(0)]);
        let b = BTreeSet::from([v(2)]);
        assert_eq!(vertex_disjoint_connectors(&path, &a, &b, 5, |_| true), 1);
    }
}
