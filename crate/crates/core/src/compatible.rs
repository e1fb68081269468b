//! Lifting at contracted boundary-linked sets, with every lift realized by a
//! linking path inside its set.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::connectivity::is_k_edge_connected;
use crate::decomposition::{decompose_at, ray_connectors, BoundaryLinkedSet, Decomposition, DepthPolicy};
use crate::error::{Error, Result};
use crate::family::{LazyFamily, VertexKey};
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::lifting::{liftable_unchecked, splitting_target};
use crate::walk::Walk;

/// One lift at a contracted vertex together with its linking path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftLink {
    pub set: usize,
    pub at: VertexId,
    pub first: EdgeId,
    pub second: EdgeId,
    /// Boundary edges whose rays the two lifted edges used.
    pub anchors: (EdgeId, EdgeId),
    pub new_edge: Option<EdgeId>,
    /// Path in the host inside the set, between the inner ends of the anchors.
    pub path: Walk,
}

#[derive(Debug, Clone)]
pub struct CompatibleSplitting {
    pub k: usize,
    /// The graph with every set contracted, before any lift.
    pub start: MultiGraph,
    pub h: MultiGraph,
    pub contracted: Vec<VertexId>,
    pub members: Vec<BTreeSet<VertexId>>,
    pub links: Vec<LiftLink>,
    /// Endpoints in H of every edge that ever existed.
    pub ends: BTreeMap<EdgeId, (VertexId, VertexId)>,
    /// Host walk for every edge that ever existed, from the image of
    /// `ends[e].0` to the image of `ends[e].1`.
    pub realization: BTreeMap<EdgeId, Walk>,
    /// Boundary edge of the set owning `c` that the H-edge `e` leaves through.
    pub anchor: BTreeMap<(EdgeId, VertexId), EdgeId>,
    /// Lifts whose two edges ended at the same vertex: that H vertex and the
    /// closed host walk the deleted pair stood for.
    pub loops: Vec<(VertexId, Walk)>,
}

impl CompatibleSplitting {
    /// Which set's contracted vertex `c` is, if any.
    pub fn set_index(&self, c: VertexId) -> Option<usize> {
        self.contracted.iter().position(|&x| x == c)
    }

    /// The H vertex a host vertex belongs to.
    pub fn h_vertex(&self, v: VertexId) -> VertexId {
        match self.members.iter().position(|m| m.contains(&v)) {
            Some(i) => self.contracted[i],
            None => v,
        }
    }

    /// Realization of `e` read from its end `from`.
    pub fn realize_from(&self, e: EdgeId, from: VertexId) -> Walk {
        let w = &self.realization[&e];
        if self.ends[&e].0 == from {
            w.clone()
        } else {
            w.reversed()
        }
    }

    /// Linking paths recorded inside set `i`.
    pub fn paths_in(&self, i: usize) -> impl Iterator<Item = &LiftLink> {
        self.links.iter().filter(move |l| l.set == i)
    }

    /// Certificate check against the host graph.
    pub fn validate(&self, host: &MultiGraph) -> std::result::Result<(), String> {
        let inner_end = |b: EdgeId, i: usize| -> Option<VertexId> {
            let (x, y) = host.endpoints(b).ok()?;
            [x, y].into_iter().find(|v| self.members[i].contains(v))
        };
        for i in 0..self.members.len() {
            let mut used = BTreeSet::new();
            for l in self.paths_in(i) {
                if !l.path.is_walk_in(host) {
                    return Err(format!("linking path at {} is not a host walk", l.at));
                }
                if !l.path.vertices.iter().all(|v| self.members[i].contains(v)) {
                    return Err(format!("linking path at {} leaves its set", l.at));
                }
                let want = (inner_end(l.anchors.0, i), inner_end(l.anchors.1, i));
                if (l.path.start(), l.path.end()) != want {
                    return Err(format!("linking path at {} has wrong ends", l.at));
                }
                for &e in &l.path.edges {
                    if !used.insert(e) {
                        return Err(format!("linking paths in set {i} share {e}"));
                    }
                }
            }
        }
        if !is_k_edge_connected(&self.h, self.k) {
            return Err(format!("H is not {}-edge-connected", self.k));
        }
        for (i, &c) in self.contracted.iter().enumerate() {
            let d0 = self.start.degree(c);
            let ok = if d0 % 2 == 0 {
                !self.h.contains_vertex(c)
            } else {
                self.h.degree(c) == self.k + 1
            };
            if !ok {
                return Err(format!("set {i} ends at the wrong degree"));
            }
        }
        let mut used = BTreeSet::new();
        for (e, u, v) in self.h.edges() {
            let w = &self.realization[&e];
            if !w.is_walk_in(host) {
                return Err(format!("realization of {e} is not a host walk"));
            }
            let (a, b) = (w.start().unwrap(), w.end().unwrap());
            if (self.h_vertex(a), self.h_vertex(b)) != self.ends[&e] || self.ends[&e] != (u, v) {
                return Err(format!("realization of {e} has wrong ends"));
            }
            for &x in &w.edges {
                if !used.insert(x) {
                    return Err(format!("realizations share host edge {x}"));
                }
            }
        }
        Ok(())
    }
}

struct State<'a> {
    host: &'a MultiGraph,
    sets: &'a [BoundaryLinkedSet],
    k: usize,
    threshold: usize,
    consumed: BTreeSet<EdgeId>,
    p_edges: Vec<BTreeSet<EdgeId>>,
}

impl State<'_> {
    fn inner_end(&self, b: EdgeId, i: usize) -> VertexId {
        let (x, y) = self.host.endpoints(b).expect("boundary edge");
        if self.sets[i].members.contains(&x) {
            x
        } else {
            y
        }
    }

    fn unconsumed_ray_edges(&self, i: usize, except: &[EdgeId]) -> BTreeSet<EdgeId> {
        self.sets[i]
            .rays
            .rays
            .iter()
            .filter(|r| !self.consumed.contains(&r.first_edge()) && !except.contains(&r.first_edge()))
            .flat_map(|r| r.walk.edges.iter().copied())
            .collect()
    }

    /// Linking path between the inner ends of two anchors, if the pair is
    /// R-adjacent and a path avoiding the other live rays exists.
    fn link(&self, i: usize, be: EdgeId, bf: EdgeId) -> Option<Walk> {
        let members = &self.sets[i].members;
        let mut blocked = self.unconsumed_ray_edges(i, &[be, bf]);
        blocked.extend(self.p_edges[i].iter().copied());
        blocked.insert(be);
        blocked.insert(bf);
        let path = self.host.shortest_path(self.inner_end(be, i), self.inner_end(bf, i), |e| {
            if blocked.contains(&e) {
                return false;
            }
            let (x, y) = self.host.endpoints(e).expect("edge");
            members.contains(&x) && members.contains(&y)
        })?;
        if self.threshold > 0 {
            let ray = |b: EdgeId| self.sets[i].rays.ray_for(b);
            let (re, rf) = (ray(be)?, ray(bf)?);
            let a: BTreeSet<VertexId> = re.walk.vertices[1..].iter().copied().collect();
            let b: BTreeSet<VertexId> = rf.walk.vertices[1..].iter().copied().collect();
            let mut all_rays = self.unconsumed_ray_edges(i, &[]);
            all_rays.extend(self.p_edges[i].iter().copied());
            if ray_connectors(self.host, members, &a, &b, &all_rays, self.threshold) < self.threshold {
                return None;
            }
        }
        Some(path)
    }
}

/// Contracts every set and lifts at the contracted vertices in order until
/// each has degree 0 (then deleted) or `k + 1`, choosing at every step the
/// lexicographically least pair that is k-liftable, R-adjacent at the given
/// connector threshold and realizable by a linking path. Pairs whose other
/// ends differ are tried before pairs that would create a loop.
pub fn compatible_splitting(
    host: &MultiGraph,
    sets: &[BoundaryLinkedSet],
    k: usize,
    threshold: usize,
) -> Result<CompatibleSplitting> {
    if k % 2 == 1 {
        return Err(Error::OddK(k));
    }
    let mut start = host.clone();
    let mut contracted = Vec::new();
    for s in sets {
        let (g, c) = start.contract(&s.members)?;
        start = g;
        contracted.push(c.vertex);
    }
    if !is_k_edge_connected(&start, k) {
        return Err(Error::PreconditionViolated(format!(
            "contracted graph is not {k}-edge-connected"
        )));
    }
    let members: Vec<BTreeSet<VertexId>> = sets.iter().map(|s| s.members.clone()).collect();
    let mut out = CompatibleSplitting {
        k,
        start: start.clone(),
        h: start.clone(),
        contracted: contracted.clone(),
        members,
        links: Vec::new(),
        ends: BTreeMap::new(),
        realization: BTreeMap::new(),
        anchor: BTreeMap::new(),
        loops: Vec::new(),
    };
    for (e, u, v) in start.edges() {
        let (x, y) = host.endpoints(e)?;
        let (hx, hy) = (out.h_vertex(x), out.h_vertex(y));
        let (a, b) = if (hx, hy) == (u, v) { (x, y) } else { (y, x) };
        let mut w = Walk::trivial(a);
        w.push(e, b);
        out.ends.insert(e, (u, v));
        out.realization.insert(e, w);
        for c in [u, v] {
            if contracted.contains(&c) {
                out.anchor.insert((e, c), e);
            }
        }
    }
    let mut st = State {
        host,
        sets,
        k,
        threshold,
        consumed: BTreeSet::new(),
        p_edges: vec![BTreeSet::new(); sets.len()],
    };
    for (i, &c) in contracted.iter().enumerate() {
        let target = splitting_target(out.h.degree(c), k)?;
        while out.h.degree(c) > target {
            let (e, f, path) = choose_pair(&out, &st, i, c)?;
            apply_lift(&mut out, &mut st, i, c, e, f, path)?;
        }
        if out.h.degree(c) == 0 {
            out.h.remove_vertex(c)?;
        }
    }
    Ok(out)
}

fn choose_pair(
    out: &CompatibleSplitting,
    st: &State<'_>,
    i: usize,
    c: VertexId,
) -> Result<(EdgeId, EdgeId, Walk)> {
    let h = &out.h;
    let at: Vec<EdgeId> = h.incident(c).to_vec();
    for allow_loop in [false, true] {
        for (p, &e) in at.iter().enumerate() {
            for &f in &at[p + 1..] {
                let x = h.other_end(e, c)?;
                let y = h.other_end(f, c)?;
                if (x == y) != allow_loop {
                    continue;
                }
                if !liftable_unchecked(h, c, st.k, e, f)? {
                    continue;
                }
                let (be, bf) = (out.anchor[&(e, c)], out.anchor[&(f, c)]);
                if let Some(path) = st.link(i, be, bf) {
                    return Ok((e, f, path));
                }
            }
        }
    }
    Err(Error::Stuck(format!(
        "no liftable R-adjacent pair at {c} (degree {})",
        h.degree(c)
    )))
}

fn apply_lift(
    out: &mut CompatibleSplitting,
    st: &mut State<'_>,
    i: usize,
    c: VertexId,
    e: EdgeId,
    f: EdgeId,
    path: Walk,
) -> Result<()> {
    let x = out.h.other_end(e, c)?;
    let y = out.h.other_end(f, c)?;
    let (be, bf) = (out.anchor[&(e, c)], out.anchor[&(f, c)]);
    let (h2, new_edge) = out.h.lift_with_edge(c, e, f)?;
    if new_edge.is_none() {
        let mut w = out.realize_from(e, x);
        w.extend(&path);
        w.extend(&out.realize_from(f, c));
        out.loops.push((x, w));
    }
    if let Some(n) = new_edge {
        let mut w = out.realize_from(e, x);
        w.extend(&path);
        w.extend(&out.realize_from(f, c));
        let ends = h2.endpoints(n)?;
        out.realization.insert(n, if ends.0 == x { w } else { w.reversed() });
        out.ends.insert(n, ends);
        for (old, end) in [(e, x), (f, y)] {
            if let Some(&b) = out.anchor.get(&(old, end)) {
                out.anchor.insert((n, end), b);
            }
        }
    }
    out.h = h2;
    st.consumed.insert(be);
    st.consumed.insert(bf);
    st.p_edges[i].extend(path.edges.iter().copied());
    out.links.push(LiftLink {
        set: i,
        at: c,
        first: e,
        second: f,
        anchors: (be, bf),
        new_edge,
        path,
    });
    Ok(())
}

/// Decomposition plus compatible splitting for a family, retried at doubled
/// depth on any non-authoritative failure or `Stuck`.
#[derive(Debug, Clone)]
pub struct SplitRun {
    pub decomposition: Decomposition,
    pub splitting: CompatibleSplitting,
}

pub fn split_family(
    f: &LazyFamily,
    roots: &[VertexKey],
    a0: &BTreeSet<VertexKey>,
    k: usize,
    threshold: usize,
    policy: DepthPolicy,
) -> Result<SplitRun> {
    let mut reason = String::new();
    for d in policy.depths() {
        let dec = match decompose_at(f, roots, a0, d) {
            Ok(dec) => dec,
            Err(e) if e.is_non_authoritative() => {
                reason = e.to_string();
                continue;
            }
            Err(e) => return Err(e),
        };
        match compatible_splitting(&dec.truncation.graph, &dec.sets, k, threshold) {
            Ok(splitting) => {
                return Ok(SplitRun {
                    decomposition: dec,
                    splitting,
                })
            }
            Err(e @ Error::Stuck(_)) => reason = e.to_string(),
            Err(e) if e.is_non_authoritative() => reason = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(Error::DepthExhausted { cap: policy.cap, reason })
}
