//! Replay of certificate documents.
//!
//! Nothing here calls into the solvers: flows, lift replay and all
//! structural checks are reimplemented so that a bug in a construction
//! cannot also hide in its checker. Only the graph model, walks and family
//! truncation are shared.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::family::{FamilyDescriptor, LazyFamily};
use crate::fan::{FanRequest, FanResult};
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::immersion::ImmersionCertificate;
use crate::infinite::InfiniteLinkage;
use crate::io::IdentifiedGraph;
use crate::lifting::LiftStep;
use crate::linkage::Linkage;
use crate::orient::Orientation;
use crate::rounds::OrientRun;
use crate::truncation::{truncate, Truncation};
use crate::walk::Walk;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest edge count for which infeasibility is re-proved by enumeration.
pub const INFEASIBLE_REPLAY_EDGES: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema: u32,
    pub certificate: Certificate,
}

impl Document {
    pub fn new(certificate: Certificate) -> Self {
        Document { schema: SCHEMA_VERSION, certificate }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityCertificate {
    pub graph: IdentifiedGraph,
    pub edge_connectivity: Option<usize>,
    /// A side whose boundary has exactly that many edges.
    pub min_cut: Option<Vec<VertexId>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingCertificate {
    pub graph: IdentifiedGraph,
    pub s: VertexId,
    pub k: usize,
    pub steps: Vec<LiftStep>,
    pub result: IdentifiedGraph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkageCertificate {
    pub graph: IdentifiedGraph,
    pub pairs: Vec<(VertexId, VertexId)>,
    pub linkage: Linkage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfeasibleCertificate {
    pub graph: IdentifiedGraph,
    pub pairs: Vec<(VertexId, VertexId)>,
    pub cut: Option<Vec<VertexId>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanDocument {
    pub family: FamilyDescriptor,
    pub depth: u32,
    pub request: FanRequest,
    pub result: FanResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationCertificate {
    pub graph: IdentifiedGraph,
    pub k: usize,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Connectivity(ConnectivityCertificate),
    Splitting(SplittingCertificate),
    Linkage(LinkageCertificate),
    Infeasible(InfeasibleCertificate),
    InfiniteLinkage(InfiniteLinkage),
    Fan(FanDocument),
    Immersion(ImmersionCertificate),
    Orientation(OrientationCertificate),
    OrientRun(OrientRun),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "details", rename_all = "snake_case")]
pub enum Verification {
    Verified,
    Rejected(Vec<String>),
    /// The claim could not be checked within the replay limits.
    Inconclusive(String),
}

impl Verification {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verification::Verified)
    }

    fn from_problems(problems: Vec<String>) -> Self {
        if problems.is_empty() {
            Verification::Verified
        } else {
            Verification::Rejected(problems)
        }
    }
}

pub fn verify(doc: &Document) -> Verification {
    if doc.schema != SCHEMA_VERSION {
        return Verification::Rejected(vec![format!("unsupported schema {}", doc.schema)]);
    }
    let out = match &doc.certificate {
        Certificate::Connectivity(c) => check_connectivity(c),
        Certificate::Splitting(c) => check_splitting(c),
        Certificate::Linkage(c) => c.graph.to_graph().map(|g| linkage_problems(&g, &c.pairs, &c.linkage)),
        Certificate::Infeasible(c) => return check_infeasible(c),
        Certificate::InfiniteLinkage(c) => check_infinite_linkage(c),
        Certificate::Fan(c) => check_fan(c),
        Certificate::Immersion(c) => host(&c.family, c.depth).map(|t| immersion_problems(&t.graph, c)),
        Certificate::Orientation(c) => check_orientation(c),
        Certificate::OrientRun(c) => check_orient_run(c),
    };
    match out {
        Ok(problems) => Verification::from_problems(problems),
        Err(e) => Verification::Rejected(vec![e.to_string()]),
    }
}

// ---- flows

/// Unit-capacity residual network; arc `i` and `i ^ 1` are mutual reverses.
struct Net {
    head: Vec<usize>,
    cap: Vec<u32>,
    out: Vec<Vec<usize>>,
}

impl Net {
    fn new(n: usize) -> Self {
        Net { head: Vec::new(), cap: Vec::new(), out: vec![Vec::new(); n] }
    }

    fn arc(&mut self, a: usize, b: usize, forward: u32, backward: u32) {
        self.out[a].push(self.head.len());
        self.head.push(b);
        self.cap.push(forward);
        self.out[b].push(self.head.len());
        self.head.push(a);
        self.cap.push(backward);
    }

    fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let mut value = 0;
        while value < limit {
            let mut via = vec![usize::MAX; self.out.len()];
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; self.out.len()];
            seen[s] = true;
            while let Some(x) = queue.pop_front() {
                for &i in &self.out[x] {
                    let y = self.head[i];
                    if self.cap[i] > 0 && !seen[y] {
                        seen[y] = true;
                        via[y] = i;
                        queue.push_back(y);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut y = t;
            while y != s {
                let i = via[y];
                self.cap[i] -= 1;
                self.cap[i ^ 1] += 1;
                y = self.head[i ^ 1];
            }
            value += 1;
        }
        value
    }
}

fn index_of(g: &MultiGraph) -> BTreeMap<VertexId, usize> {
    g.vertices().enumerate().map(|(i, v)| (v, i)).collect()
}

/// Undirected local edge-connectivity, capped.
pub fn edge_flow(g: &MultiGraph, u: VertexId, v: VertexId, limit: usize) -> usize {
    let idx = index_of(g);
    let mut net = Net::new(idx.len());
    for (_, a, b) in g.edges() {
        net.arc(idx[&a], idx[&b], 1, 1);
    }
    net.max_flow(idx[&u], idx[&v], limit)
}

pub fn k_edge_connected(g: &MultiGraph, k: usize) -> bool {
    let mut vs = g.vertices();
    let Some(r) = vs.next() else { return true };
    vs.all(|v| edge_flow(g, r, v, k) >= k)
}

/// Smallest directed flow between `terminals` via a root, capped at `k`.
pub fn rooted_arc_flow(vertices: &BTreeSet<VertexId>, arcs: &[(VertexId, VertexId)], terminals: &BTreeSet<VertexId>, k: usize) -> usize {
    let idx: BTreeMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let Some(&r) = terminals.iter().next() else { return k };
    let mut best = k;
    for &x in terminals.iter().skip(1) {
        for (a, b) in [(r, x), (x, r)] {
            let mut net = Net::new(idx.len());
            for &(p, q) in arcs {
                net.arc(idx[&p], idx[&q], 1, 0);
            }
            best = best.min(net.max_flow(idx[&a], idx[&b], k));
        }
    }
    best
}

// ---- finite certificates

fn check_connectivity(c: &ConnectivityCertificate) -> crate::Result<Vec<String>> {
    let g = c.graph.to_graph()?;
    let mut problems = Vec::new();
    match (c.edge_connectivity, &c.min_cut) {
        (None, _) if g.vertex_count() < 2 => {}
        (Some(k), Some(side)) => {
            let side: BTreeSet<VertexId> = side.iter().copied().collect();
            if side.is_empty() || side.len() == g.vertex_count() || !side.iter().all(|&v| g.contains_vertex(v)) {
                problems.push("cut side is not a proper nonempty vertex set".into());
            } else if g.boundary(&side).len() != k {
                problems.push(format!("cut has {} edges, not {k}", g.boundary(&side).len()));
            }
            if !k_edge_connected(&g, k) {
                problems.push(format!("graph is not {k}-edge-connected"));
            }
        }
        _ => problems.push("claim and witness do not match the graph size".into()),
    }
    Ok(problems)
}

fn check_splitting(c: &SplittingCertificate) -> crate::Result<Vec<String>> {
    let mut g = c.graph.to_graph()?;
    let mut problems = Vec::new();
    let s = c.s;
    if !g.contains_vertex(s) {
        return Ok(vec![format!("{s} is not a vertex")]);
    }
    let d0 = g.degree(s);
    for (i, st) in c.steps.iter().enumerate() {
        let ends = |g: &MultiGraph, e: EdgeId| g.endpoints(e).ok().filter(|&(a, b)| a == s || b == s);
        let (Some(x), Some(y)) = (ends(&g, st.first), ends(&g, st.second)) else {
            problems.push(format!("step {i} lifts an edge not at {s}"));
            return Ok(problems);
        };
        if st.first == st.second {
            problems.push(format!("step {i} lifts one edge twice"));
            return Ok(problems);
        }
        let far = |(a, b): (VertexId, VertexId)| if a == s { b } else { a };
        let (x, y) = (far(x), far(y));
        g.remove_edge(st.first)?;
        g.remove_edge(st.second)?;
        match st.new_edge {
            Some(n) if x != y => g.insert_edge(n, x, y)?,
            None if x == y => {}
            _ => problems.push(format!("step {i} records the wrong lifted edge")),
        }
    }
    let target = if d0 % 2 == 0 { 0 } else { c.k + 1 };
    if g.degree(s) != target {
        problems.push(format!("{s} ends at degree {}, expected {target}", g.degree(s)));
    }
    if target == 0 {
        g.remove_vertex(s)?;
    }
    let want = c.result.to_graph()?;
    if g.edges().collect::<Vec<_>>() != want.edges().collect::<Vec<_>>() || g.vertex_set() != want.vertex_set() {
        problems.push("replayed graph differs from the recorded result".into());
    }
    let mut others = g.vertices().filter(|&v| v != s);
    if let Some(r) = others.next() {
        if let Some(v) = others.find(|&v| edge_flow(&g, r, v, c.k) < c.k) {
            problems.push(format!("{r} and {v} are not {}-edge-connected after splitting", c.k));
        }
    }
    Ok(problems)
}

/// Endpoint, simplicity and edge-disjointness problems of a linkage.
pub fn linkage_problems(g: &MultiGraph, pairs: &[(VertexId, VertexId)], l: &Linkage) -> Vec<String> {
    let mut problems = Vec::new();
    if l.paths.len() != pairs.len() {
        problems.push(format!("{} paths for {} pairs", l.paths.len(), pairs.len()));
    }
    let mut owner: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for (i, (p, &(s, t))) in l.paths.iter().zip(pairs).enumerate() {
        if !walk_in(g, p) {
            problems.push(format!("path {i} is not a walk"));
            continue;
        }
        let ends = (p.vertices[0], *p.vertices.last().unwrap());
        if ends != (s, t) && ends != (t, s) {
            problems.push(format!("path {i} does not join {s} and {t}"));
        }
        if p.vertices.iter().collect::<BTreeSet<_>>().len() != p.vertices.len() {
            problems.push(format!("path {i} repeats a vertex"));
        }
        for &e in &p.edges {
            if let Some(j) = owner.insert(e, i) {
                if j != i {
                    problems.push(format!("shared edge {e} between paths {j} and {i}"));
                }
            }
        }
    }
    problems
}

fn walk_in(g: &MultiGraph, w: &Walk) -> bool {
    if w.vertices.len() != w.edges.len() + 1 {
        return false;
    }
    w.edges.iter().enumerate().all(|(i, &e)| {
        let (a, b) = (w.vertices[i], w.vertices[i + 1]);
        g.endpoints(e).is_ok_and(|(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    })
}

fn simple_paths(g: &MultiGraph, s: VertexId, t: VertexId) -> Vec<BTreeSet<EdgeId>> {
    fn go(g: &MultiGraph, v: VertexId, t: VertexId, seen: &mut BTreeSet<VertexId>, path: &mut Vec<EdgeId>, out: &mut Vec<BTreeSet<EdgeId>>) {
        if v == t {
            out.push(path.iter().copied().collect());
            return;
        }
        for &e in g.incident(v) {
            let w = g.other_end(e, v).expect("incident");
            if seen.insert(w) {
                path.push(e);
                go(g, w, t, seen, path, out);
                path.pop();
                seen.remove(&w);
            }
        }
    }
    let mut out = Vec::new();
    go(g, s, t, &mut BTreeSet::from([s]), &mut Vec::new(), &mut out);
    out
}

/// Exhaustive search over systems of simple paths.
pub fn brute_force_feasible(g: &MultiGraph, pairs: &[(VertexId, VertexId)]) -> bool {
    let options: Vec<Vec<BTreeSet<EdgeId>>> = pairs.iter().map(|&(s, t)| simple_paths(g, s, t)).collect();
    fn pick(options: &[Vec<BTreeSet<EdgeId>>], i: usize, used: &mut BTreeSet<EdgeId>) -> bool {
        if i == options.len() {
            return true;
        }
        for p in &options[i] {
            if p.is_disjoint(used) {
                used.extend(p.iter().copied());
                if pick(options, i + 1, used) {
                    return true;
                }
                for e in p {
                    used.remove(e);
                }
            }
        }
        false
    }
    pick(&options, 0, &mut BTreeSet::new())
}

fn check_infeasible(c: &InfeasibleCertificate) -> Verification {
    let g = match c.graph.to_graph() {
        Ok(g) => g,
        Err(e) => return Verification::Rejected(vec![e.to_string()]),
    };
    if let Some(side) = &c.cut {
        let side: BTreeSet<VertexId> = side.iter().copied().collect();
        let need = c.pairs.iter().filter(|(s, t)| side.contains(s) != side.contains(t)).count();
        if g.boundary(&side).len() < need {
            return Verification::Verified;
        }
        return Verification::Rejected(vec!["recorded cut is not violated".into()]);
    }
    if g.edge_count() > INFEASIBLE_REPLAY_EDGES {
        return Verification::Inconclusive(format!("{} edges exceed the replay limit", g.edge_count()));
    }
    if brute_force_feasible(&g, &c.pairs) {
        Verification::Rejected(vec!["a linkage exists".into()])
    } else {
        Verification::Verified
    }
}

fn orientation_problems(g: &MultiGraph, o: &Orientation) -> Vec<String> {
    let mut problems = Vec::new();
    if o.arcs.len() != g.edge_count() {
        problems.push(format!("{} arcs for {} edges", o.arcs.len(), g.edge_count()));
    }
    for (&e, &(a, b)) in &o.arcs {
        if !g.endpoints(e).is_ok_and(|(x, y)| (x, y) == (a, b) || (x, y) == (b, a)) {
            problems.push(format!("arc {e} does not match an edge"));
        }
    }
    problems
}

fn check_orientation(c: &OrientationCertificate) -> crate::Result<Vec<String>> {
    let g = c.graph.to_graph()?;
    let mut problems = orientation_problems(&g, &c.orientation);
    if problems.is_empty() {
        let arcs: Vec<(VertexId, VertexId)> = c.orientation.arcs.values().copied().collect();
        let flow = rooted_arc_flow(g.vertex_set(), &arcs, g.vertex_set(), c.k);
        if flow < c.k {
            problems.push(format!("some ordered pair has only {flow} arc-disjoint paths"));
        }
    }
    Ok(problems)
}

// ---- family certificates

fn host(family: &FamilyDescriptor, depth: u32) -> crate::Result<Truncation> {
    let (f, roots) = LazyFamily::from_descriptor(family)?;
    truncate(&f, &roots, depth)
}

fn check_infinite_linkage(c: &InfiniteLinkage) -> crate::Result<Vec<String>> {
    let t = host(&c.family, c.depth)?;
    let mut problems = Vec::new();
    if c.k % 2 == 0 {
        problems.push(format!("k = {} is even", c.k));
    }
    if c.terminals.len() != c.k || c.pairs.len() != c.k {
        problems.push(format!("expected {} pairs", c.k));
    }
    for (i, ((a, b), &(s, t_))) in c.terminals.iter().zip(&c.pairs).enumerate() {
        if t.id(a) != Some(s) || t.id(b) != Some(t_) {
            problems.push(format!("pair {i} does not match its terminal keys"));
        }
    }
    problems.extend(linkage_problems(&t.graph, &c.pairs, &c.linkage));
    Ok(problems)
}

fn fan_problems(g: &MultiGraph, req: &FanRequest, res: &FanResult) -> Vec<String> {
    let mut problems = Vec::new();
    if res.paths.len() != req.rays.len() {
        problems.push(format!("{} paths for {} rays", res.paths.len(), req.rays.len()));
        return problems;
    }
    let mut owner = BTreeMap::new();
    for (i, ray) in req.rays.iter().enumerate() {
        if !walk_in(g, ray) {
            problems.push(format!("ray {i} is not a walk"));
        }
        for &e in &ray.edges {
            if let Some(j) = owner.insert(e, i) {
                if j != i {
                    problems.push(format!("rays {j} and {i} share edge {e}"));
                }
            }
        }
    }
    let need = req.min_len.unwrap_or(res.min_len);
    if res.min_len < need {
        problems.push(format!("segment length {} below the requested {need}", res.min_len));
    }
    let mut used = BTreeSet::new();
    for (i, (p, ray)) in res.paths.iter().zip(&req.rays).enumerate() {
        if !walk_in(g, p) {
            problems.push(format!("fan path {i} is not a walk"));
            continue;
        }
        if p.vertices[0] != res.hub {
            problems.push(format!("fan path {i} does not start at the hub"));
        }
        for &e in &p.edges {
            if req.x.contains(&e) {
                problems.push(format!("fan path {i} uses forbidden edge {e}"));
            }
            if !used.insert(e) {
                problems.push(format!("edge {e} used by two fan paths"));
            }
        }
        let l = res.min_len;
        let tail: Vec<EdgeId> = p.edges.iter().rev().take(l).copied().collect();
        let ends_at_origin = p.vertices.last() == ray.vertices.first();
        if ray.edges.len() < l || tail.len() < l || tail[..] != ray.edges[..l] || !ends_at_origin {
            problems.push(format!("fan path {i} does not end with {l} edges of its ray"));
        }
    }
    problems
}

fn check_fan(c: &FanDocument) -> crate::Result<Vec<String>> {
    let t = host(&c.family, c.depth)?;
    Ok(fan_problems(&t.graph, &c.request, &c.result))
}

fn immersion_problems(host: &MultiGraph, c: &ImmersionCertificate) -> Vec<String> {
    let h = match c.h.to_graph() {
        Ok(h) => h,
        Err(e) => return vec![e.to_string()],
    };
    let mut problems = Vec::new();
    let a: BTreeSet<VertexId> = c.a.iter().copied().collect();
    if !c.a0.iter().all(|v| a.contains(v)) {
        problems.push("A does not contain A0".into());
    }
    let images: BTreeSet<VertexId> = c.branch.values().copied().collect();
    if images.len() != c.branch.len() || h.vertices().any(|v| !c.branch.contains_key(&v)) {
        problems.push("branch map is not injective on V(H)".into());
        return problems;
    }
    if !images.iter().all(|&v| host.contains_vertex(v)) {
        problems.push("a branch vertex is missing from the host".into());
        return problems;
    }
    let mut used: BTreeMap<EdgeId, String> = BTreeMap::new();
    let mut claim = |x: EdgeId, by: String, problems: &mut Vec<String>| {
        if let Some(prev) = used.insert(x, by.clone()) {
            problems.push(format!("host edge {x} used by {prev} and {by}"));
        }
    };
    for (e, u, v) in h.edges() {
        let Some(p) = c.paths.get(&e) else {
            problems.push(format!("no host path for {e}"));
            continue;
        };
        let ends = (p.vertices.first().copied(), p.vertices.last().copied());
        if !walk_in(host, p) || ends != (Some(c.branch[&u]), Some(c.branch[&v])) {
            problems.push(format!("host path of {e} does not join its branch vertices"));
        }
        for &x in &p.edges {
            claim(x, format!("the path of {e}"), &mut problems);
        }
    }
    for (i, (v, w)) in c.loops.iter().enumerate() {
        let at = c.branch.get(v).copied();
        if at.is_none() || !walk_in(host, w) || w.vertices.first().copied() != at || w.vertices.last().copied() != at {
            problems.push(format!("closed walk {i} does not return to its branch vertex"));
        }
        for &x in &w.edges {
            claim(x, format!("closed walk {i}"), &mut problems);
        }
    }
    for (e, x, y) in host.edges() {
        if a.contains(&x) && a.contains(&y) {
            let same = h.endpoints(e).is_ok_and(|(u, v)| (u, v) == (x, y) || (u, v) == (y, x));
            if !same || c.paths.get(&e).map(|p| p.edges.as_slice()) != Some(&[e][..]) {
                problems.push(format!("edge {e} inside A is not mapped to itself"));
            }
        }
    }
    for v in h.vertices().filter(|v| !a.contains(v)) {
        if h.degree(v) != 2 * c.k + 1 {
            problems.push(format!("branch vertex {v} has degree {}", h.degree(v)));
        }
    }
    for e in c.boundary.iter().filter(|e| !used.contains_key(e)) {
        problems.push(format!("boundary edge {e} is not covered"));
    }
    if !k_edge_connected(&h, 2 * c.k) {
        problems.push(format!("H is not {}-edge-connected", 2 * c.k));
    }
    problems
}

fn check_orient_run(c: &OrientRun) -> crate::Result<Vec<String>> {
    let mut problems = Vec::new();
    let mut previous: Option<&Orientation> = None;
    for r in &c.rounds {
        let tag = |s: String| format!("round {}: {s}", r.round);
        if r.immersion.family != c.family || r.immersion.k != c.k {
            problems.push(tag("immersion belongs to another family or k".into()));
        }
        let t = host(&r.immersion.family, r.immersion.depth)?;
        problems.extend(immersion_problems(&t.graph, &r.immersion).into_iter().map(tag));
        let o = &r.orientation;
        for (&e, &(a, b)) in &o.arcs {
            if !t.graph.endpoints(e).is_ok_and(|(x, y)| (x, y) == (a, b) || (x, y) == (b, a)) {
                problems.push(tag(format!("arc {e} does not match a host edge")));
            }
        }
        let image_edges = r.immersion.paths.values().chain(r.immersion.loops.iter().map(|(_, w)| w));
        if let Some(e) = image_edges.flat_map(|w| w.edges.iter()).find(|e| !o.arcs.contains_key(e)) {
            problems.push(tag(format!("image edge {e} is not oriented")));
        }
        if let Some(p) = previous {
            if p.arcs.iter().any(|(e, d)| o.arcs.get(e) != Some(d)) {
                problems.push(tag("an earlier arc was dropped or reversed".into()));
            }
        }
        let vertices: BTreeSet<VertexId> = o.arcs.values().flat_map(|&(a, b)| [a, b]).chain(r.branch_vertices.iter().copied()).collect();
        let arcs: Vec<(VertexId, VertexId)> = o.arcs.values().copied().collect();
        let branch: BTreeSet<VertexId> = r.branch_vertices.iter().copied().collect();
        let flow = rooted_arc_flow(&vertices, &arcs, &branch, c.k);
        if flow < c.k {
            problems.push(tag(format!("branch vertices are only {flow}-arc-connected")));
        }
        previous = Some(o);
    }
    Ok(problems)
}
