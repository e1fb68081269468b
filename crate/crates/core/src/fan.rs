//! Linking fans: from a hub far out in an end, edge-disjoint paths back to the
//! origins of given rays, avoiding a finite edge set.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decomposition::DepthPolicy;
use crate::error::{Error, Result};
use crate::family::{EdgeKey, FamilyKind, LazyFamily, VertexKey};
use crate::flow::GraphFlow;
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::rays::RayTail;
use crate::truncation::{truncate, Truncation};
use crate::walk::Walk;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanRequest {
    /// Pairwise edge-disjoint ray prefixes, each starting at its origin.
    pub rays: Vec<Walk>,
    /// Forbidden edges.
    pub x: BTreeSet<EdgeId>,
    /// Further vertices the construction must treat as part of `L0`.
    pub blocked: BTreeSet<VertexId>,
    /// Minimum initial-segment length; `None` selects `3·(m + |V(X)|)`.
    pub min_len: Option<usize>,
    /// Assumed edge-connectivity of the host.
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanResult {
    pub hub: VertexId,
    /// Path `i` runs from the hub to the origin of ray `i`.
    pub paths: Vec<Walk>,
    /// `L0, L1, …, Lm` as vertex sets.
    pub layers: Vec<BTreeSet<VertexId>>,
    /// `C1, …, C(m+1)`.
    pub components: Vec<BTreeSet<VertexId>>,
    /// Length of the ray prefix contained in each path.
    pub segment_lengths: Vec<usize>,
    pub min_len: usize,
    /// Value of the u–v flow in the auxiliary graph.
    pub flow_value: usize,
}

impl FanRequest {
    pub fn effective_len(&self, g: &MultiGraph) -> usize {
        self.min_len.unwrap_or_else(|| {
            let xv: BTreeSet<VertexId> = self
                .x
                .iter()
                .filter_map(|&e| g.endpoints(e).ok())
                .flat_map(|(a, b)| [a, b])
                .collect();
            3 * (self.rays.len() + xv.len())
        })
    }
}

impl FanResult {
    /// Edge-disjointness, X-avoidance, segment containment and common hub.
    pub fn check(&self, g: &MultiGraph, req: &FanRequest) -> std::result::Result<(), String> {
        if self.paths.len() != req.rays.len() {
            return Err("wrong number of paths".into());
        }
        let mut used = BTreeSet::new();
        for (i, p) in self.paths.iter().enumerate() {
            if !p.is_walk_in(g) {
                return Err(format!("path {i} is not a walk"));
            }
            if p.start() != Some(self.hub) {
                return Err(format!("path {i} does not start at the hub"));
            }
            for &e in &p.edges {
                if req.x.contains(&e) {
                    return Err(format!("path {i} uses forbidden edge {e}"));
                }
                if !used.insert(e) {
                    return Err(format!("edge {e} used twice"));
                }
            }
            let ray = &req.rays[i];
            let l = self.min_len;
            let back = p.reversed();
            if ray.len() < l || back.len() < l || back.edges[..l] != ray.edges[..l] || back.start() != ray.start() {
                return Err(format!("path {i} lacks the first {l} edges of its ray"));
            }
        }
        Ok(())
    }

    /// Each `L_i` (i ≥ 1) induces a connected graph, layers are disjoint and
    /// nothing in `C(i+1)` is adjacent to `L(i-1)`.
    pub fn check_layers(&self, g: &MultiGraph) -> std::result::Result<(), String> {
        let mut seen = BTreeSet::new();
        for (i, l) in self.layers.iter().enumerate() {
            if i > 0 && !g.induces_connected(l) {
                return Err(format!("layer {i} is not connected"));
            }
            for v in l {
                if !seen.insert(*v) {
                    return Err(format!("{v} lies in two layers"));
                }
            }
        }
        for i in 1..self.layers.len() {
            let beyond = &self.components[i];
            if !beyond.is_disjoint(&self.layers[i]) {
                return Err(format!("component {} meets layer {i}", i + 1));
            }
            if self.layers[i - 1].iter().any(|&v| g.neighbors(v).iter().any(|w| beyond.contains(w))) {
                return Err(format!("layer {} touches component {}", i - 1, i + 1));
            }
        }
        Ok(())
    }
}

fn exhausted(reason: impl Into<String>) -> Error {
    Error::DepthExhausted { cap: 0, reason: reason.into() }
}

/// The component of `g[allowed]` containing `seed`.
fn component_of(g: &MultiGraph, allowed: &BTreeSet<VertexId>, seed: VertexId) -> BTreeSet<VertexId> {
    g.reach(seed, |v| allowed.contains(&v))
}

/// Connected subgraph of `g[within]` containing `targets`: union of BFS-tree
/// paths from the least target. Returns vertices and tree edges.
fn spanning_layer(
    g: &MultiGraph,
    within: &BTreeSet<VertexId>,
    targets: &BTreeSet<VertexId>,
) -> Option<(BTreeSet<VertexId>, BTreeSet<EdgeId>)> {
    let &root = targets.iter().next()?;
    let mut verts = BTreeSet::from([root]);
    let mut edges = BTreeSet::new();
    let inside = |e: EdgeId| {
        let (a, b) = g.endpoints(e).expect("edge");
        within.contains(&a) && within.contains(&b)
    };
    for &t in targets.iter().skip(1) {
        if verts.contains(&t) {
            continue;
        }
        let p = g.shortest_path(root, t, inside)?;
        verts.extend(p.vertices.iter().copied());
        edges.extend(p.edges.iter().copied());
    }
    Some((verts, edges))
}

/// The fan construction on a finite host standing in for the infinite graph.
/// Failures caused by the host being too small are reported as
/// `DepthExhausted` so callers can retry on a larger truncation.
pub fn linking_fan(g: &MultiGraph, frontier: &BTreeSet<VertexId>, req: &FanRequest) -> Result<FanResult> {
    let m = req.rays.len();
    if m > req.k {
        return Err(Error::PreconditionViolated(format!("{m} rays exceed connectivity {}", req.k)));
    }
    let mut ray_edges = BTreeSet::new();
    for r in &req.rays {
        if !r.is_walk_in(g) || r.vertices.is_empty() {
            return Err(Error::PreconditionViolated("ray is not a walk in the host".into()));
        }
        for &e in &r.edges {
            if req.x.contains(&e) {
                return Err(Error::PreconditionViolated(format!("X meets a ray at {e}")));
            }
            if !ray_edges.insert(e) {
                return Err(Error::PreconditionViolated(format!("rays share {e}")));
            }
        }
    }
    let min_len = req.effective_len(g);
    let mut l0: BTreeSet<VertexId> = req.blocked.clone();
    for &e in &req.x {
        let (a, b) = g.endpoints(e)?;
        l0.insert(a);
        l0.insert(b);
    }
    for r in &req.rays {
        if r.len() < min_len {
            return Err(exhausted(format!("ray shorter than {min_len}")));
        }
        l0.extend(r.vertices[..=min_len].iter().copied());
    }
    if m == 0 {
        let hub = g
            .vertices()
            .find(|v| !l0.contains(v))
            .ok_or_else(|| exhausted("no vertex outside L0"))?;
        return Ok(FanResult {
            hub,
            paths: Vec::new(),
            layers: vec![l0],
            components: Vec::new(),
            segment_lengths: Vec::new(),
            min_len,
            flow_value: 0,
        });
    }
    // R0: each ray up to its last visit to L0.
    let last_visit: Vec<usize> = req
        .rays
        .iter()
        .map(|r| r.vertices.iter().rposition(|v| l0.contains(v)).expect("origin in L0"))
        .collect();
    let mut b0 = BTreeSet::new();
    for (r, &j) in req.rays.iter().zip(&last_visit) {
        b0.extend(r.vertices[..=j].iter().copied());
    }
    let ray_end = *req.rays[0].vertices.last().unwrap();
    if l0.contains(&ray_end) || b0.contains(&ray_end) {
        return Err(exhausted("ray ends inside L0"));
    }
    let mut allowed: BTreeSet<VertexId> = g.vertex_set().clone();
    allowed.retain(|v| !l0.contains(v) && !b0.contains(v));
    let c1 = component_of(g, &allowed, ray_end);
    for r in &req.rays {
        if !c1.contains(r.vertices.last().unwrap()) {
            return Err(exhausted("rays end in different components"));
        }
    }
    let mut layers = vec![l0.clone()];
    let mut components = vec![c1.clone()];
    let mut layer_edges: BTreeSet<EdgeId> = BTreeSet::new();
    let mut prev: BTreeSet<VertexId> = l0.union(&b0).copied().collect();
    for i in 1..=m {
        let ci = components[i - 1].clone();
        let targets: BTreeSet<VertexId> = prev
            .iter()
            .flat_map(|&v| g.neighbors(v))
            .filter(|w| ci.contains(w))
            .collect();
        let (li, ei) = spanning_layer(g, &ci, &targets).ok_or_else(|| exhausted(format!("layer {i} empty")))?;
        let rest: BTreeSet<VertexId> = ci.difference(&li).copied().collect();
        let seed = rest
            .iter()
            .copied()
            .filter(|v| frontier.contains(v))
            .find(|&v| req.rays.iter().any(|r| r.vertices.last() == Some(&v)))
            .or_else(|| rest.iter().copied().find(|v| frontier.contains(v)))
            .ok_or_else(|| exhausted(format!("nothing beyond layer {i}")))?;
        let next = component_of(g, &rest, seed);
        layer_edges.extend(ei);
        layers.push(li.clone());
        components.push(next);
        prev = li;
    }
    let hub = *components[m].iter().next().expect("nonempty component");
    let c1_edge = |e: EdgeId| {
        let (a, b) = g.endpoints(e).expect("edge");
        c1.contains(&a) && c1.contains(&b)
    };
    // Q paths: hub to L1 inside C1.
    let mut qflow = GraphFlow::new(g, c1_edge);
    qflow.attach_source(hub, 0)?;
    for _ in 1..m {
        qflow.attach_source(hub, 0)?;
    }
    for &v in &layers[1] {
        qflow.attach_sink(v, m)?;
    }
    if qflow.run(m) < m {
        return Err(exhausted("fewer than m hub paths into L1"));
    }
    let q_edges: BTreeSet<EdgeId> = qflow.tagged_paths().into_iter().flat_map(|(_, w)| w.edges).collect();
    // P^R: from the last L0 visit to the first visit of Lm.
    let lm = &layers[m];
    let mut pr_edges = BTreeSet::new();
    for (r, &j) in req.rays.iter().zip(&last_visit) {
        let hit = r.vertices[j..]
            .iter()
            .position(|v| lm.contains(v))
            .ok_or_else(|| exhausted("ray never reaches the last layer"))?;
        pr_edges.extend(r.edges[j..j + hit].iter().copied());
    }
    // H with L0 contracted to u.
    let mut support: BTreeSet<EdgeId> = layer_edges;
    support.extend(q_edges);
    support.extend(pr_edges);
    let mut h = MultiGraph::new();
    for &e in &support {
        let (a, b) = g.endpoints(e)?;
        h.insert_vertex(a);
        h.insert_vertex(b);
        if !(l0.contains(&a) && l0.contains(&b)) {
            h.insert_edge(e, a, b)?;
        }
    }
    let l0_in_h: BTreeSet<VertexId> = l0.iter().copied().filter(|v| h.contains_vertex(*v)).collect();
    let (hc, _) = h.identify(&l0_in_h)?;
    let u = *l0_in_h.iter().next().ok_or_else(|| exhausted("L0 absent from H"))?;
    let mut flow = GraphFlow::new(&hc, |_| true);
    for _ in 0..m {
        flow.attach_source(u, 0)?;
    }
    flow.attach_sink(hub, m)?;
    let flow_value = flow.run(m);
    if flow_value < m {
        return Err(exhausted(format!("auxiliary flow {flow_value} below {m}")));
    }
    let by_first: BTreeMap<EdgeId, usize> = req
        .rays
        .iter()
        .zip(&last_visit)
        .enumerate()
        .map(|(i, (r, &j))| (r.edges[j], i))
        .collect();
    let mut paths: Vec<Option<Walk>> = vec![None; m];
    for (_, w) in flow.tagged_paths() {
        let i = *by_first
            .get(&w.edges[0])
            .ok_or_else(|| Error::Internal("flow path leaves L0 off a ray".into()))?;
        let j = last_visit[i];
        let start = req.rays[i].vertices[j];
        let mut full = Walk {
            vertices: req.rays[i].vertices[..=j].to_vec(),
            edges: req.rays[i].edges[..j].to_vec(),
        };
        let mut tail = w.clone();
        tail.vertices[0] = start;
        full.extend(&tail);
        paths[i] = Some(full.reversed());
    }
    let paths: Vec<Walk> = paths
        .into_iter()
        .map(|p| p.ok_or_else(|| Error::Internal("ray without fan path".into())))
        .collect::<Result<_>>()?;
    Ok(FanResult {
        hub,
        paths,
        layers,
        components,
        segment_lengths: last_visit,
        min_len,
        flow_value,
    })
}

/// A straight periodic ray given by its origin and repeated template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicRay {
    pub start: VertexKey,
    pub tail: RayTail,
}

/// A fan request phrased in family coordinates, independent of depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFanRequest {
    pub rays: Vec<PeriodicRay>,
    pub x: Vec<EdgeKey>,
    pub min_len: Option<usize>,
    pub k: usize,
}

/// The prefix of a periodic ray inside the truncation.
pub fn materialize_ray(t: &Truncation, r: &PeriodicRay) -> Result<Walk> {
    let FamilyKind::Periodic(p) = &t.family.kind else {
        return Err(Error::PreconditionViolated("periodic rays need a periodic family".into()));
    };
    let tp = p
        .templates
        .get(r.tail.template as usize)
        .filter(|tp| tp.from == r.start.cell && tp.to == r.start.cell)
        .ok_or_else(|| Error::PreconditionViolated("ray template is not a self-translation".into()))?;
    let s = if r.tail.forward { 1 } else { -1 };
    let mut cur = r.start;
    let mut walk = Walk::trivial(t.id(&cur).ok_or_else(|| exhausted("ray origin outside the truncation"))?);
    loop {
        let next = VertexKey { pos: [cur.pos[0] + s * tp.offset[0], cur.pos[1] + s * tp.offset[1]], cell: cur.cell };
        let anchor = if r.tail.forward { cur } else { next };
        let (Some(v), Some(e)) = (t.id(&next), t.edge_id(&EdgeKey { anchor, template: r.tail.template })) else {
            break;
        };
        walk.push(e, v);
        cur = next;
    }
    Ok(walk)
}

/// Translates a family request into a truncation at depth `depth`.
pub fn request_at(t: &Truncation, req: &FamilyFanRequest) -> Result<FanRequest> {
    let rays = req.rays.iter().map(|r| materialize_ray(t, r)).collect::<Result<Vec<_>>>()?;
    let x = req
        .x
        .iter()
        .map(|k| t.edge_id(k).ok_or_else(|| exhausted("X outside the truncation")))
        .collect::<Result<BTreeSet<_>>>()?;
    Ok(FanRequest {
        rays,
        x,
        blocked: BTreeSet::new(),
        min_len: req.min_len,
        k: req.k,
    })
}

#[derive(Debug, Clone)]
pub struct FamilyFan {
    pub truncation: Truncation,
    pub request: FanRequest,
    pub result: FanResult,
}

/// [`linking_fan`] on truncations of growing depth.
pub fn linking_fan_family(
    f: &LazyFamily,
    roots: &[VertexKey],
    req: &FamilyFanRequest,
    policy: DepthPolicy,
) -> Result<FamilyFan> {
    let mut reason = String::new();
    for d in policy.depths() {
        let t = truncate(f, roots, d)?;
        let attempt = request_at(&t, req).and_then(|r| linking_fan(&t.graph, t.frontier(), &r).map(|res| (r, res)));
        match attempt {
            Ok((request, result)) => {
                return Ok(FamilyFan { truncation: t, request, result });
            }
            Err(Error::DepthExhausted { reason: r, .. }) => reason = r,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DepthExhausted { cap: policy.cap, reason })
}

/// Random request on the square grid: `m` straight rays on distinct parallel
/// lines in one direction, a few forbidden edges off the rays, and `L ≤ 10`.
pub fn random_grid_fan_request<R: Rng>(rng: &mut R, m: usize, k: usize) -> FamilyFanRequest {
    let template = rng.gen_range(0..2u32);
    let forward = rng.gen_bool(0.5);
    let mut lines: Vec<i64> = (-4..=4).collect();
    lines.shuffle(rng);
    let rays: Vec<PeriodicRay> = lines[..m]
        .iter()
        .map(|&line| {
            let along = rng.gen_range(-3..=3);
            let pos = if template == 0 { [along, line] } else { [line, along] };
            PeriodicRay { start: VertexKey { pos, cell: 0 }, tail: RayTail { template, forward } }
        })
        .collect();
    let on_ray = |e: &EdgeKey| {
        e.template == template
            && rays.iter().any(|r| {
                let (fixed, along) = if template == 0 { (1, 0) } else { (0, 1) };
                let a = e.anchor.pos[along];
                let s = r.start.pos[along];
                e.anchor.pos[fixed] == r.start.pos[fixed] && if forward { a >= s } else { a < s }
            })
    };
    let nx = rng.gen_range(0..=6);
    let mut x = BTreeSet::new();
    while x.len() < nx {
        let e = EdgeKey {
            anchor: VertexKey::new(rng.gen_range(-5..=5), rng.gen_range(-5..=5), 0),
            template: rng.gen_range(0..2),
        };
        if !on_ray(&e) {
            x.insert(e);
        }
    }
    FamilyFanRequest {
        rays,
        x: x.into_iter().collect(),
        min_len: Some(rng.gen_range(1..=10)),
        k,
    }
}
