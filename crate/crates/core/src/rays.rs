//! Edge-disjoint rays witnessing that a set is boundary-linked, verified on
//! a truncation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{FamilyKind, VertexKey};
use crate::flow::GraphFlow;
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::truncation::Truncation;
use crate::walk::Walk;

/// Periodic continuation: repeat one self-translation template forever.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayTail {
    pub template: u32,
    pub forward: bool,
}

/// A ray prefix starting at the outer end of its boundary edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ray {
    pub walk: Walk,
    pub tail: Option<RayTail>,
}

impl Ray {
    pub fn first_edge(&self) -> EdgeId {
        self.walk.edges[0]
    }

    /// First vertex inside the owner set.
    pub fn inner_start(&self) -> VertexId {
        self.walk.vertices[1]
    }

    /// The part of the ray inside the owner set.
    pub fn inner(&self) -> Walk {
        Walk {
            vertices: self.walk.vertices[1..].to_vec(),
            edges: self.walk.edges[1..].to_vec(),
        }
    }

    /// `n` further vertices obtained by following the periodic tail.
    pub fn extended_keys(&self, t: &Truncation, n: usize) -> Vec<VertexKey> {
        let (Some(tail), FamilyKind::Periodic(p)) = (self.tail, &t.family.kind) else {
            return Vec::new();
        };
        let off = p.templates[tail.template as usize].offset;
        let sign = if tail.forward { 1 } else { -1 };
        let mut cur = t.key(*self.walk.vertices.last().expect("nonempty"));
        (0..n)
            .map(|_| {
                cur.pos = [cur.pos[0] + sign * off[0], cur.pos[1] + sign * off[1]];
                cur
            })
            .collect()
    }
}

/// Rays for one set `C`, given by its vertices inside the truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaySystem {
    pub owner: BTreeSet<VertexId>,
    pub boundary: Vec<EdgeId>,
    pub rays: Vec<Ray>,
    pub depth: u32,
}

impl RaySystem {
    pub fn ray_for(&self, e: EdgeId) -> Option<&Ray> {
        self.rays.iter().find(|r| r.first_edge() == e)
    }

    pub fn edges(&self) -> BTreeSet<EdgeId> {
        self.rays.iter().flat_map(|r| r.walk.edges.iter().copied()).collect()
    }

    /// Machine check of the ray invariants on `t`.
    pub fn validate(&self, t: &Truncation) -> std::result::Result<(), String> {
        let g = &t.graph;
        let firsts: BTreeSet<EdgeId> = self.rays.iter().map(|r| r.first_edge()).collect();
        let boundary: BTreeSet<EdgeId> = self.boundary.iter().copied().collect();
        if firsts != boundary || self.rays.len() != boundary.len() {
            return Err("first edges differ from the boundary".into());
        }
        if boundary != g.boundary(&self.owner).into_iter().collect() {
            return Err("recorded boundary is not the boundary of the owner".into());
        }
        let mut used = BTreeSet::new();
        for r in &self.rays {
            if !r.walk.is_walk_in(g) || !r.walk.is_simple() {
                return Err(format!("ray from {} is not a path", r.first_edge()));
            }
            if self.owner.contains(&r.walk.vertices[0])
                || !r.walk.vertices[1..].iter().all(|v| self.owner.contains(v))
            {
                return Err(format!("ray from {} leaves its set", r.first_edge()));
            }
            if !t.is_frontier(*r.walk.vertices.last().unwrap()) {
                return Err(format!("ray from {} stops before the frontier", r.first_edge()));
            }
            for &e in &r.walk.edges {
                if !used.insert(e) {
                    return Err(format!("edge {e} shared by two rays"));
                }
            }
        }
        let ends: Vec<VertexId> = self.rays.iter().map(|r| *r.walk.vertices.last().unwrap()).collect();
        if let Some(&first) = ends.first() {
            let comps = deep_components(t, &self.owner);
            let which = |v: VertexId| comps.iter().position(|c| c.contains(&v));
            if ends.iter().any(|&v| which(v).is_none() || which(v) != which(first)) {
                return Err("rays end in different deep components".into());
            }
        }
        Ok(())
    }
}

/// `δ(C)` computed in the truncation. Fails when a boundary edge touches the
/// frontier, since further boundary edges could then lie beyond the ball.
pub fn boundary_of(t: &Truncation, c: &BTreeSet<VertexId>) -> Result<Vec<EdgeId>> {
    let boundary = t.graph.boundary(c);
    for &e in &boundary {
        let (a, b) = t.graph.endpoints(e)?;
        if t.is_frontier(a) || t.is_frontier(b) {
            return Err(Error::BoundaryNotFinite(t.depth));
        }
    }
    Ok(boundary)
}

/// Components of the part of `T[C]` at distance at least `depth / 2` that
/// reach the frontier.
pub fn deep_components(t: &Truncation, c: &BTreeSet<VertexId>) -> Vec<BTreeSet<VertexId>> {
    let half = t.depth / 2;
    let deep: BTreeSet<VertexId> = c.iter().copied().filter(|&v| t.dist(v) >= half).collect();
    let sub = t.graph.induced(&deep);
    let mut comps: Vec<BTreeSet<VertexId>> = sub
        .components()
        .into_iter()
        .filter(|comp| comp.iter().any(|&v| t.is_frontier(v)))
        .collect();
    comps.sort_by_key(|comp| (std::cmp::Reverse(comp.len()), comp.iter().next().copied()));
    comps
}

fn choose_tail(t: &Truncation, last: VertexId) -> Option<RayTail> {
    let FamilyKind::Periodic(p) = &t.family.kind else {
        return None;
    };
    let key = t.key(last);
    let root = t.roots.first().copied().unwrap_or(VertexKey::ORIGIN);
    let norm = |pos: [i64; 2]| (pos[0] - root.pos[0]).abs() + (pos[1] - root.pos[1]).abs();
    let here = norm(key.pos);
    let mut best: Option<(i64, RayTail)> = None;
    for (i, tp) in p.templates.iter().enumerate() {
        if tp.from != key.cell || tp.to != key.cell {
            continue;
        }
        for forward in [true, false] {
            let s = if forward { 1 } else { -1 };
            let gain = norm([key.pos[0] + s * tp.offset[0], key.pos[1] + s * tp.offset[1]]) - here;
            if gain > 0 && best.map_or(true, |(b, _)| gain > b) {
                best = Some((gain, RayTail { template: i as u32, forward }));
            }
        }
    }
    best.map(|(_, tail)| tail)
}

/// Finds `|δ(C)|` edge-disjoint rays from the boundary to the frontier inside
/// `T[C]`, all ending in one deep component.
pub fn find_witnessing_rays(t: &Truncation, c: &BTreeSet<VertexId>) -> Result<RaySystem> {
    let boundary = boundary_of(t, c)?;
    let empty = RaySystem {
        owner: c.clone(),
        boundary: boundary.clone(),
        rays: Vec::new(),
        depth: t.depth,
    };
    if boundary.is_empty() {
        return Ok(empty);
    }
    let g: &MultiGraph = &t.graph;
    let mut last_value = 0;
    for comp in deep_components(t, c) {
        let mut flow = GraphFlow::new(g, |e| {
            let (a, b) = g.endpoints(e).expect("edge");
            c.contains(&a) && c.contains(&b)
        });
        let mut outer: BTreeMap<usize, VertexId> = BTreeMap::new();
        for (i, &e) in boundary.iter().enumerate() {
            let (a, b) = g.endpoints(e)?;
            let (out, inn) = if c.contains(&a) { (b, a) } else { (a, b) };
            outer.insert(i, out);
            flow.attach_source(inn, i)?;
        }
        for &v in comp.iter().filter(|&&v| t.is_frontier(v)) {
            flow.attach_sink(v, 1)?;
        }
        let value = flow.run(boundary.len());
        last_value = last_value.max(value);
        if value < boundary.len() {
            continue;
        }
        let mut rays: Vec<Ray> = flow
            .tagged_paths()
            .into_iter()
            .map(|(i, inner)| {
                let mut walk = Walk::trivial(outer[&i]);
                walk.push(boundary[i], inner.vertices[0]);
                walk.extend(&inner);
                let tail = choose_tail(t, *walk.vertices.last().unwrap());
                Ray { walk, tail }
            })
            .collect();
        rays.sort_by_key(|r| r.first_edge());
        return Ok(RaySystem { rays, ..empty });
    }
    Err(Error::NotVerified {
        depth: t.depth,
        reason: format!("only {last_value} of {} rays reach one end", boundary.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::LazyFamily;
    use crate::truncation::truncate;

    fn grid_t(d: u32) -> Truncation {
        let f = LazyFamily::grid(1);
        truncate(&f, &[f.origin()], d).unwrap()
    }

    #[test]
    fn grid_outside_a_box_has_full_ray_system() {
        let t = grid_t(8);
        let c: BTreeSet<VertexId> = t.graph.vertices().filter(|&v| t.dist(v) > 1).collect();
        let rs = find_witnessing_rays(&t, &c).unwrap();
        assert_eq!(rs.rays.len(), 12);
        rs.validate(&t).unwrap();
        assert!(rs.rays.iter().all(|r| r.tail.is_some()));
        let more = rs.rays[0].extended_keys(&t, 3);
        assert_eq!(more.len(), 3);
    }

    #[test]
    fn whole_graph_has_empty_system() {
        let t = grid_t(3);
        let c: BTreeSet<VertexId> = t.graph.vertices().collect();
        let rs = find_witnessing_rays(&t, &c).unwrap();
        assert!(rs.rays.is_empty());
    }

    #[test]
    fn boundary_at_frontier_is_not_finite() {
        let t = grid_t(2);
        let c: BTreeSet<VertexId> = t.graph.vertices().filter(|&v| t.dist(v) >= 2).collect();
        assert_eq!(find_witnessing_rays(&t, &c), Err(Error::BoundaryNotFinite(2)));
    }

    #[test]
    fn single_edge_corridor_blocks_verification() {
        // (1,0) has three boundary edges but only the edge to (2,0) leads on.
        let t = grid_t(8);
        let mut c: BTreeSet<VertexId> = t.graph.vertices().filter(|&v| t.dist(v) >= 3).collect();
        c.insert(t.id(&VertexKey::new(1, 0, 0)).unwrap());
        c.insert(t.id(&VertexKey::new(2, 0, 0)).unwrap());
        let r = find_witnessing_rays(&t, &c);
        assert!(matches!(r, Err(Error::NotVerified { .. })), "{r:?}");
    }
}
