//! Immersions of a finite `2k`-edge-connected graph around a finite vertex
//! set of a `(2k+1)`-edge-connected family.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::compatible::{compatible_splitting, CompatibleSplitting};
use crate::connectivity::is_k_edge_connected;
use crate::decomposition::{decompose_at, Decomposition, DepthPolicy};
use crate::error::{Error, Result};
use crate::fan::{linking_fan, FanRequest};
use crate::family::{FamilyDescriptor, LazyFamily, VertexKey};
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::infinite::FanCertificate;
use crate::io::IdentifiedGraph;
use crate::truncation::Truncation;
use crate::walk::Walk;

/// `H` together with its image in the truncation of `family` at `depth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmersionCertificate {
    pub family: FamilyDescriptor,
    pub depth: u32,
    pub k: usize,
    pub a0: Vec<VertexId>,
    pub a: Vec<VertexId>,
    pub h: IdentifiedGraph,
    /// Image of every vertex of `H`.
    #[serde(with = "crate::io::map_as_pairs")]
    pub branch: BTreeMap<VertexId, VertexId>,
    /// Host walk of every edge of `H`, from the image of its first endpoint.
    #[serde(with = "crate::io::map_as_pairs")]
    pub paths: BTreeMap<EdgeId, Walk>,
    /// Closed host walks for lifted pairs that would have become loops of
    /// `H`, with the vertex of `H` they hang from.
    pub loops: Vec<(VertexId, Walk)>,
    /// Boundary edges of all boundary-linked sets.
    pub boundary: Vec<EdgeId>,
    pub fans: Vec<FanCertificate>,
}

impl ImmersionCertificate {
    /// Structural checks against the host graph.
    pub fn validate(&self, host: &MultiGraph) -> std::result::Result<(), String> {
        let h = self.h.to_graph().map_err(|e| e.to_string())?;
        let a: BTreeSet<VertexId> = self.a.iter().copied().collect();
        let images: BTreeSet<VertexId> = self.branch.values().copied().collect();
        if images.len() != self.branch.len() || h.vertices().any(|v| !self.branch.contains_key(&v)) {
            return Err("branch map is not an injection on V(H)".into());
        }
        let mut used = BTreeSet::new();
        for (e, u, v) in h.edges() {
            let p = self.paths.get(&e).ok_or_else(|| format!("no path for {e}"))?;
            if !p.is_walk_in(host) || p.start() != Some(self.branch[&u]) || p.end() != Some(self.branch[&v]) {
                return Err(format!("path of {e} does not join its branch vertices"));
            }
            for &x in &p.edges {
                if !used.insert(x) {
                    return Err(format!("host edge {x} used twice"));
                }
            }
        }
        for (v, w) in &self.loops {
            let at = self.branch.get(v).copied();
            if at.is_none() || !w.is_walk_in(host) || w.start() != at || w.end() != at {
                return Err(format!("loop at {v} is not a closed walk at its branch vertex"));
            }
            for &x in &w.edges {
                if !used.insert(x) {
                    return Err(format!("host edge {x} used twice"));
                }
            }
        }
        for (e, x, y) in host.edges() {
            if a.contains(&x) && a.contains(&y) {
                let same = h.endpoints(e).ok().is_some_and(|(u, v)| (u, v) == (x, y) || (u, v) == (y, x));
                if !same || self.paths.get(&e).map(|p| p.edges.as_slice()) != Some(&[e][..]) {
                    return Err(format!("edge {e} of G[A] is not its own image"));
                }
            }
        }
        for v in h.vertices().filter(|v| !a.contains(v)) {
            if h.degree(v) != 2 * self.k + 1 {
                return Err(format!("branch vertex {v} has degree {}", h.degree(v)));
            }
        }
        if let Some(e) = self.boundary.iter().find(|e| !used.contains(e)) {
            return Err(format!("boundary edge {e} is not covered"));
        }
        if !is_k_edge_connected(&h, 2 * self.k) {
            return Err(format!("H is not {}-edge-connected", 2 * self.k));
        }
        Ok(())
    }
}

/// Result of [`immerse`] with the working objects kept.
#[derive(Debug, Clone)]
pub struct Immersion {
    pub truncation: Truncation,
    pub h: MultiGraph,
    pub certificate: ImmersionCertificate,
}

/// Decomposes around `a0`, splits at `2k`, and maps every surviving
/// contracted vertex to the hub of a linking fan on its `2k + 1` rays.
pub fn immerse(f: &LazyFamily, a0: &BTreeSet<VertexKey>, k: usize, policy: DepthPolicy) -> Result<Immersion> {
    if k == 0 {
        return Err(Error::PreconditionViolated("k must be positive".into()));
    }
    let roots = [f.origin()];
    let mut reason = String::new();
    for d in policy.depths() {
        let attempt = decompose_at(f, &roots, a0, d).and_then(|dec| {
            let split = compatible_splitting(&dec.truncation.graph, &dec.sets, 2 * k, 2 * k)?;
            assemble(f, &roots, dec, &split, k)
        });
        match attempt {
            Ok(out) => return Ok(out),
            Err(e @ Error::Stuck(_)) => reason = e.to_string(),
            Err(e) if e.is_non_authoritative() => reason = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(Error::DepthExhausted { cap: policy.cap, reason })
}

fn assemble(
    f: &LazyFamily,
    roots: &[VertexKey],
    dec: Decomposition,
    split: &CompatibleSplitting,
    k: usize,
) -> Result<Immersion> {
    let t = &dec.truncation;
    let h = &split.h;
    let mut branch: BTreeMap<VertexId, VertexId> = h.vertices().map(|v| (v, v)).collect();
    let mut fans = Vec::new();
    let mut fan_path: BTreeMap<(EdgeId, VertexId), Walk> = BTreeMap::new();
    for (i, &c) in split.contracted.iter().enumerate() {
        if !h.contains_vertex(c) {
            continue;
        }
        let edges: Vec<EdgeId> = h.incident(c).to_vec();
        let set = &dec.sets[i];
        let rays = edges
            .iter()
            .map(|&e| {
                let b = split.anchor[&(e, c)];
                set.rays
                    .ray_for(b)
                    .map(|r| r.inner())
                    .ok_or_else(|| Error::Internal(format!("no ray for boundary edge {b}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let request = FanRequest {
            rays,
            x: split.paths_in(i).flat_map(|l| l.path.edges.iter().copied()).collect(),
            blocked: t.graph.vertices().filter(|v| !set.members.contains(v)).collect(),
            min_len: Some(1),
            k: 2 * k + 1,
        };
        let result = linking_fan(&t.graph, t.frontier(), &request)?;
        branch.insert(c, result.hub);
        for (j, &e) in edges.iter().enumerate() {
            fan_path.insert((e, c), result.paths[j].clone());
        }
        fans.push(FanCertificate { set: i, contracted: c, edges, request, result });
    }
    let mut paths = BTreeMap::new();
    for (e, u, v) in h.edges() {
        let mut w = fan_path.get(&(e, u)).cloned().unwrap_or_else(|| Walk::trivial(u));
        w.extend(&split.realize_from(e, u));
        if let Some(back) = fan_path.get(&(e, v)) {
            w.extend(&back.reversed());
        }
        paths.insert(e, w);
    }
    let boundary = dec.sets.iter().flat_map(|s| s.boundary().iter().copied()).collect();
    let certificate = ImmersionCertificate {
        family: f.descriptor(roots),
        depth: t.depth,
        k,
        a0: dec.a0.iter().copied().collect(),
        a: dec.a.iter().copied().collect(),
        h: IdentifiedGraph::from_graph(h),
        branch,
        paths,
        loops: split.loops.clone(),
        boundary,
        fans,
    };
    certificate.validate(&t.graph).map_err(Error::Internal)?;
    Ok(Immersion { truncation: dec.truncation, h: h.clone(), certificate })
}
