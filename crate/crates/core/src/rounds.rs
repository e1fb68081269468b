//! Growing `k`-arc-connected orientations of a `(2k+1)`-edge-connected
//! family, one immersion per round.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::decomposition::DepthPolicy;
use crate::error::{Error, Result};
use crate::family::{FamilyDescriptor, LazyFamily};
use crate::graph::VertexId;
use crate::immersion::{immerse, ImmersionCertificate};
use crate::orient::{arc_report, extend_orientation, ArcReport, ExtendConfig, ExtendStrategy, Orientation};
use crate::truncation::{truncate, Truncation};
use crate::walk::Walk;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundCertificate {
    pub round: usize,
    /// The enumeration vertex this round was built to reach.
    pub target: VertexId,
    pub immersion: ImmersionCertificate,
    /// Branch vertices of the previous subgraph, identified into one vertex.
    pub identified: Vec<VertexId>,
    /// The previous orientation seen in `H*`.
    pub w_star: Orientation,
    pub w_star_eulerian: bool,
    pub strategy: ExtendStrategy,
    /// Orientation of `H`.
    pub h_orientation: Orientation,
    /// Orientation of the new subgraph of the host.
    pub orientation: Orientation,
    pub branch_vertices: Vec<VertexId>,
    pub verification: ArcReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientRun {
    pub family: FamilyDescriptor,
    pub k: usize,
    pub rounds: Vec<RoundCertificate>,
}

impl OrientRun {
    /// Each round keeps every earlier arc.
    pub fn is_monotone(&self) -> bool {
        self.rounds.windows(2).all(|w| w[1].orientation.extends(&w[0].orientation))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundsConfig {
    pub policy: DepthPolicy,
    pub extend: ExtendConfig,
}

impl Default for RoundsConfig {
    fn default() -> Self {
        RoundsConfig { policy: DepthPolicy { d0: 8, cap: 256 }, extend: ExtendConfig::default() }
    }
}

fn orient_along(o: &mut Orientation, w: &Walk) -> Result<()> {
    for (i, &e) in w.edges.iter().enumerate() {
        if o.arcs.insert(e, (w.vertices[i], w.vertices[i + 1])).is_some() {
            return Err(Error::Internal(format!("edge {e} oriented twice")));
        }
    }
    Ok(())
}

/// Runs `rounds` rounds starting from the origin.
pub fn orient_infinite(f: &LazyFamily, k: usize, rounds: usize, cfg: RoundsConfig) -> Result<OrientRun> {
    if rounds == 0 {
        return Err(Error::PreconditionViolated("at least one round is needed".into()));
    }
    let roots = [f.origin()];
    let mut last: Truncation = truncate(f, &roots, 1)?;
    let mut w = Orientation::default();
    let mut w_vertices: BTreeSet<VertexId> = BTreeSet::from([VertexId(0)]);
    let mut w_branch: BTreeSet<VertexId> = w_vertices.clone();
    let mut out = Vec::new();
    for round in 1..=rounds {
        let target = last
            .graph
            .vertices()
            .find(|v| !w_vertices.contains(v))
            .ok_or_else(|| Error::Internal("truncation exhausted by the subgraph".into()))?;
        let mut a0 = BTreeSet::from([last.key(target)]);
        a0.extend(w_vertices.iter().map(|&v| last.key(v)));
        let imm = immerse(f, &a0, k, cfg.policy)?;
        let h = &imm.h;
        let (h_star, _) = h.identify(&w_branch)?;
        let rep = w_branch.iter().next().copied().expect("nonempty");
        let map = |x: VertexId| if w_branch.contains(&x) { rep } else { x };
        let mut w_star = Orientation::default();
        for (&e, &(a, b)) in &w.arcs {
            if h_star.contains_edge(e) {
                w_star.direct(e, map(a), map(b));
            }
        }
        let mut identified_all = Orientation::default();
        for (&e, &(a, b)) in &w.arcs {
            identified_all.direct(e, map(a), map(b));
        }
        let w_star_eulerian = identified_all.is_eulerian_consistent();
        if !w_star_eulerian {
            return Err(Error::Internal(format!("identified subgraph is not Eulerian in round {round}")));
        }
        let (o_star, strategy) = extend_orientation(&h_star, k, &w_star, cfg.extend)?;
        let mut h_orientation = Orientation::default();
        for (e, u, v) in h.edges() {
            let Some(&(a, _)) = o_star.arcs.get(&e) else {
                let (x, y) = w.arcs.get(&e).copied().unwrap_or((u, v));
                h_orientation.direct(e, x, y);
                continue;
            };
            if map(u) == a {
                h_orientation.direct(e, u, v);
            } else {
                h_orientation.direct(e, v, u);
            }
        }
        let cert = &imm.certificate;
        let mut next = Orientation::default();
        for (&e, &(a, b)) in &h_orientation.arcs {
            let p: &Walk = &cert.paths[&e];
            let forward = p.start() == cert.branch.get(&a).copied() && p.end() == cert.branch.get(&b).copied();
            orient_along(&mut next, &if forward { p.clone() } else { p.reversed() })?;
        }
        for (_, lw) in &cert.loops {
            orient_along(&mut next, lw)?;
        }
        for (&e, &d) in &w.arcs {
            match next.arcs.get(&e) {
                Some(&x) if x == d => {}
                Some(_) => return Err(Error::Internal(format!("edge {e} reoriented in round {round}"))),
                None => {
                    next.arcs.insert(e, d);
                }
            }
        }
        let branch: BTreeSet<VertexId> = cert.branch.values().copied().collect();
        let verification = arc_report(&imm.truncation.graph, &next, &branch, k);
        if verification.min_flow < k {
            return Err(Error::Internal(format!("round {round} orientation is not {k}-arc-connected on its branch vertices")));
        }
        w_vertices = next.arcs.values().flat_map(|&(a, b)| [a, b]).chain(branch.iter().copied()).collect();
        w_vertices.insert(target);
        out.push(RoundCertificate {
            round,
            target,
            immersion: cert.clone(),
            identified: w_branch.iter().copied().collect(),
            w_star,
            w_star_eulerian,
            strategy,
            h_orientation,
            orientation: next.clone(),
            branch_vertices: branch.iter().copied().collect(),
            verification,
        });
        w = next;
        w_branch = branch;
        last = imm.truncation;
    }
    Ok(OrientRun { family: f.descriptor(&roots), k, rounds: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_rounds_on_the_grid() {
        let f = LazyFamily::grid(1);
        let run = orient_infinite(&f, 1, 3, RoundsConfig::default()).unwrap();
        assert_eq!(run.rounds.len(), 3);
        assert!(run.is_monotone());
        for r in &run.rounds {
            assert!(r.w_star_eulerian);
            assert!(r.verification.min_flow >= 1);
        }
    }

    #[test]
    fn first_round_is_vacuously_consistent() {
        let f = LazyFamily::grid(1);
        let run = orient_infinite(&f, 1, 1, RoundsConfig::default()).unwrap();
        assert!(run.rounds[0].w_star.is_empty());
    }
}
