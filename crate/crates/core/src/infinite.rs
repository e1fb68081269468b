//! Weak linkages in infinite families with odd `k`: decompose around the
//! terminals, split at even connectivity `k + 1`, solve the finite remainder,
//! unroll every lift and reconnect through linking fans.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::compatible::{compatible_splitting, CompatibleSplitting, LiftLink};
use crate::decomposition::{decompose_at, Decomposition, DepthPolicy};
use crate::error::{Error, Result};
use crate::fan::{linking_fan, FanRequest, FanResult};
use crate::family::{FamilyDescriptor, LazyFamily, VertexKey};
use crate::graph::{EdgeId, VertexId};
use crate::truncation::truncate;
use crate::linkage::{solve_finite, verify_linkage, Linkage, LinkageInstance, SolverConfig, Verdict};
use crate::walk::Walk;

/// Fan built inside one surviving set, with the H-edges `E_i` it serves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanCertificate {
    pub set: usize,
    pub contracted: VertexId,
    pub edges: Vec<EdgeId>,
    pub request: FanRequest,
    pub result: FanResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSummary {
    pub contracted: VertexId,
    pub size: usize,
    pub boundary: Vec<EdgeId>,
    /// Degree in `H`; 0 when the vertex was split off completely.
    pub h_degree: usize,
}

/// What the pipeline did, for inspection and replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub a: Vec<VertexId>,
    pub buffer_radius: u32,
    pub sets: Vec<SetSummary>,
    pub lifts: Vec<LiftLink>,
    pub h_linkage: Linkage,
    pub fans: Vec<FanCertificate>,
}

/// A linkage inside the truncation of `family` at `depth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfiniteLinkage {
    pub family: FamilyDescriptor,
    pub depth: u32,
    pub k: usize,
    pub terminals: Vec<(VertexKey, VertexKey)>,
    pub pairs: Vec<(VertexId, VertexId)>,
    pub linkage: Linkage,
    pub transcript: Transcript,
}

impl InfiniteLinkage {
    /// Sizes of the collected `E_i`.
    pub fn e_sizes(&self) -> Vec<usize> {
        self.transcript.fans.iter().map(|f| f.edges.len()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InfiniteConfig {
    pub policy: DepthPolicy,
    pub solver: SolverConfig,
}

impl Default for InfiniteConfig {
    fn default() -> Self {
        InfiniteConfig {
            policy: DepthPolicy { d0: 8, cap: 128 },
            solver: SolverConfig::default(),
        }
    }
}

/// Runs the pipeline with depth doubling.
pub fn solve_infinite(
    f: &LazyFamily,
    terminals: &[(VertexKey, VertexKey)],
    k: usize,
    cfg: InfiniteConfig,
) -> Result<InfiniteLinkage> {
    if k % 2 == 0 {
        return Err(Error::EvenK(k));
    }
    if terminals.len() != k {
        return Err(Error::PreconditionViolated(format!("{} pairs given for k = {k}", terminals.len())));
    }
    for &(s, t) in terminals {
        if s == t {
            return Err(Error::PreconditionViolated(format!("pair with equal ends {s}")));
        }
        for v in [s, t] {
            if !f.contains(&v) {
                return Err(Error::PreconditionViolated(format!("{v} is not a vertex")));
            }
        }
    }
    let roots = [f.origin()];
    let mut reason = String::new();
    for d in cfg.policy.depths() {
        match attempt(f, &roots, terminals, k, d, cfg.solver) {
            Ok(out) => return Ok(out),
            Err(e @ Error::Stuck(_)) => reason = e.to_string(),
            Err(e) if e.is_non_authoritative() => reason = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(Error::DepthExhausted { cap: cfg.policy.cap, reason })
}

fn attempt(
    f: &LazyFamily,
    roots: &[VertexKey],
    terminals: &[(VertexKey, VertexKey)],
    k: usize,
    depth: u32,
    solver: SolverConfig,
) -> Result<InfiniteLinkage> {
    let a0: BTreeSet<VertexKey> = terminals.iter().flat_map(|&(s, t)| [s, t]).collect();
    let dec = decompose_at(f, roots, &a0, depth)?;
    let t = &dec.truncation;
    let split = compatible_splitting(&t.graph, &dec.sets, k + 1, k + 1)?;
    let pairs: Vec<(VertexId, VertexId)> = terminals
        .iter()
        .map(|(s, t2)| (t.id(s).expect("terminal in A"), t.id(t2).expect("terminal in A")))
        .collect();
    let inst = LinkageInstance::new(split.h.clone(), pairs.clone())?;
    let h_linkage = match solve_finite(&inst, solver)? {
        Verdict::Linked(l) => l,
        Verdict::Infeasible(_) => {
            return Err(Error::Internal(format!("H admits no weak {k}-linkage although it is {}-edge-connected", k + 1)));
        }
    };
    let fans = build_fans(&dec, &split, &h_linkage, k + 1)?;
    let linkage = unroll(&split, &h_linkage, &fans);
    let report = verify_linkage(&t.graph, &pairs, &linkage);
    if !report.ok() {
        return Err(Error::Internal(format!("assembled linkage fails: {}", report.problems[0])));
    }
    let sets = split
        .contracted
        .iter()
        .zip(&dec.sets)
        .map(|(&c, s)| SetSummary {
            contracted: c,
            size: s.members.len(),
            boundary: s.boundary().to_vec(),
            h_degree: if split.h.contains_vertex(c) { split.h.degree(c) } else { 0 },
        })
        .collect();
    Ok(InfiniteLinkage {
        family: f.descriptor(roots),
        depth,
        k,
        terminals: terminals.to_vec(),
        pairs,
        linkage,
        transcript: Transcript {
            a: dec.a.iter().copied().collect(),
            buffer_radius: dec.buffer_radius,
            sets,
            lifts: split.links.clone(),
            h_linkage,
            fans,
        },
    })
}

/// Consecutive H-edge pairs through each contracted vertex.
fn passages(split: &CompatibleSplitting, l: &Linkage) -> BTreeMap<usize, Vec<(EdgeId, EdgeId)>> {
    let mut out: BTreeMap<usize, Vec<(EdgeId, EdgeId)>> = BTreeMap::new();
    for p in &l.paths {
        for j in 1..p.vertices.len().saturating_sub(1) {
            if let Some(i) = split.set_index(p.vertices[j]) {
                out.entry(i).or_default().push((p.edges[j - 1], p.edges[j]));
            }
        }
    }
    out
}

fn build_fans(dec: &Decomposition, split: &CompatibleSplitting, l: &Linkage, big_k: usize) -> Result<Vec<FanCertificate>> {
    let t = &dec.truncation;
    let mut fans = Vec::new();
    for (i, through) in passages(split, l) {
        let c = split.contracted[i];
        let edges: Vec<EdgeId> = through.iter().flat_map(|&(e, f)| [e, f]).collect();
        let members = &dec.sets[i].members;
        let rays = edges
            .iter()
            .map(|&e| {
                let b = split.anchor[&(e, c)];
                dec.sets[i]
                    .rays
                    .ray_for(b)
                    .map(|r| r.inner())
                    .ok_or_else(|| Error::Internal(format!("no ray for boundary edge {b}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let request = FanRequest {
            rays,
            x: split.paths_in(i).flat_map(|p| p.path.edges.iter().copied()).collect(),
            blocked: t.graph.vertices().filter(|v| !members.contains(v)).collect(),
            min_len: Some(1),
            k: big_k,
        };
        let result = linking_fan(&t.graph, t.frontier(), &request)?;
        fans.push(FanCertificate { set: i, contracted: c, edges, request, result });
    }
    Ok(fans)
}

/// Host walks for the H-linkage, with fan detours at surviving sets, then
/// shortcut to paths.
fn unroll(split: &CompatibleSplitting, l: &Linkage, fans: &[FanCertificate]) -> Linkage {
    let paths = l
        .paths
        .iter()
        .map(|p| {
            let mut walk = Walk::trivial(p.vertices[0]);
            for (j, &e) in p.edges.iter().enumerate() {
                let from = p.vertices[j];
                if j > 0 {
                    if let Some(fan) = fans.iter().find(|f| f.contracted == from) {
                        let idx = |x: EdgeId| fan.edges.iter().position(|&y| y == x).expect("edge in E_i");
                        walk.extend(&fan.result.paths[idx(p.edges[j - 1])].reversed());
                        walk.extend(&fan.result.paths[idx(e)]);
                    }
                }
                walk.extend(&split.realize_from(e, from));
            }
            walk.shortcut()
        })
        .collect();
    Linkage { paths }
}

/// `k` random pairs of distinct vertices within distance `radius` of the
/// origin.
pub fn random_terminals<R: Rng>(rng: &mut R, f: &LazyFamily, k: usize, radius: u32) -> Result<Vec<(VertexKey, VertexKey)>> {
    let t = truncate(f, &[f.origin()], radius)?;
    let near: Vec<VertexKey> = t.graph.vertices().map(|v| t.key(v)).collect();
    if near.len() < 2 {
        return Err(Error::PreconditionViolated("radius too small for two terminals".into()));
    }
    Ok((0..k)
        .map(|_| {
            let pair: Vec<&VertexKey> = near.choose_multiple(rng, 2).collect();
            (*pair[0], *pair[1])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: &LazyFamily, terminals: &[(VertexKey, VertexKey)], k: usize) -> InfiniteLinkage {
        let out = solve_infinite(f, terminals, k, InfiniteConfig::default()).unwrap();
        for n in out.e_sizes() {
            assert!(n % 2 == 0 && n <= k + 1, "E_i of size {n}");
        }
        out
    }

    #[test]
    fn single_pair_on_the_grid() {
        let f = LazyFamily::grid(1);
        let out = run(&f, &[(VertexKey::new(0, 0, 0), VertexKey::new(2, 1, 0))], 1);
        assert_eq!(out.linkage.paths.len(), 1);
    }

    #[test]
    fn three_pairs_on_the_grid() {
        let f = LazyFamily::grid(1);
        let p = |x, y| VertexKey::new(x, y, 0);
        let out = run(&f, &[(p(0, 0), p(1, 1)), (p(1, 0), p(0, 1)), (p(-1, 0), p(2, 0))], 3);
        assert_eq!(out.linkage.paths.len(), 3);
    }

    #[test]
    fn three_pairs_on_the_ladder() {
        let f = LazyFamily::ladder(5).unwrap();
        let p = |x, c| VertexKey::new(x, 0, c);
        let out = run(&f, &[(p(0, 0), p(0, 2)), (p(0, 1), p(1, 3)), (p(-1, 4), p(1, 0))], 3);
        assert!(out.transcript.sets.len() >= 2);
    }

    #[test]
    fn even_k_is_rejected() {
        let f = LazyFamily::grid(1);
        let o = f.origin();
        let r = solve_infinite(&f, &[(o, VertexKey::new(1, 0, 0)); 2], 2, InfiniteConfig::default());
        assert_eq!(r.unwrap_err(), Error::EvenK(2));
    }

    #[test]
    fn random_terminals_on_both_families() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut fans = 0;
        for f in [LazyFamily::grid(1), LazyFamily::ladder(5).unwrap()] {
            for _ in 0..20 {
                let terms = random_terminals(&mut rng, &f, 3, 2).unwrap();
                let out = solve_infinite(&f, &terms, 3, InfiniteConfig::default());
                let out = out.unwrap_or_else(|e| panic!("{terms:?}: {e}"));
                assert!(out.e_sizes().iter().all(|&n| n % 2 == 0 && n <= 4));
                fans += out.transcript.fans.len();
            }
        }
        assert!(fans > 0);
    }
}
