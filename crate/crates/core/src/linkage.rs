//! Weak linkages on finite multigraphs: verifier, exact solver and the
//! even-`k` obstruction.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::local_edge_connectivity;
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::walk::Walk;

/// `k` unordered terminal pairs in a finite graph.
#[derive(Debug, Clone)]
pub struct LinkageInstance {
    pub graph: MultiGraph,
    pub k: usize,
    pub pairs: Vec<(VertexId, VertexId)>,
}

impl LinkageInstance {
    pub fn new(graph: MultiGraph, pairs: Vec<(VertexId, VertexId)>) -> Result<Self> {
        for &(s, t) in &pairs {
            for v in [s, t] {
                if !graph.contains_vertex(v) {
                    return Err(Error::UnknownVertex(v));
                }
            }
            if s == t {
                return Err(Error::SameVertex(s));
            }
        }
        Ok(LinkageInstance { k: pairs.len(), graph, pairs })
    }
}

/// Path `i` joins `pairs[i]`, in either direction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Linkage {
    pub paths: Vec<Walk>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkageProblem {
    WrongCount { expected: usize, found: usize },
    NotAWalk { path: usize },
    WrongEnds { path: usize },
    NotSimple { path: usize },
    SharedEdge { edge: EdgeId, paths: (usize, usize) },
}

impl fmt::Display for LinkageProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkageProblem::WrongCount { expected, found } => write!(f, "expected {expected} paths, found {found}"),
            LinkageProblem::NotAWalk { path } => write!(f, "path {path} is not a walk in the graph"),
            LinkageProblem::WrongEnds { path } => write!(f, "path {path} does not join its terminals"),
            LinkageProblem::NotSimple { path } => write!(f, "path {path} repeats a vertex"),
            LinkageProblem::SharedEdge { edge, paths } => write!(f, "edge {edge} is used by paths {} and {}", paths.0, paths.1),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkageReport {
    pub problems: Vec<LinkageProblem>,
}

impl LinkageReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Checks endpoints, simplicity and pairwise edge-disjointness by edge id.
pub fn verify_linkage(g: &MultiGraph, pairs: &[(VertexId, VertexId)], cand: &Linkage) -> LinkageReport {
    let mut problems = Vec::new();
    if cand.paths.len() != pairs.len() {
        problems.push(LinkageProblem::WrongCount { expected: pairs.len(), found: cand.paths.len() });
    }
    let mut owner: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for (i, (p, &(s, t))) in cand.paths.iter().zip(pairs).enumerate() {
        if p.vertices.is_empty() || !p.is_walk_in(g) {
            problems.push(LinkageProblem::NotAWalk { path: i });
            continue;
        }
        let ends = (p.start().unwrap(), p.end().unwrap());
        if ends != (s, t) && ends != (t, s) {
            problems.push(LinkageProblem::WrongEnds { path: i });
        }
        if !p.is_simple() {
            problems.push(LinkageProblem::NotSimple { path: i });
        }
        for &e in &p.edges {
            if let Some(&j) = owner.get(&e) {
                if j != i {
                    problems.push(LinkageProblem::SharedEdge { edge: e, paths: (j, i) });
                }
            } else {
                owner.insert(e, i);
            }
        }
    }
    LinkageReport { problems }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    /// Search nodes allowed before giving up.
    pub node_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { node_budget: 20_000_000 }
    }
}

/// Why no linkage exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Infeasibility {
    /// A set whose boundary is smaller than the demand crossing it, when the
    /// obstruction is already visible before any path is chosen.
    pub cut: Option<Vec<VertexId>>,
    /// Search nodes visited while exhausting the space.
    pub explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Linked(Linkage),
    Infeasible(Infeasibility),
}

impl Verdict {
    pub fn linkage(&self) -> Option<&Linkage> {
        match self {
            Verdict::Linked(l) => Some(l),
            Verdict::Infeasible(_) => None,
        }
    }
}

/// Largest vertex count for which pruning enumerates every cut.
pub const CUT_ENUM_LIMIT: usize = 10;

struct Search {
    verts: Vec<VertexId>,
    eids: Vec<EdgeId>,
    ends: Vec<(usize, usize)>,
    // sorted by (neighbour, edge) so parallel copies are adjacent
    adj: Vec<Vec<(usize, usize)>>,
    demands: Vec<(usize, usize, usize)>,
    used: Vec<bool>,
    on_path: Vec<bool>,
    found: Vec<Option<Walk>>,
    bound: usize,
    hit_bound: bool,
    nodes: u64,
    budget: u64,
}

impl Search {
    fn build(inst: &LinkageInstance, budget: u64) -> Result<Search> {
        let g = &inst.graph;
        let verts: Vec<VertexId> = g.vertices().collect();
        let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut eids = Vec::new();
        let mut ends = Vec::new();
        let mut adj = vec![Vec::new(); verts.len()];
        for (e, u, v) in g.edges() {
            let (a, b) = (index[&u], index[&v]);
            adj[a].push((b, eids.len()));
            adj[b].push((a, eids.len()));
            eids.push(e);
            ends.push((a, b));
        }
        for list in &mut adj {
            list.sort();
        }
        let mut order: Vec<(usize, usize)> = Vec::new();
        for (i, &(s, t)) in inst.pairs.iter().enumerate() {
            order.push((local_edge_connectivity(g, s, t)?, i));
        }
        order.sort();
        let demands = order
            .into_iter()
            .map(|(_, i)| (i, index[&inst.pairs[i].0], index[&inst.pairs[i].1]))
            .collect();
        Ok(Search {
            on_path: vec![false; verts.len()],
            used: vec![false; eids.len()],
            found: vec![None; inst.pairs.len()],
            verts,
            eids,
            ends,
            adj,
            demands,
            bound: 0,
            hit_bound: false,
            nodes: 0,
            budget,
        })
    }

    fn vertex_index(&self, v: VertexId) -> usize {
        self.verts.binary_search(&v).expect("known vertex")
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ResourceBudgetExceeded(self.budget));
        }
        Ok(())
    }

    /// A vertex set whose residual boundary is smaller than the remaining
    /// demand across it.
    fn violated_cut(&self, from: usize) -> Option<Vec<usize>> {
        let n = self.verts.len();
        let rest = &self.demands[from..];
        let free: Vec<(usize, usize)> = (0..self.eids.len()).filter(|&e| !self.used[e]).map(|e| self.ends[e]).collect();
        if n <= CUT_ENUM_LIMIT {
            for mask in (1u64..(1 << n)).filter(|m| m & 1 == 1 && *m != (1 << n) - 1) {
                let inside = |v: usize| mask >> v & 1 == 1;
                let cap = free.iter().filter(|&&(a, b)| inside(a) != inside(b)).count();
                let need = rest.iter().filter(|&&(_, s, t)| inside(s) != inside(t)).count();
                if cap < need {
                    return Some((0..n).filter(|&v| inside(v)).collect());
                }
            }
            return None;
        }
        let mut deg = vec![0usize; n];
        for &(a, b) in &free {
            deg[a] += 1;
            deg[b] += 1;
        }
        let mut need = vec![0usize; n];
        for &(_, s, t) in rest {
            need[s] += 1;
            need[t] += 1;
        }
        (0..n).find(|&v| need[v] > deg[v]).map(|v| vec![v])
    }

    fn assign(&mut self, j: usize) -> Result<bool> {
        if j == self.demands.len() {
            return Ok(true);
        }
        if self.violated_cut(j).is_some() {
            return Ok(false);
        }
        let (_, s, t) = self.demands[j];
        self.on_path[s] = true;
        let mut path = Walk::trivial(self.verts[s]);
        let ok = self.extend(j, s, t, &mut path)?;
        self.on_path[s] = false;
        Ok(ok)
    }

    fn extend(&mut self, j: usize, v: usize, t: usize, path: &mut Walk) -> Result<bool> {
        self.tick()?;
        if v == t {
            let idx: Vec<usize> = path.vertices.iter().map(|u| self.vertex_index(*u)).collect();
            idx.iter().for_each(|&u| self.on_path[u] = false);
            self.found[self.demands[j].0] = Some(path.clone());
            let ok = self.assign(j + 1)?;
            idx.iter().for_each(|&u| self.on_path[u] = true);
            if !ok {
                self.found[self.demands[j].0] = None;
            }
            return Ok(ok);
        }
        if path.len() == self.bound {
            self.hit_bound = true;
            return Ok(false);
        }
        for i in 0..self.adj[v].len() {
            let (w, e) = self.adj[v][i];
            if self.used[e] || self.on_path[w] {
                continue;
            }
            // parallel copies are interchangeable
            if i > 0 && self.adj[v][i - 1].0 == w && !self.used[self.adj[v][i - 1].1] {
                continue;
            }
            self.used[e] = true;
            self.on_path[w] = true;
            path.push(self.eids[e], self.verts[w]);
            let ok = self.extend(j, w, t, path)?;
            path.vertices.pop();
            path.edges.pop();
            self.on_path[w] = false;
            self.used[e] = false;
            if ok {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Exact search for a weak linkage.
///
/// Demands are routed in ascending order of terminal connectivity, each
/// over simple paths, with a global path-length bound raised until the
/// search no longer runs into it.
pub fn solve_finite(inst: &LinkageInstance, cfg: SolverConfig) -> Result<Verdict> {
    let mut search = Search::build(inst, cfg.node_budget)?;
    if let Some(side) = search.violated_cut(0) {
        let cut = side.into_iter().map(|v| search.verts[v]).collect();
        return Ok(Verdict::Infeasible(Infeasibility { cut: Some(cut), explored: 0 }));
    }
    let max_len = search.verts.len().saturating_sub(1).max(1);
    for bound in 1..=max_len {
        search.bound = bound;
        search.hit_bound = false;
        if search.assign(0)? {
            let paths = search.found.iter().map(|p| p.clone().expect("all demands routed")).collect();
            return Ok(Verdict::Linked(Linkage { paths }));
        }
        if !search.hit_bound {
            break;
        }
    }
    Ok(Verdict::Infeasible(Infeasibility { cut: None, explored: search.nodes }))
}

/// The `2k`-cycle `s_1 … s_k t_1 … t_k` with every edge repeated `k/2`
/// times: `k`-edge-connected and without a weak `k`-linkage.
pub fn counterexample_family(k: usize) -> Result<LinkageInstance> {
    if k % 2 == 1 {
        return Err(Error::OddK(k));
    }
    if k == 0 {
        return Err(Error::PreconditionViolated("k must be at least 2".into()));
    }
    let n = 2 * k as u32;
    let mut g = MultiGraph::with_vertices(n);
    for i in 0..n {
        for _ in 0..k / 2 {
            g.add_edge(VertexId(i), VertexId((i + 1) % n))?;
        }
    }
    let pairs = (0..k as u32).map(|i| (VertexId(i), VertexId(i + k as u32))).collect();
    LinkageInstance::new(g, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::is_k_edge_connected;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn menger_bundle() {
        let g = MultiGraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let inst = LinkageInstance::new(g.clone(), vec![(v(0), v(1)); 3]).unwrap();
        let l = solve_finite(&inst, SolverConfig::default()).unwrap();
        let l = l.linkage().unwrap();
        assert!(l.paths.iter().all(|p| p.len() == 1));
        assert!(verify_linkage(&g, &inst.pairs, l).ok());
    }

    #[test]
    fn verifier_reports_shared_edge_and_bad_ends() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let p = Walk { vertices: vec![v(0), v(1)], edges: vec![EdgeId(0)] };
        let r = verify_linkage(&g, &[(v(0), v(1)), (v(1), v(0))], &Linkage { paths: vec![p.clone(), p.reversed()] });
        assert_eq!(r.problems, vec![LinkageProblem::SharedEdge { edge: EdgeId(0), paths: (0, 1) }]);
        let r = verify_linkage(&g, &[(v(0), v(2))], &Linkage { paths: vec![p] });
        assert_eq!(r.problems, vec![LinkageProblem::WrongEnds { path: 0 }]);
    }

    #[test]
    fn counterexamples_are_infeasible() {
        for k in [2, 4] {
            let inst = counterexample_family(k).unwrap();
            assert!(is_k_edge_connected(&inst.graph, k));
            let verdict = solve_finite(&inst, SolverConfig::default()).unwrap();
            assert!(matches!(verdict, Verdict::Infeasible(_)), "k={k}");
        }
        assert_eq!(counterexample_family(3).unwrap_err(), Error::OddK(3));
    }

    #[test]
    fn cut_certificate_for_obvious_obstruction() {
        let g = MultiGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = LinkageInstance::new(g, vec![(v(0), v(2)), (v(0), v(1))]).unwrap();
        let Verdict::Infeasible(inf) = solve_finite(&inst, SolverConfig::default()).unwrap() else {
            panic!("expected infeasible");
        };
        assert!(inf.cut.is_some());
    }

    #[test]
    fn budget_is_enforced() {
        let inst = counterexample_family(4).unwrap();
        let r = solve_finite(&inst, SolverConfig { node_budget: 3 });
        assert_eq!(r, Err(Error::ResourceBudgetExceeded(3)));
    }

    #[test]
    fn linked_at_k_plus_one_on_small_random_graphs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let g = crate::gen::random_k_edge_connected(&mut rng, 7, 4, 0.5);
            let pairs = crate::gen::random_pairs(&mut rng, 7, 3);
            let inst = LinkageInstance::new(g.clone(), pairs).unwrap();
            let l = solve_finite(&inst, SolverConfig::default()).unwrap();
            assert!(verify_linkage(&g, &inst.pairs, l.linkage().unwrap()).ok());
        }
    }
}
