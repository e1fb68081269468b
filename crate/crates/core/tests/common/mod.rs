//! Brute-force oracles shared by the integration tests. These use nothing
//! from the library except the graph container.

#![allow(dead_code)]

use std::collections::BTreeSet;

use edgelink::{EdgeId, MultiGraph, VertexId};
use proptest::prelude::*;

/// Smallest `|δ(X)|` over all `X` with `u ∈ X`, `v ∉ X`, by enumerating subsets.
pub fn brute_min_cut(g: &MultiGraph, u: VertexId, v: VertexId) -> usize {
    let vs: Vec<VertexId> = g.vertices().collect();
    let n = vs.len();
    let iu = vs.iter().position(|&x| x == u).unwrap();
    let iv = vs.iter().position(|&x| x == v).unwrap();
    let mut best = usize::MAX;
    for mask in 0u32..(1 << n) {
        if mask >> iu & 1 == 0 || mask >> iv & 1 == 1 {
            continue;
        }
        let inside = |x: VertexId| mask >> vs.iter().position(|&y| y == x).unwrap() & 1 == 1;
        let cut = g.edges().filter(|&(_, a, b)| inside(a) != inside(b)).count();
        best = best.min(cut);
    }
    best
}

pub fn brute_edge_connectivity(g: &MultiGraph) -> Option<usize> {
    let vs: Vec<VertexId> = g.vertices().collect();
    if vs.len() < 2 {
        return None;
    }
    vs[1..].iter().map(|&v| brute_min_cut(g, vs[0], v)).min()
}

/// Edge sets of all simple `s`–`t` paths.
fn all_paths(g: &MultiGraph, s: VertexId, t: VertexId) -> Vec<Vec<EdgeId>> {
    let mut out = Vec::new();
    let mut stack = vec![(s, vec![s], Vec::new())];
    while let Some((at, seen, edges)) = stack.pop() {
        if at == t {
            out.push(edges);
            continue;
        }
        for (e, a, b) in g.edges() {
            let next = if a == at { b } else if b == at { a } else { continue };
            if !seen.contains(&next) {
                let mut seen = seen.clone();
                seen.push(next);
                let mut edges = edges.clone();
                edges.push(e);
                stack.push((next, seen, edges));
            }
        }
    }
    out
}

/// Whether edge-disjoint paths exist for all pairs.
pub fn brute_linkable(g: &MultiGraph, pairs: &[(VertexId, VertexId)]) -> bool {
    let options: Vec<Vec<Vec<EdgeId>>> = pairs.iter().map(|&(s, t)| all_paths(g, s, t)).collect();
    let mut choice = vec![0usize; pairs.len()];
    let mut used: Vec<BTreeSet<EdgeId>> = vec![BTreeSet::new(); pairs.len() + 1];
    let mut i = 0;
    loop {
        if i == pairs.len() {
            return true;
        }
        let mut placed = false;
        while choice[i] < options[i].len() {
            let p = &options[i][choice[i]];
            choice[i] += 1;
            if p.iter().all(|e| !used[i].contains(e)) {
                used[i + 1] = used[i].iter().chain(p).copied().collect();
                placed = true;
                break;
            }
        }
        if placed {
            i += 1;
            if i < pairs.len() {
                choice[i] = 0;
            }
        } else if i == 0 {
            return false;
        } else {
            i -= 1;
        }
    }
}

/// Connected multigraphs on `2..=max_n` vertices with at most `max_m` edges.
pub fn connected_multigraph(max_n: u32, max_m: usize) -> impl Strategy<Value = MultiGraph> {
    (2..=max_n).prop_flat_map(move |n| {
        let tree = proptest::collection::vec(any::<u32>(), (n - 1) as usize);
        let extra = proptest::collection::vec((0..n, 0..n), 0..=max_m + 1 - n as usize);
        (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
            let mut g = MultiGraph::with_vertices(n);
            for (i, r) in tree.into_iter().enumerate() {
                let v = i as u32 + 1;
                g.add_edge(VertexId(r % v), VertexId(v)).unwrap();
            }
            for (a, b) in extra {
                if a != b {
                    g.add_edge(VertexId(a), VertexId(b)).unwrap();
                }
            }
            g
        })
    })
}
