//! Seeded random instance generators shared by tests, experiments and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::connectivity::{is_k_edge_connected, is_sk_edge_connected};
use crate::graph::{EdgeId, MultiGraph, VertexId};

fn random_pair<R: Rng>(rng: &mut R, n: u32) -> (VertexId, VertexId) {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (VertexId(a), VertexId(b))
}

/// `m` uniformly random non-loop edges on `n ≥ 2` vertices.
pub fn random_multigraph<R: Rng>(rng: &mut R, n: u32, m: usize) -> MultiGraph {
    let mut g = MultiGraph::with_vertices(n);
    for _ in 0..m {
        let (a, b) = random_pair(rng, n);
        g.add_edge(a, b).expect("distinct endpoints");
    }
    g
}

/// Random spanning tree plus `extra` random edges.
pub fn random_connected_multigraph<R: Rng>(rng: &mut R, n: u32, extra: usize) -> MultiGraph {
    let mut g = MultiGraph::with_vertices(n);
    for v in 1..n {
        let p = rng.gen_range(0..v);
        g.add_edge(VertexId(p), VertexId(v)).expect("tree edge");
    }
    for _ in 0..extra {
        if n >= 2 {
            let (a, b) = random_pair(rng, n);
            g.add_edge(a, b).expect("distinct endpoints");
        }
    }
    g
}

/// Removes edges in random order whenever `keep` still holds afterwards.
fn prune<R: Rng>(
    rng: &mut R,
    mut g: MultiGraph,
    candidates: Vec<EdgeId>,
    keep: impl Fn(&MultiGraph) -> bool,
) -> MultiGraph {
    let mut order = candidates;
    order.shuffle(rng);
    for e in order {
        let mut h = g.clone();
        h.remove_edge(e).expect("present");
        if keep(&h) {
            g = h;
        }
    }
    g
}

/// A k-edge-connected multigraph on `n ≥ 2` vertices: random edges are added
/// until k-edge-connected, then a random fraction `prune_prob` of them is
/// tentatively removed while the property survives.
pub fn random_k_edge_connected<R: Rng>(rng: &mut R, n: u32, k: usize, prune_prob: f64) -> MultiGraph {
    let mut g = random_connected_multigraph(rng, n, 0);
    while !is_k_edge_connected(&g, k) {
        // Favor low-degree endpoints so the loop terminates quickly.
        let a = (0..n)
            .map(VertexId)
            .min_by_key(|&v| (g.degree(v), rng.gen::<u32>()))
            .expect("n > 0");
        let mut b = VertexId(rng.gen_range(0..n));
        while b == a {
            b = VertexId(rng.gen_range(0..n));
        }
        g.add_edge(a, b).expect("distinct endpoints");
        if rng.gen_bool(0.5) {
            let (x, y) = random_pair(rng, n);
            g.add_edge(x, y).expect("distinct endpoints");
        }
    }
    let candidates: Vec<EdgeId> = g.edge_ids().filter(|_| rng.gen_bool(prune_prob)).collect();
    prune(rng, g, candidates, |h| is_k_edge_connected(h, k))
}

/// An (s,k)-edge-connected instance with `deg(s) = deg_s` on `others + 1`
/// vertices (`s` is vertex 0). Edges among the other vertices are added until
/// the property holds, then pruned to a minimal-ish configuration so that
/// non-liftable pairs are common.
pub fn random_sk_instance<R: Rng>(
    rng: &mut R,
    others: u32,
    deg_s: usize,
    k: usize,
) -> (MultiGraph, VertexId) {
    let s = VertexId(0);
    let n = others + 1;
    let mut g = MultiGraph::with_vertices(n);
    for _ in 0..deg_s {
        let x = VertexId(rng.gen_range(1..n));
        g.add_edge(s, x).expect("distinct");
    }
    while !is_sk_edge_connected(&g, s, k).expect("s present") {
        let a = (1..n)
            .map(VertexId)
            .min_by_key(|&v| (g.degree(v), rng.gen::<u32>()))
            .expect("others > 0");
        let mut b = VertexId(rng.gen_range(1..n));
        while b == a {
            b = VertexId(rng.gen_range(1..n));
        }
        g.add_edge(a, b).expect("distinct");
    }
    let candidates: Vec<EdgeId> = g
        .edges()
        .filter(|&(_, u, v)| u != s && v != s)
        .map(|(e, _, _)| e)
        .collect();
    let g = prune(rng, g, candidates, |h| is_sk_edge_connected(h, s, k).expect("s present"));
    (g, s)
}

/// Union of `k` random Hamiltonian cycles on `n ≥ 3` vertices plus `extra`
/// random cycles: Eulerian and 2k-edge-connected.
pub fn random_eulerian_2k<R: Rng>(rng: &mut R, n: u32, k: usize, extra: usize) -> MultiGraph {
    let mut g = MultiGraph::with_vertices(n);
    let add_cycle = |g: &mut MultiGraph, cyc: &[u32]| {
        for i in 0..cyc.len() {
            let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
            g.add_edge(VertexId(a), VertexId(b)).expect("distinct");
        }
    };
    for _ in 0..k {
        let mut perm: Vec<u32> = (0..n).collect();
        perm.shuffle(rng);
        add_cycle(&mut g, &perm);
    }
    for _ in 0..extra {
        let len = rng.gen_range(3..=n);
        let mut perm: Vec<u32> = (0..n).collect();
        perm.shuffle(rng);
        add_cycle(&mut g, &perm[..len as usize]);
    }
    g
}

/// Random vertex subset of `0..n` (each vertex with probability 1/2).
pub fn random_subset<R: Rng>(rng: &mut R, n: u32) -> std::collections::BTreeSet<VertexId> {
    (0..n).filter(|_| rng.gen_bool(0.5)).map(VertexId).collect()
}

/// `k` terminal pairs with distinct members, repetition allowed.
pub fn random_pairs<R: Rng>(rng: &mut R, n: u32, k: usize) -> Vec<(VertexId, VertexId)> {
    (0..k).map(|_| random_pair(rng, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::euler_tour;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_meet_their_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let g = random_k_edge_connected(&mut rng, 6, 3, 0.5);
            assert!(is_k_edge_connected(&g, 3));
            let (h, s) = random_sk_instance(&mut rng, 5, 5, 2);
            assert_eq!(h.degree(s), 5);
            assert!(is_sk_edge_connected(&h, s, 2).unwrap());
            let e = random_eulerian_2k(&mut rng, 6, 2, 1);
            assert!(is_k_edge_connected(&e, 4));
            assert!(euler_tour(&e).is_ok());
        }
    }
}
