//! Worked examples with their expected values recomputed by the brute-force
//! oracles in `common` and then frozen.

mod common;

use std::collections::BTreeSet;

use common::{brute_edge_connectivity, brute_linkable, brute_min_cut};
use edgelink::connectivity::{block_cut_tree, euler_tour, is_k_edge_connected, is_sk_edge_connected};
use edgelink::decomposition::{boundary_linked_decomposition, DepthPolicy};
use edgelink::family::{LazyFamily, VertexKey};
use edgelink::lifting::is_liftable;
use edgelink::linkage::{counterexample_family, solve_finite, SolverConfig, Verdict};
use edgelink::orient::{
    extend_orientation, orient_eulerian_consistent, verify_k_arc_connected, verify_well_balanced, ExtendConfig,
    Orientation,
};
use edgelink::truncation::truncate;
use edgelink::{EdgeId, MultiGraph, VertexId};

fn v(i: u32) -> VertexId {
    VertexId(i)
}

fn complete(n: u32) -> MultiGraph {
    let pairs: Vec<(u32, u32)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    MultiGraph::from_edges(n, &pairs).unwrap()
}

#[test]
fn complete_graph_connectivities() {
    // frozen from brute_edge_connectivity
    let k4 = complete(4);
    assert_eq!(brute_edge_connectivity(&k4), Some(3));
    assert_eq!(edgelink::flow::local_edge_connectivity(&k4, v(0), v(3)).unwrap(), 3);
    let k5 = complete(5);
    assert_eq!(brute_edge_connectivity(&k5), Some(4));
    assert!(is_k_edge_connected(&k5, 4));
    assert!(!is_k_edge_connected(&k5, 5));
}

#[test]
fn two_routes_through_s_lift() {
    // s–x–t, s–y–t plus x–y, with s = 0, x = 1, y = 2, t = 3
    let g = MultiGraph::from_edges(4, &[(0, 1), (1, 3), (0, 2), (2, 3), (1, 2)]).unwrap();
    assert!(is_sk_edge_connected(&g, v(0), 2).unwrap());
    let lifted = g.lift(v(0), EdgeId(0), EdgeId(2)).unwrap();
    let oracle = [(1, 2), (1, 3), (2, 3)].iter().all(|&(a, b)| brute_min_cut(&lifted, v(a), v(b)) >= 2);
    assert!(oracle);
    assert_eq!(is_liftable(&g, v(0), 2, EdgeId(0), EdgeId(2)).unwrap(), oracle);
}

#[test]
fn bowtie_chain_tree_size() {
    for b in 1..=5u32 {
        let mut pairs = Vec::new();
        for i in 0..b {
            let (a, m, c) = (2 * i, 2 * i + 1, 2 * i + 2);
            pairs.extend([(a, m), (m, c), (c, a)]);
        }
        let g = MultiGraph::from_edges(2 * b + 1, &pairs).unwrap();
        let t = block_cut_tree(&g).unwrap();
        assert_eq!(t.node_count(), (2 * b - 1) as usize);
        assert!(t.is_tree());
    }
}

#[test]
fn bowtie_tour_has_six_edges() {
    let g = MultiGraph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap();
    let w = euler_tour(&g).unwrap();
    assert_eq!(w.len(), 6);
    assert_eq!(w.start(), w.end());
    assert_eq!(w.edges.iter().collect::<BTreeSet<_>>().len(), 6);
}

#[test]
fn grid_ball_sizes() {
    let f = LazyFamily::grid(1);
    let sizes: Vec<usize> = (0..=4).map(|d| truncate(&f, &[f.origin()], d).unwrap().graph.vertex_count()).collect();
    // |x| + |y| <= d has 2d² + 2d + 1 points
    let oracle: Vec<usize> = (0..=4usize).map(|d| 2 * d * d + 2 * d + 1).collect();
    assert_eq!(sizes, oracle);
    assert_eq!(sizes, vec![1, 5, 13, 25, 41]);
}

#[test]
fn end_counts_of_the_test_families() {
    let grid = LazyFamily::grid(1);
    let dec = boundary_linked_decomposition(&grid, &[grid.origin()], &BTreeSet::from([VertexKey::ORIGIN]), DepthPolicy::default()).unwrap();
    assert_eq!(dec.sets.len(), 1);
    let ladder = LazyFamily::ladder(5).unwrap();
    let rung: BTreeSet<VertexKey> = (0..5).map(|c| VertexKey::new(0, 0, c)).collect();
    let dec = boundary_linked_decomposition(&ladder, &[ladder.origin()], &rung, DepthPolicy::default()).unwrap();
    assert_eq!(dec.sets.len(), 2);
    dec.validate().unwrap();
}

#[test]
fn counterexamples() {
    let two = counterexample_family(2).unwrap();
    assert_eq!((two.graph.vertex_count(), two.graph.edge_count()), (4, 4));
    assert!(!brute_linkable(&two.graph, &two.pairs));
    let four = counterexample_family(4).unwrap();
    assert_eq!((four.graph.vertex_count(), four.graph.edge_count()), (8, 16));
    assert_eq!(brute_edge_connectivity(&four.graph), Some(4));
    for inst in [two, four] {
        let verdict = solve_finite(&inst, SolverConfig::default()).unwrap();
        assert!(matches!(verdict, Verdict::Infeasible(_)));
    }
}

#[test]
fn orientation_examples() {
    let doubled_c4 = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    let o = orient_eulerian_consistent(&doubled_c4).unwrap();
    assert!(verify_k_arc_connected(&doubled_c4, &o, 2));
    assert!(verify_well_balanced(&doubled_c4, &o));

    let k5 = complete(5);
    let o = orient_eulerian_consistent(&k5).unwrap();
    assert!(verify_k_arc_connected(&k5, &o, 2));

    // K4 with a source vertex: λ(0, v) = 3 but nothing enters 0
    let k4 = complete(4);
    let mut bad = Orientation::default();
    for (e, a, b) in k4.edges() {
        bad.direct(e, a, b);
    }
    assert!(!verify_well_balanced(&k4, &bad));
}

#[test]
fn extension_of_an_oriented_triangle() {
    let mut g = MultiGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    let chord = g.add_edge(v(2), v(0)).unwrap();
    assert_eq!(brute_edge_connectivity(&g), Some(4));
    let mut pre = Orientation::default();
    pre.direct(EdgeId(0), v(0), v(1));
    pre.direct(EdgeId(1), v(1), v(2));
    pre.direct(chord, v(2), v(0));
    let (o, _) = extend_orientation(&g, 2, &pre, ExtendConfig::default()).unwrap();
    assert!(o.extends(&pre));
    assert!(verify_k_arc_connected(&g, &o, 2));
}
