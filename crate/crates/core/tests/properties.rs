mod common;

use std::collections::BTreeSet;

use common::{brute_linkable, brute_min_cut, connected_multigraph};
use edgelink::certify::{linkage_problems, verify, Certificate, Document, LinkageCertificate, Verification};
use edgelink::connectivity::{cut_identity_sides, edge_connectivity, is_k_edge_connected};
use edgelink::family::LazyFamily;
use edgelink::flow::local_edge_connectivity;
use edgelink::gen::{random_eulerian_2k, random_sk_instance};
use edgelink::io::IdentifiedGraph;
use edgelink::lifting::{admissible_splitting, is_liftable, lifting_graph};
use edgelink::linkage::{solve_finite, LinkageInstance, SolverConfig, Verdict};
use edgelink::orient::{orient_eulerian_consistent, verify_k_arc_connected};
use edgelink::truncation::truncate;
use edgelink::{MultiGraph, VertexId};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn two_vertices(g: &MultiGraph, a: u32, b: u32) -> (VertexId, VertexId) {
    let n = g.vertex_count() as u32;
    let u = VertexId(a % n);
    let mut v = VertexId(b % n);
    if u == v {
        v = VertexId((v.0 + 1) % n);
    }
    (u, v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flow_matches_subset_cut(g in connected_multigraph(6, 10), a in any::<u32>(), b in any::<u32>()) {
        let (u, v) = two_vertices(&g, a, b);
        let f = local_edge_connectivity(&g, u, v).unwrap();
        prop_assert_eq!(f, brute_min_cut(&g, u, v));
        prop_assert_eq!(f, local_edge_connectivity(&g, v, u).unwrap());
    }

    #[test]
    fn connectivity_threshold_is_sharp(g in connected_multigraph(6, 10)) {
        let l = edge_connectivity(&g).unwrap();
        prop_assert!(is_k_edge_connected(&g, l));
        prop_assert!(!is_k_edge_connected(&g, l + 1));
    }

    #[test]
    fn cut_identity_holds(g in connected_multigraph(7, 14), m1 in any::<u8>(), m2 in any::<u8>(), pick in any::<u32>()) {
        let n = g.vertex_count() as u32;
        let shared = VertexId(pick % n);
        let set = |m: u8| -> BTreeSet<VertexId> {
            (0..n).filter(|i| m >> (i % 8) & 1 == 1).map(VertexId).chain([shared]).collect()
        };
        let (lhs, rhs) = cut_identity_sides(&g, &set(m1), &set(m2)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn identified_graph_round_trips(g in connected_multigraph(6, 10)) {
        let back = IdentifiedGraph::from_graph(&g).to_graph().unwrap();
        prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn solver_agrees_with_enumeration(g in connected_multigraph(6, 9), raw in proptest::collection::vec(any::<(u32, u32)>(), 1..=3)) {
        let pairs: Vec<_> = raw.iter().map(|&(a, b)| two_vertices(&g, a, b)).collect();
        let inst = LinkageInstance::new(g.clone(), pairs.clone()).unwrap();
        let verdict = solve_finite(&inst, SolverConfig::default()).unwrap();
        prop_assert_eq!(matches!(verdict, Verdict::Linked(_)), brute_linkable(&g, &pairs));
        if let Verdict::Linked(l) = verdict {
            prop_assert!(linkage_problems(&g, &pairs, &l).is_empty());
            let doc = Document::new(Certificate::Linkage(LinkageCertificate { graph: IdentifiedGraph::from_graph(&g), pairs, linkage: l }));
            prop_assert_eq!(verify(&doc), Verification::Verified);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lifting_graph_is_monotone(seed in any::<u64>(), deg in 4usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, s) = random_sk_instance(&mut rng, 5, deg, 2);
        let l = lifting_graph(&g, s, 2).unwrap();
        if let Some(&(e, f)) = l.adj.iter().next() {
            prop_assert!(is_liftable(&g, s, 2, e, f).unwrap());
            let lifted = g.lift(s, e, f).unwrap();
            let after = lifting_graph(&lifted, s, 2).unwrap();
            let keep: BTreeSet<_> = after.nodes.iter().copied().collect();
            prop_assert!(after.is_subgraph_of(&l.restrict(&keep)));
        }
    }

    #[test]
    fn splitting_preserves_connectivity(seed in any::<u64>(), deg in 4usize..=9, k in prop::sample::select(vec![2usize, 4])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, s) = random_sk_instance(&mut rng, 5, deg, k);
        let sp = admissible_splitting(&g, s, k).unwrap();
        let want = if deg % 2 == 0 { 0 } else { k + 1 };
        prop_assert_eq!(if sp.graph.contains_vertex(s) { sp.graph.degree(s) } else { 0 }, want);
        let others: Vec<VertexId> = sp.graph.vertices().filter(|&v| v != s).collect();
        for w in others.windows(2) {
            prop_assert!(brute_min_cut(&sp.graph, w[0], w[1]) >= k);
        }
    }

    #[test]
    fn euler_orientation_is_k_arc_connected(seed in any::<u64>(), k in 1usize..=2, n in 3u32..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_eulerian_2k(&mut rng, n, k, 1);
        let o = orient_eulerian_consistent(&g).unwrap();
        prop_assert!(o.is_eulerian_consistent());
        prop_assert!(verify_k_arc_connected(&g, &o, k));
    }

    #[test]
    fn truncation_ids_are_prefix_stable(d in 0u32..6, extra in 1u32..4, which in 0usize..3) {
        let f = [LazyFamily::grid(1), LazyFamily::ladder(5).unwrap(), LazyFamily::grid(2)][which].clone();
        let roots = [f.origin()];
        let small = truncate(&f, &roots, d).unwrap();
        let big = truncate(&f, &roots, d + extra).unwrap();
        for v in small.graph.vertices() {
            prop_assert_eq!(small.key(v), big.key(v));
        }
        for (e, a, b) in small.graph.edges() {
            prop_assert_eq!(big.graph.endpoints(e).unwrap(), (a, b));
            prop_assert_eq!(small.edge_key(e), big.edge_key(e));
        }
    }
}
