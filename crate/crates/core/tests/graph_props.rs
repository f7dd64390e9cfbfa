mod common;

use proptest::prelude::*;
use wdn_lora::graph::{build_adjacency, component_labels, degree_centrality, graph_stats, Adjacency};
use wdn_lora::inp::parse_inp;

#[test]
fn centrality_matches_adjacency_matrix_on_random_graphs() {
    let mut r = common::rng(11);
    for (n, m) in [(50, 120), (200, 600), (200, 40)] {
        let edges = common::random_edges(&mut r, n, m);
        let adj = Adjacency::from_edges(common::ids(n), edges.iter().copied()).unwrap();
        let cv = degree_centrality(&adj);
        let a = common::adjacency_matrix(n, &edges);
        assert_eq!(cv.centrality, common::matrix_centrality(&a), "n={n} m={m}");
        for i in 0..n {
            for j in 0..n {
                assert_eq!(adj.has_edge(i, j), a[i][j] == 1);
            }
        }
    }
}

#[test]
fn fixture_graph_is_connected() {
    let net = parse_inp(common::NET50.as_bytes()).unwrap();
    let adj = build_adjacency(&net).unwrap();
    let stats = graph_stats(&adj);
    assert_eq!(stats.nodes, 50);
    assert_eq!(stats.components, 1);
    assert_eq!(component_labels(&adj).1, 1);
}

fn graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..120).prop_flat_map(|n| {
        let edge = (0..n, 0..n).prop_filter("no loops", |(a, b)| a != b);
        (Just(n), prop::collection::vec(edge, 0..3 * n))
    })
}

proptest! {
    #[test]
    fn handshake_lemma((n, edges) in graph()) {
        let adj = Adjacency::from_edges(common::ids(n), edges).unwrap();
        let cv = degree_centrality(&adj);
        let total: usize = cv.degree.iter().sum();
        prop_assert_eq!(total, 2 * adj.edge_count());
        let scaled: f64 = cv.centrality.iter().sum::<f64>() * (n - 1) as f64;
        prop_assert!((scaled - total as f64).abs() < 1e-9 * total.max(1) as f64);
        prop_assert!(cv.centrality.iter().all(|&c| (0.0..=1.0).contains(&c)));
    }

    #[test]
    fn adding_an_edge_moves_exactly_two_entries((n, edges) in graph(), a in 0usize..1000, b in 0usize..1000) {
        let (i, j) = (a % n, b % n);
        prop_assume!(i != j);
        let before = Adjacency::from_edges(common::ids(n), edges.iter().copied()).unwrap();
        prop_assume!(!before.has_edge(i, j));
        let after = Adjacency::from_edges(common::ids(n), edges.iter().copied().chain([(i, j)])).unwrap();
        let (c0, c1) = (degree_centrality(&before).centrality, degree_centrality(&after).centrality);
        let step = 1.0 / (n - 1) as f64;
        for v in 0..n {
            let delta = c1[v] - c0[v];
            let want = if v == i || v == j { step } else { 0.0 };
            prop_assert!((delta - want).abs() < 1e-12, "node {v}: {delta} vs {want}");
        }
    }

    #[test]
    fn parallel_links_saturate((n, edges) in graph()) {
        let once = Adjacency::from_edges(common::ids(n), edges.iter().copied()).unwrap();
        let twice = Adjacency::from_edges(
            common::ids(n),
            edges.iter().copied().chain(edges.iter().map(|&(a, b)| (b, a))),
        )
        .unwrap();
        prop_assert_eq!(once, twice);
    }
}
