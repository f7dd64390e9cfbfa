mod common;

use proptest::prelude::*;
use rand::Rng;
use wdn_lora::graph::{build_adjacency, degree_centrality};
use wdn_lora::hydraulics::{flow_proxy, ingest_hydraulic_csv, placement_weights, NodeFlowMeasure, ProxyDistance};
use wdn_lora::inp::{parse_inp, WaterNetwork};

fn tree_network(seed: u64, n: usize) -> (WaterNetwork, Vec<(usize, usize)>, Vec<f64>) {
    let mut r = common::rng(seed);
    let edges = common::random_tree(&mut r, n);
    let pos: Vec<(f64, f64)> = (0..n).map(|_| (r.random_range(0.0..1000.0), r.random_range(0.0..1000.0))).collect();
    let mut demand: Vec<f64> = (0..n).map(|_| (r.random_range(0.0..5.0_f64) * 100.0).round() / 100.0).collect();
    demand[0] = 0.0;
    let net = parse_inp(common::inp_text(&pos, &edges, &demand).as_bytes()).unwrap();
    (net, edges, demand)
}

#[test]
fn tree_flow_equals_path_enumeration() {
    for seed in 0..10 {
        let (net, edges, demand) = tree_network(seed, 30);
        let adj = build_adjacency(&net).unwrap();
        let proxy = flow_proxy(&net, &adj, ProxyDistance::Hops).unwrap();
        // file order puts the reservoir after the junctions; map back by id
        let oracle = common::tree_flow_by_paths(30, &edges, 0, &demand);
        for (i, node) in net.nodes.iter().enumerate() {
            let idx: usize = if node.id == "R0" { 0 } else { node.id[1..].parse().unwrap() };
            assert!((proxy.flow[i] - oracle[idx]).abs() < 1e-9, "seed {seed} node {}", node.id);
        }
        assert!(proxy.unreachable.is_empty());
    }
}

#[test]
fn hydraulic_csv_flow_is_half_incident_mean() {
    let (net, _, _) = tree_network(3, 12);
    let mut links = String::from("time_s,link_id,flow\n");
    let mut nodes = String::from("time_s,node_id,pressure,demand\n");
    let flow_at = |l: usize, t: usize| (l as f64 + 1.0) * if t.is_multiple_of(2) { 1.0 } else { -3.0 };
    for t in 0..4 {
        for (l, link) in net.links.iter().enumerate() {
            links += &format!("{},{},{}\n", t * 3600, link.id, flow_at(l, t));
        }
        for node in &net.nodes {
            nodes += &format!("{},{},30,0.5\n", t * 3600, node.id);
        }
    }
    let series = ingest_hydraulic_csv(nodes.as_bytes(), links.as_bytes(), &net).unwrap();
    let mut want = vec![0.0; net.node_count()];
    for (l, link) in net.links.iter().enumerate() {
        let mean = (0..4).map(|t| flow_at(l, t).abs()).sum::<f64>() / 4.0;
        want[link.from] += mean / 2.0;
        want[link.to] += mean / 2.0;
    }
    let got = series.node_flow(NodeFlowMeasure::IncidentLinkMean);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-12);
    }
    assert!(series.node_flow(NodeFlowMeasure::Demand).iter().all(|&d| d == 0.5));

    let mut n_out = Vec::new();
    let mut l_out = Vec::new();
    series.write_node_csv(&net, &mut n_out).unwrap();
    series.write_link_csv(&net, &mut l_out).unwrap();
    let again = ingest_hydraulic_csv(n_out.as_slice(), l_out.as_slice(), &net).unwrap();
    assert_eq!(again, series);
}

fn looped_network() -> impl Strategy<Value = (u64, usize, usize)> {
    (0u64..5000, 3usize..60, 0usize..30)
}

fn build_looped(seed: u64, n: usize, extra: usize, scale: f64) -> WaterNetwork {
    let mut r = common::rng(seed);
    let mut edges = common::random_tree(&mut r, n);
    edges.extend(common::random_edges(&mut r, n, extra));
    let pos: Vec<(f64, f64)> = (0..n).map(|_| (r.random_range(0.0..500.0), r.random_range(0.0..500.0))).collect();
    let demand: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { r.random_range(0.0..3.0) * scale }).collect();
    parse_inp(common::inp_text(&pos, &edges, &demand).as_bytes()).unwrap()
}

proptest! {
    #[test]
    fn mass_balance((seed, n, extra) in looped_network(), metric in prop_oneof![Just(ProxyDistance::Hops), Just(ProxyDistance::PipeLength)]) {
        let net = build_looped(seed, n, extra, 1.0);
        let adj = build_adjacency(&net).unwrap();
        let p = flow_proxy(&net, &adj, metric).unwrap();
        let total: f64 = net.nodes.iter().map(|x| x.base_demand).sum();
        let at_sources: f64 = (0..n).filter(|&v| net.nodes[v].kind.is_source()).map(|v| p.flow[v]).sum();
        prop_assert!((total - at_sources).abs() < 1e-9 * total.max(1.0));
        // node balance: own demand plus everything routed through it
        for v in 0..n {
            let inflow: f64 = (0..n).filter(|&c| p.parent[c] == Some(v)).map(|c| p.flow[c]).sum();
            prop_assert!((p.flow[v] - net.nodes[v].base_demand - inflow).abs() < 1e-9 * total.max(1.0));
        }
    }

    #[test]
    fn weights_ignore_demand_units((seed, n, extra) in looped_network(), scale in 0.01f64..1000.0, alpha in 0.0f64..=1.0) {
        let weights = |s: f64| {
            let net = build_looped(seed, n, extra, s);
            let adj = build_adjacency(&net).unwrap();
            let mut cv = degree_centrality(&adj);
            let flow = flow_proxy(&net, &adj, ProxyDistance::Hops).unwrap().flow;
            placement_weights(&mut cv, &flow, alpha).unwrap().weight
        };
        let (a, b) = (weights(1.0), weights(scale));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        prop_assert!(a.iter().all(|&w| (0.0..=1.0 + 1e-12).contains(&w)));
    }
}
