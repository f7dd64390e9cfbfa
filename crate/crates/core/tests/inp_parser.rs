mod common;

use proptest::prelude::*;
use wdn_lora::inp::{parse_inp, InpError, NodeKind};
use wdn_lora::synthetic::{generate_inp, SyntheticSpec};

#[test]
fn bundled_fixture_counts() {
    let net = parse_inp(common::NET50.as_bytes()).unwrap();
    let rows = common::count_inp_rows(common::NET50);
    assert_eq!(net.node_count(), 50);
    assert_eq!(net.counts.junctions, rows["JUNCTIONS"]);
    assert_eq!(net.counts.reservoirs, 3);
    assert_eq!(net.counts.reservoirs, rows["RESERVOIRS"]);
    assert_eq!(net.counts.pipes, 59);
    assert_eq!(net.counts.pipes, rows["PIPES"]);
    assert_eq!(net.node_count(), rows["COORDINATES"]);
    assert_eq!(net.options.get("OPTIONS/UNITS").map(String::as_str), Some("LPS"));
    assert_eq!(net.warnings, ["section [PATTERNS] ignored"]);
}

#[test]
fn demands_section_adds_to_base_demand() {
    let net = parse_inp(common::NET50.as_bytes()).unwrap();
    let j5 = &net.nodes[net.node_index("J5").unwrap()];
    let listed: f64 = common::NET50
        .lines()
        .find(|l| l.starts_with("J5 "))
        .and_then(|l| l.split_whitespace().nth(2))
        .unwrap()
        .parse()
        .unwrap();
    assert!((j5.base_demand - (listed + 0.75)).abs() < 1e-12);
}

#[test]
fn every_node_inside_bbox() {
    let net = parse_inp(common::NET50.as_bytes()).unwrap();
    assert!(net.nodes.iter().all(|n| net.bbox.contains(n.position)));
    let sources = net.nodes.iter().filter(|n| n.kind == NodeKind::Reservoir).count();
    assert_eq!(sources, 3);
}

#[test]
fn truncated_file_reports_missing_coordinates() {
    let cut = common::NET50.split("[COORDINATES]").next().unwrap();
    assert!(matches!(parse_inp(cut.as_bytes()), Err(InpError::MissingSection(_) | InpError::MissingCoordinates(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_networks_parse_with_matching_counts(seed in 0u64..10_000, nodes in 40usize..400, towns in 1usize..6) {
        let spec = SyntheticSpec { seed, town_nodes: nodes, towns, ..Default::default() };
        let text = generate_inp(&spec);
        let rows = common::count_inp_rows(&text);
        let net = parse_inp(text.as_bytes()).unwrap();
        prop_assert_eq!(net.counts.junctions, rows["JUNCTIONS"]);
        prop_assert_eq!(net.counts.pipes, rows["PIPES"]);
        prop_assert_eq!(net.node_count(), rows["COORDINATES"]);
        prop_assert_eq!(net.counts.reservoirs + net.counts.tanks, spec.reservoirs + spec.tanks);
    }

    #[test]
    fn header_case_and_comments_do_not_matter(seed in 0u64..1000) {
        let text = generate_inp(&SyntheticSpec { seed, town_nodes: 60, towns: 2, ..Default::default() });
        let mangled: String = text
            .lines()
            .map(|l| if l.starts_with('[') { l.to_lowercase() } else if l.is_empty() { l.to_owned() } else { format!("{l} ; note") })
            .collect::<Vec<_>>()
            .join("\n");
        let a = parse_inp(text.as_bytes()).unwrap();
        let b = parse_inp(mangled.as_bytes()).unwrap();
        prop_assert_eq!(a.nodes, b.nodes);
        prop_assert_eq!(a.links, b.links);
    }
}
