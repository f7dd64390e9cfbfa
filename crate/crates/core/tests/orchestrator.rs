mod common;

use std::collections::BTreeMap;
use std::path::Path;

use wdn_lora::orchestrator::{
    kpi_search, prepare, run_scenario, ComparisonTable, KpiPredicate, RunSummary, ScenarioConfig,
};
use wdn_lora::placement::{PlacementInput, PlacementRegistry};
use wdn_lora::radio::export::read_rows;
use wdn_lora::radio::traffic::TrafficConfig;
use wdn_lora::radio::{airtime, simulate, SpreadingFactor};
use wdn_lora::synthetic::{generate_inp, SyntheticSpec};
use wdn_lora::Error;

fn scenario(dir: &Path, inp_text: &str) -> ScenarioConfig {
    let inp = dir.join("net.inp");
    std::fs::write(&inp, inp_text).unwrap();
    ScenarioConfig {
        name: "test".into(),
        inp,
        out_dir: dir.join("out"),
        gateway_counts: vec![2, 4],
        seeds: vec![1, 2],
        horizon_s: 6.0 * 3600.0,
        ..Default::default()
    }
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(base: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                let key = path.strip_prefix(base).unwrap().display().to_string();
                out.insert(key, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

#[test]
fn single_cell_table_equals_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig {
        gateway_counts: vec![3],
        strategies: vec!["degree_centrality".into()],
        seeds: vec![7],
        ..scenario(tmp.path(), common::NET50)
    };
    let report = run_scenario(&cfg).unwrap();
    assert_eq!(report.table.rows.len(), 1);

    let prepared = prepare(&cfg).unwrap();
    let positions = prepared.positions();
    let input = PlacementInput::new(&positions, &prepared.centrality.weight).unwrap();
    let set = PlacementRegistry::builtin(&cfg.placement).get("degree_centrality").unwrap().place(&input, 3, 7).unwrap();
    let traffic = wdn_lora::radio::traffic::TrafficRegistry::builtin().create(&cfg.traffic).unwrap();
    let direct = simulate(&prepared.devices, &set.positions, &cfg.sim_config(), traffic.as_ref(), 7).unwrap();

    let row = &report.table.rows[0];
    assert_eq!(row.energy_j_mean, direct.energy.total_j);
    assert_eq!(row.energy_j_std, 0.0);
    assert_eq!(row.pdr, direct.features.pdr);
    assert_eq!(row.mean_sf, direct.features.mean_sf);
}

#[test]
fn periodic_traffic_energy_within_closed_form_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig {
        gateway_counts: vec![3],
        strategies: vec!["regular_grid".into()],
        seeds: vec![1, 2],
        horizon_s: 86_400.0,
        traffic: TrafficConfig { model: "periodic_jitter".into(), period_s: 300.0, jitter_s: 30.0 },
        ..scenario(tmp.path(), common::NET50)
    };
    let report = run_scenario(&cfg).unwrap();
    let gw_csv = std::fs::read_to_string(report.output_dir.join("runs/k3_regular_grid_s1/gateways.csv")).unwrap();
    let gateways: Vec<(f64, f64)> = gw_csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    let prepared = prepare(&cfg).unwrap();
    // one uplink's cost per device, from the oracle's SF
    let per_round: f64 = prepared
        .positions()
        .iter()
        .map(|&p| {
            let (sf, _) = common::brute_force_sf(p, &gateways, 14.0, 10.0);
            3.3 * 0.028 * airtime(SpreadingFactor::new(sf).unwrap(), &cfg.radio).unwrap()
        })
        .sum();
    // 288 slots a day; the first and last slot can each gain or lose one send
    for run in &report.runs {
        assert!(run.energy_j >= 287.0 * per_round - 1e-6, "{run:?}");
        assert!(run.energy_j <= 289.0 * per_round + 1e-6, "{run:?}");
    }
    assert_ne!(report.runs[0].energy_j, report.runs[1].energy_j);
}

#[test]
fn kpi_search_agrees_with_exhaustive_evaluation() {
    let tmp = tempfile::tempdir().unwrap();
    let text = generate_inp(&SyntheticSpec { town_nodes: 150, towns: 3, width_m: 6000.0, height_m: 4000.0, ..Default::default() });
    let cfg = ScenarioConfig { gateway_counts: vec![1, 2, 3, 5, 8], seeds: vec![1, 2, 3], ..scenario(tmp.path(), &text) };
    let report = run_scenario(&cfg).unwrap();
    let runs: Vec<RunSummary> =
        read_rows(std::fs::File::open(report.output_dir.join("runs.csv")).unwrap()).unwrap();
    assert_eq!(runs, report.runs);

    for threshold in [0.0, 0.5, 0.9, 0.95, 0.99, 1.01] {
        let predicate: KpiPredicate = format!("pdr>={threshold}").parse().unwrap();
        let found = kpi_search(&report.table, &predicate).unwrap();
        for outcome in &found {
            // exhaustive: mean PDR over seeds at every K, smallest passing K
            let expected = cfg.gateway_counts.iter().copied().find(|&k| {
                let pdrs: Vec<f64> =
                    runs.iter().filter(|r| r.k == k && r.strategy == outcome.strategy).map(|r| r.pdr).collect();
                pdrs.iter().sum::<f64>() / pdrs.len() as f64 >= threshold
            });
            assert_eq!(outcome.k, expected, "{} pdr>={threshold}", outcome.strategy);
        }
    }
}

#[test]
fn sweep_outputs_are_byte_identical_on_rerun() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = scenario(tmp.path(), common::NET50);
    cfg.export.transmissions = true;
    run_scenario(&cfg).unwrap();
    let first = tree(&cfg.output_dir());
    run_scenario(&cfg).unwrap();
    let second = tree(&cfg.output_dir());
    assert_eq!(first.keys().collect::<Vec<_>>(), second.keys().collect::<Vec<_>>());
    assert!(first == second);
    for name in ["comparison.csv", "comparison.txt", "runs.csv", "network.json", "centrality.csv", "weights.csv"] {
        assert!(first.contains_key(name), "{name}");
    }
    assert!(first.contains_key("runs/k4_degree_centrality_s2/transmissions.csv"));
}

#[test]
fn comparison_csv_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig { gateway_counts: vec![1, 2, 3, 4, 5], seeds: vec![3], ..scenario(tmp.path(), common::NET50) };
    let report = run_scenario(&cfg).unwrap();
    assert_eq!(report.table.rows.len(), 10);
    let bytes = std::fs::read(report.output_dir.join("comparison.csv")).unwrap();
    let back = ComparisonTable::read_csv(bytes.as_slice()).unwrap();
    assert_eq!(back, report.table);
    let pivot = std::fs::read_to_string(report.output_dir.join("comparison.txt")).unwrap();
    assert_eq!(pivot.lines().count(), 1 + 5);
}

#[test]
fn default_gateway_counts_give_ten_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let text = generate_inp(&SyntheticSpec { town_nodes: 400, ..Default::default() });
    let cfg = ScenarioConfig {
        horizon_s: 3600.0,
        gateway_counts: ScenarioConfig::default().gateway_counts,
        ..scenario(tmp.path(), &text)
    };
    let report = run_scenario(&cfg).unwrap();
    let keys: Vec<(usize, &str)> = report.table.rows.iter().map(|r| (r.k, r.strategy.as_str())).collect();
    let mut want = Vec::new();
    for k in [77, 96, 117, 140, 165] {
        want.push((k, "degree_centrality"));
        want.push((k, "regular_grid"));
    }
    assert_eq!(keys, want);
}

#[test]
fn failures_carry_run_context() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig { gateway_counts: vec![10, 60], ..scenario(tmp.path(), common::NET50) };
    match run_scenario(&cfg) {
        Err(err @ Error::Run { k: 60, .. }) => {
            assert_eq!(err.category(), "placement.k_exceeds_n");
            assert!(err.to_string().starts_with("k=60 strategy=degree_centrality seed=1"), "{err}");
        }
        other => panic!("unexpected {other:?}"),
    }

    let bad = ScenarioConfig { strategies: vec!["random".into()], ..scenario(tmp.path(), common::NET50) };
    assert_eq!(run_scenario(&bad).unwrap_err().category(), "placement.unknown_strategy");
    let missing = ScenarioConfig { inp: tmp.path().join("nope.inp"), ..scenario(tmp.path(), common::NET50) };
    assert_eq!(run_scenario(&missing).unwrap_err().category(), "io");
}
