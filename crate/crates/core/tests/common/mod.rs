//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// LoRa time on air in microseconds, written out directly from the modem
/// datasheet: low data rate optimisation is mandated once a symbol exceeds
/// 16 ms, CRC is always on.
pub fn airtime_us(sf: u32, bw_hz: f64, cr: u32, preamble: u32, explicit_header: bool, payload: u32) -> f64 {
    let t_sym_us = (1u64 << sf) as f64 / bw_hz * 1e6;
    let de = if t_sym_us > 16_000.0 { 1.0 } else { 0.0 };
    let ih = if explicit_header { 0.0 } else { 1.0 };
    let crc = 1.0;
    let num = 8.0 * payload as f64 - 4.0 * sf as f64 + 28.0 + 16.0 * crc - 20.0 * ih;
    let den = 4.0 * (sf as f64 - 2.0 * de);
    let n_payload = 8.0 + ((num / den).ceil() * (cr as f64 + 4.0)).max(0.0);
    let t_preamble = (preamble as f64 + 4.25) * t_sym_us;
    t_preamble + n_payload * t_sym_us
}

/// Log-distance loss, 128.95 dB at 1 km, exponent 2.32, distances below 1 m clamped.
pub fn path_loss_db(d_m: f64) -> f64 {
    128.95 + 23.2 * (d_m.max(1.0) / 1000.0).log10()
}

pub const SENSITIVITY: [f64; 6] = [-123.0, -126.0, -129.0, -132.0, -134.5, -137.0];

/// Exhaustive SF scan: for every SF from 7 up, test every gateway, and
/// take the first SF some gateway supports with the margin.
pub fn brute_force_sf(device: (f64, f64), gateways: &[(f64, f64)], tx_dbm: f64, margin_db: f64) -> (u8, bool) {
    for (i, sens) in SENSITIVITY.iter().enumerate() {
        for g in gateways {
            let rssi = tx_dbm - path_loss_db((device.0 - g.0).hypot(device.1 - g.1));
            if rssi - margin_db >= *sens {
                return (7 + i as u8, false);
            }
        }
    }
    (12, true)
}

/// Random multigraph edge list over `n` nodes; may repeat edges in either
/// orientation but never loops.
pub fn random_edges(r: &mut impl Rng, n: usize, m: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let a = r.random_range(0..n);
        let b = r.random_range(0..n);
        if a != b {
            edges.push((a, b));
        }
    }
    edges
}

pub fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("N{i}")).collect()
}

/// Dense 0/1 adjacency matrix.
pub fn adjacency_matrix(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<u8>> {
    let mut a = vec![vec![0u8; n]; n];
    for &(i, j) in edges {
        a[i][j] = 1;
        a[j][i] = 1;
    }
    a
}

pub fn matrix_centrality(a: &[Vec<u8>]) -> Vec<f64> {
    let n = a.len();
    a.iter()
        .map(|row| row.iter().map(|&x| x as usize).sum::<usize>() as f64 / (n - 1) as f64)
        .collect()
}

/// Random labelled tree: node `i > 0` hangs off a uniformly chosen earlier node.
pub fn random_tree(r: &mut impl Rng, n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (r.random_range(0..i), i)).collect()
}

/// Flow through each tree node when every node's demand travels to `root`:
/// enumerate each node's unique path and add its demand along it.
pub fn tree_flow_by_paths(n: usize, edges: &[(usize, usize)], root: usize, demand: &[f64]) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut flow = vec![0.0; n];
    for u in 0..n {
        // unique path u -> root by search from u
        let mut prev = vec![usize::MAX; n];
        let mut queue = VecDeque::from([u]);
        prev[u] = u;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        let mut v = root;
        loop {
            flow[v] += demand[u];
            if v == u {
                break;
            }
            v = prev[v];
        }
    }
    flow
}

/// Non-empty data rows per section of an INP text, keyed by upper-case name.
pub fn count_inp_rows(text: &str) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    let mut section = String::new();
    for line in text.lines() {
        let body = line.split(';').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with('[') {
            section = body.trim_matches(|c| c == '[' || c == ']').to_uppercase();
            continue;
        }
        *counts.entry(section.clone()).or_insert(0) += 1;
    }
    counts
}

/// Builds INP text for a network whose nodes sit at `positions`.
/// Node 0 is a reservoir, the others are junctions `J<i>` with the given demand.
pub fn inp_text(positions: &[(f64, f64)], edges: &[(usize, usize)], demand: &[f64]) -> String {
    let name = |i: usize| if i == 0 { "R0".to_owned() } else { format!("J{i}") };
    let mut s = String::from("[JUNCTIONS]\n");
    for i in 1..positions.len() {
        s += &format!("J{i} 0 {}\n", demand[i]);
    }
    s += "[RESERVOIRS]\nR0 50\n[PIPES]\n";
    for (k, &(a, b)) in edges.iter().enumerate() {
        s += &format!("P{k} {} {} 100 200 100\n", name(a), name(b));
    }
    s += "[COORDINATES]\n";
    for (i, p) in positions.iter().enumerate() {
        s += &format!("{} {} {}\n", name(i), p.0, p.1);
    }
    s
}

pub const NET50: &str = include_str!("../data/net50.inp");
