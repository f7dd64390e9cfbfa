//! Seeded generator for synthetic water networks, emitted as INP text.
//!
//! A network is a handful of towns, each a jittered street lattice, joined
//! by trunk mains along a minimum spanning tree of the town centres and fed
//! by reservoirs sitting just outside town edges. Town sizes and positions
//! are irregular, so large parts of the bounding box carry no nodes at all,
//! as in real utilities.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub seed: u64,
    /// Junctions spread over the town lattices (trunk and source nodes come on top).
    pub town_nodes: usize,
    pub towns: usize,
    pub reservoirs: usize,
    pub tanks: usize,
    pub width_m: f64,
    pub height_m: f64,
    pub street_spacing_m: f64,
    pub trunk_spacing_m: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            seed: 1,
            town_nodes: 560,
            towns: 6,
            reservoirs: 2,
            tanks: 1,
            width_m: 14_000.0,
            height_m: 10_000.0,
            street_spacing_m: 350.0,
            trunk_spacing_m: 450.0,
        }
    }
}

struct Builder {
    junctions: Vec<(String, f64, f64, f64)>,
    sources: Vec<(String, bool, f64, f64)>,
    pipes: Vec<(String, String, String, f64, f64)>,
}

impl Builder {
    fn junction(&mut self, x: f64, y: f64, demand: f64) -> (String, (f64, f64)) {
        let id = format!("J{}", self.junctions.len() + 1);
        self.junctions.push((id.clone(), x, y, demand));
        (id, (x, y))
    }

    fn pipe(&mut self, a: &(String, (f64, f64)), b: &(String, (f64, f64)), diameter: f64) {
        let length = ((a.1 .0 - b.1 .0).hypot(a.1 .1 - b.1 .1)).max(1.0);
        let id = format!("P{}", self.pipes.len() + 1);
        self.pipes.push((id, a.0.clone(), b.0.clone(), round(length), diameter));
    }
}

fn round(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Generates the network described by `spec` as EPANET INP text.
pub fn generate_inp(spec: &SyntheticSpec) -> String {
    let mut rng = rng::substream(spec.seed, "synthetic", 0);
    let towns = spec.towns.max(1);

    // uneven town sizes: shares drawn in [0.4, 1.6] and normalised
    let shares: Vec<f64> = (0..towns).map(|_| rng.random_range(0.4..1.6)).collect();
    let total: f64 = shares.iter().sum();
    let mut sizes: Vec<usize> = shares.iter().map(|s| ((s / total) * spec.town_nodes as f64).floor() as usize).collect();
    let short = spec.town_nodes.saturating_sub(sizes.iter().sum());
    for i in 0..short {
        sizes[i % towns] += 1;
    }
    for s in &mut sizes {
        *s = (*s).max(2);
    }

    let mut b = Builder { junctions: Vec::new(), sources: Vec::new(), pipes: Vec::new() };
    let mut town_nodes: Vec<Vec<(String, (f64, f64))>> = Vec::new();
    let mut centres: Vec<(f64, f64)> = Vec::new();
    let s = spec.street_spacing_m;

    for &size in &sizes {
        let cols = ((size as f64).sqrt() * rng.random_range(0.8..1.25)).ceil().max(1.0) as usize;
        let rows = size.div_ceil(cols);
        let half = (cols as f64 * s / 2.0, rows as f64 * s / 2.0);
        // keep towns apart; give up on separation after a few tries
        let mut centre = (0.0, 0.0);
        for attempt in 0..200 {
            centre = (
                rng.random_range(half.0..(spec.width_m - half.0).max(half.0 + 1.0)),
                rng.random_range(half.1..(spec.height_m - half.1).max(half.1 + 1.0)),
            );
            let clear = centres.iter().all(|c| (c.0 - centre.0).hypot(c.1 - centre.1) > 3.0 * half.0.max(half.1) + 600.0);
            if clear || attempt == 199 {
                break;
            }
        }
        centres.push(centre);

        let mut grid: Vec<Vec<(String, (f64, f64))>> = Vec::new();
        let mut nodes = Vec::with_capacity(size);
        for r in 0..rows {
            let mut row = Vec::new();
            for c in 0..cols {
                if r * cols + c >= size {
                    break;
                }
                let x = centre.0 - half.0 + (c as f64 + 0.5) * s + rng.random_range(-0.25..0.25) * s;
                let y = centre.1 - half.1 + (r as f64 + 0.5) * s + rng.random_range(-0.25..0.25) * s;
                let demand = round(rng.random_range(0.1..2.0));
                let j = b.junction(round(x), round(y), demand);
                if let Some(prev) = row.last() {
                    b.pipe(prev, &j, 150.0);
                }
                row.push(j);
            }
            if let Some(above) = grid.last() {
                for (c, j) in row.iter().enumerate() {
                    if c == 0 || rng.random_bool(0.6) {
                        b.pipe(&above[c], j, 150.0);
                    }
                }
            }
            nodes.extend(row.iter().cloned());
            grid.push(row);
        }
        town_nodes.push(nodes);
    }

    // trunk mains along the MST of town centres (Prim, lowest index first)
    let mut in_tree = vec![false; towns];
    in_tree[0] = true;
    for _ in 1..towns {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in (0..towns).filter(|&a| in_tree[a]) {
            for t in (0..towns).filter(|&t| !in_tree[t]) {
                let d = (centres[a].0 - centres[t].0).hypot(centres[a].1 - centres[t].1);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, a, t));
                }
            }
        }
        let (_, a, t) = best.expect("a town remains outside the tree");
        in_tree[t] = true;
        let closest = |from: (f64, f64), nodes: &[(String, (f64, f64))]| {
            nodes
                .iter()
                .min_by(|p, q| {
                    let dp = (p.1 .0 - from.0).hypot(p.1 .1 - from.1);
                    let dq = (q.1 .0 - from.0).hypot(q.1 .1 - from.1);
                    dp.total_cmp(&dq)
                })
                .cloned()
                .expect("towns are non-empty")
        };
        let start = closest(centres[t], &town_nodes[a]);
        let end = closest(start.1, &town_nodes[t]);
        let span = (end.1 .0 - start.1 .0).hypot(end.1 .1 - start.1 .1);
        let hops = (span / spec.trunk_spacing_m).ceil().max(1.0) as usize;
        let mut prev = start.clone();
        for h in 1..hops {
            let f = h as f64 / hops as f64;
            let x = start.1 .0 + f * (end.1 .0 - start.1 .0) + rng.random_range(-0.1..0.1) * spec.trunk_spacing_m;
            let y = start.1 .1 + f * (end.1 .1 - start.1 .1) + rng.random_range(-0.1..0.1) * spec.trunk_spacing_m;
            let j = b.junction(round(x), round(y), 0.0);
            b.pipe(&prev, &j, 300.0);
            prev = j;
        }
        b.pipe(&prev, &end, 300.0);
    }

    // sources just outside a town edge node
    let mut order: Vec<usize> = (0..towns).collect();
    order.shuffle(&mut rng);
    for i in 0..spec.reservoirs + spec.tanks {
        let town = &town_nodes[order[i % towns]];
        let edge = town[rng.random_range(0..town.len().min(town.len() / 4 + 1))].clone();
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let pos = (round(edge.1 .0 + 300.0 * angle.cos()), round(edge.1 .1 + 300.0 * angle.sin()));
        let is_tank = i >= spec.reservoirs;
        let id = if is_tank { format!("T{}", i - spec.reservoirs + 1) } else { format!("R{}", i + 1) };
        b.sources.push((id.clone(), is_tank, pos.0, pos.1));
        b.pipe(&(id, pos), &edge, 400.0);
    }

    let mut out = String::new();
    let _ = writeln!(out, "[TITLE]\nSynthetic network seed {}\n", spec.seed);
    out.push_str("[JUNCTIONS]\n;ID Elev Demand\n");
    for (id, _, _, demand) in &b.junctions {
        let _ = writeln!(out, "{id} 0 {demand}");
    }
    out.push_str("\n[RESERVOIRS]\n;ID Head\n");
    for (id, _, _, _) in b.sources.iter().filter(|s| !s.1) {
        let _ = writeln!(out, "{id} 60");
    }
    out.push_str("\n[TANKS]\n;ID Elev InitLvl MinLvl MaxLvl Diam MinVol\n");
    for (id, _, _, _) in b.sources.iter().filter(|s| s.1) {
        let _ = writeln!(out, "{id} 40 3 0 6 20 0");
    }
    out.push_str("\n[PIPES]\n;ID Node1 Node2 Length Diameter Roughness\n");
    for (id, a, bn, len, dia) in &b.pipes {
        let _ = writeln!(out, "{id} {a} {bn} {len} {dia} 100");
    }
    out.push_str("\n[COORDINATES]\n");
    for (id, x, y, _) in &b.junctions {
        let _ = writeln!(out, "{id} {x} {y}");
    }
    for (id, _, x, y) in &b.sources {
        let _ = writeln!(out, "{id} {x} {y}");
    }
    out.push_str("\n[END]\n");
    out
}
