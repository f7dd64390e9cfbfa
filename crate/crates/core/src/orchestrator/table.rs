use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

/// Totals of one (K, strategy, seed) simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub k: usize,
    pub strategy: String,
    pub seed: u64,
    pub energy_j: f64,
    pub sent: u64,
    pub delivered: u64,
    pub lost_no_coverage: u64,
    pub lost_collision: u64,
    pub pdr: f64,
    pub mean_sf: f64,
    pub marginal_devices: usize,
}

pub const RUNS_HEADER: &str =
    "k,strategy,seed,energy_j,sent,delivered,lost_no_coverage,lost_collision,pdr,mean_sf,marginal_devices";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub k: usize,
    pub strategy: String,
    pub energy_j_mean: f64,
    /// Sample standard deviation over seeds; 0 for a single seed.
    pub energy_j_std: f64,
    pub pdr: f64,
    pub mean_sf: f64,
}

pub const COMPARISON_HEADER: &str = "k,strategy,energy_j_mean,energy_j_std,pdr,mean_sf";

/// Per-(K, strategy) means over seeds, ordered by K then strategy name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_std(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

impl ComparisonTable {
    pub fn from_runs(runs: &[RunSummary]) -> Self {
        let mut groups: BTreeMap<(usize, &str), Vec<&RunSummary>> = BTreeMap::new();
        for r in runs {
            groups.entry((r.k, r.strategy.as_str())).or_default().push(r);
        }
        let rows = groups
            .into_iter()
            .map(|((k, strategy), group)| {
                let pick = |f: fn(&RunSummary) -> f64| group.iter().map(|r| f(r)).collect::<Vec<_>>();
                let energy = pick(|r| r.energy_j);
                ComparisonRow {
                    k,
                    strategy: strategy.to_owned(),
                    energy_j_mean: mean(&energy),
                    energy_j_std: sample_std(&energy),
                    pdr: mean(&pick(|r| r.pdr)),
                    mean_sf: mean(&pick(|r| r.mean_sf)),
                }
            })
            .collect();
        ComparisonTable { rows }
    }

    pub fn row(&self, k: usize, strategy: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.k == k && r.strategy == strategy)
    }

    /// Distinct gateway counts, ascending.
    pub fn ks(&self) -> Vec<usize> {
        let mut ks: Vec<usize> = self.rows.iter().map(|r| r.k).collect();
        ks.dedup();
        ks
    }

    /// Distinct strategies, by name.
    pub fn strategies(&self) -> Vec<&str> {
        let mut s: Vec<&str> = self.rows.iter().map(|r| r.strategy.as_str()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        crate::radio::export::write_rows(COMPARISON_HEADER, &self.rows, out)
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self, csv::Error> {
        Ok(ComparisonTable { rows: crate::radio::export::read_rows(input)? })
    }

    /// Mean daily energy with one line per K and one column per strategy.
    /// With both built-in strategies present a last column gives the
    /// reduction of the centrality layout relative to the grid.
    pub fn pivot_text(&self) -> String {
        let strategies = self.strategies();
        let paired = strategies.contains(&"regular_grid") && strategies.contains(&"degree_centrality");
        let width = strategies.iter().map(|s| s.len()).max().unwrap_or(0).max(18);
        let mut out = String::new();
        let _ = write!(out, "{:>6}", "K");
        for s in &strategies {
            let _ = write!(out, "  {s:>width$}");
        }
        if paired {
            let _ = write!(out, "  {:>9}", "reduction");
        }
        out.push('\n');
        for k in self.ks() {
            let _ = write!(out, "{k:>6}");
            for s in &strategies {
                match self.row(k, s) {
                    Some(r) => {
                        let _ = write!(out, "  {:>width$}", format!("{:.2} ± {:.2}", r.energy_j_mean, r.energy_j_std));
                    }
                    None => {
                        let _ = write!(out, "  {:>width$}", "-");
                    }
                }
            }
            if paired {
                if let (Some(g), Some(c)) = (self.row(k, "regular_grid"), self.row(k, "degree_centrality")) {
                    let _ = write!(out, "  {:>8.1}%", 100.0 * (g.energy_j_mean - c.energy_j_mean) / g.energy_j_mean);
                }
            }
            out.push('\n');
        }
        out
    }
}
