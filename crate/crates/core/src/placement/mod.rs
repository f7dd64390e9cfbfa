//! Gateway placement strategies.
//!
//! Every strategy implements [`PlacementStrategy`] and is registered by name
//! in a [`PlacementRegistry`]; scenarios and the CLI select strategies by
//! that name at runtime.

mod coverage;
mod grid;
mod kmeans;

use std::io::Write;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inp::BoundingBox;

pub use coverage::MaxCoverage;
pub use grid::{grid_dims, RegularGrid};
pub use kmeans::{weighted_kmeans, DegreeCentrality, KMeansOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlacementError {
    #[error("gateway count must be at least 1, got {0}")]
    InvalidK(usize),
    #[error("cannot place {k} gateways on {n} nodes")]
    KExceedsN { k: usize, n: usize },
    #[error("all placement weights are zero")]
    AllZeroWeights,
    #[error("bounding box has zero width and height")]
    DegenerateBBox,
    #[error("invalid placement input: {0}")]
    InvalidInput(String),
    #[error("unknown placement strategy '{0}'")]
    UnknownStrategy(String),
}

/// Node geometry and importance handed to a strategy.
#[derive(Debug, Clone, Copy)]
pub struct PlacementInput<'a> {
    pub positions: &'a [(f64, f64)],
    pub weights: &'a [f64],
    pub bbox: BoundingBox,
}

impl<'a> PlacementInput<'a> {
    pub fn new(positions: &'a [(f64, f64)], weights: &'a [f64]) -> Result<Self, PlacementError> {
        if positions.len() != weights.len() {
            return Err(PlacementError::InvalidInput(format!(
                "{} positions but {} weights",
                positions.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(PlacementError::InvalidInput("weights must be finite and non-negative".into()));
        }
        let bbox = BoundingBox::from_points(positions.iter().copied())
            .ok_or_else(|| PlacementError::InvalidInput("no nodes".into()))?;
        Ok(PlacementInput { positions, weights, bbox })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub alpha: Option<f64>,
    /// Rows × columns for grid layouts.
    pub grid: Option<(usize, usize)>,
    pub iterations: Option<usize>,
    /// Weighted objective after each iteration, for iterative strategies.
    pub objective_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GatewaySet {
    pub strategy: String,
    pub k: usize,
    pub positions: Vec<(f64, f64)>,
    pub provenance: Provenance,
}

impl GatewaySet {
    /// CSV with header `gw_id,x,y,strategy,k,seed`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["gw_id", "x", "y", "strategy", "k", "seed"])?;
        let (k, seed) = (self.k.to_string(), self.provenance.seed.to_string());
        for (i, (x, y)) in self.positions.iter().enumerate() {
            w.write_record([i.to_string(), x.to_string(), y.to_string(), self.strategy.clone(), k.clone(), seed.clone()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Moves every gateway onto its nearest node (lowest index on ties).
    pub fn snap_to_nodes(&mut self, nodes: &[(f64, f64)]) {
        for p in &mut self.positions {
            if let Some(&best) = nodes
                .iter()
                .min_by(|a, b| dist2(**a, *p).total_cmp(&dist2(**b, *p)))
            {
                *p = best;
            }
        }
    }
}

pub trait PlacementStrategy: Send + Sync {
    /// Canonical registry name; also written into [`GatewaySet::strategy`].
    fn name(&self) -> &'static str;

    fn place(&self, input: &PlacementInput<'_>, k: usize, seed: u64) -> Result<GatewaySet, PlacementError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlacementOptions {
    /// Radius used by the max-coverage strategy.
    pub coverage_radius_m: f64,
    pub max_iterations: usize,
    /// Convergence threshold as a fraction of the bounding-box diagonal.
    pub tolerance: f64,
}

impl Default for PlacementOptions {
    fn default() -> Self {
        PlacementOptions { coverage_radius_m: 1000.0, max_iterations: 100, tolerance: 1e-6 }
    }
}

pub struct PlacementRegistry {
    strategies: IndexMap<&'static str, Box<dyn PlacementStrategy>>,
    aliases: IndexMap<&'static str, &'static str>,
}

impl PlacementRegistry {
    pub fn empty() -> Self {
        PlacementRegistry { strategies: IndexMap::new(), aliases: IndexMap::new() }
    }

    pub fn builtin(opts: &PlacementOptions) -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(RegularGrid));
        reg.register(Box::new(DegreeCentrality { max_iterations: opts.max_iterations, tolerance: opts.tolerance }));
        reg.register(Box::new(MaxCoverage { radius_m: opts.coverage_radius_m }));
        reg.alias("grid", "regular_grid");
        reg.alias("centrality", "degree_centrality");
        reg.alias("coverage", "max_coverage");
        reg
    }

    pub fn register(&mut self, strategy: Box<dyn PlacementStrategy>) {
        self.strategies.insert(strategy.name(), strategy);
    }

    pub fn alias(&mut self, alias: &'static str, target: &'static str) {
        self.aliases.insert(alias, target);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.strategies.keys().copied()
    }

    /// Looks a strategy up by canonical name or alias.
    pub fn get(&self, name: &str) -> Result<&dyn PlacementStrategy, PlacementError> {
        let canonical = self.aliases.get(name).copied().unwrap_or(name);
        self.strategies
            .get(canonical)
            .map(|s| s.as_ref())
            .ok_or_else(|| PlacementError::UnknownStrategy(name.to_owned()))
    }
}

pub(crate) fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    dx * dx + dy * dy
}

/// Σ w_i · d(i, nearest center)².
pub fn weighted_objective(positions: &[(f64, f64)], weights: &[f64], centers: &[(f64, f64)]) -> f64 {
    positions
        .iter()
        .zip(weights)
        .map(|(&p, &w)| w * centers.iter().map(|&c| dist2(p, c)).fold(f64::INFINITY, f64::min))
        .sum()
}

fn check_k(k: usize, n: usize) -> Result<(), PlacementError> {
    if k == 0 {
        return Err(PlacementError::InvalidK(k));
    }
    if k > n {
        return Err(PlacementError::KExceedsN { k, n });
    }
    Ok(())
}

/// Picks the node maximising `w_i · d²(i, nearest center)`, ties to the lower
/// index. Falls back to plain farthest distance, then to the first node that
/// is not already a center, so repeated calls always return a fresh site
/// while one exists.
pub(crate) fn farthest_weighted(
    positions: &[(f64, f64)],
    weights: &[f64],
    nearest_d2: &[f64],
    taken: &[bool],
) -> usize {
    let argmax = |score: &dyn Fn(usize) -> f64| {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..positions.len() {
            let s = score(i);
            if s > 0.0 && best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        best.map(|(i, _)| i)
    };
    argmax(&|i| weights[i] * nearest_d2[i])
        .or_else(|| argmax(&|i| nearest_d2[i]))
        .or_else(|| taken.iter().position(|t| !t))
        .unwrap_or(0)
}
