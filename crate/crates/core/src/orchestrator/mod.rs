//! Scenario sweeps: parse, weight, place, simulate and tabulate.
//!
//! A [`ScenarioConfig`] names an INP file, gateway counts, strategies and
//! seeds. [`run_scenario`] runs every (K, strategy, seed) combination and
//! writes all datasets under `<out_dir>/<name>/`:
//!
//! - `network.json`, `centrality.csv`, `weights.csv`
//! - `runs/k<K>_<strategy>_s<seed>/` with `gateways.csv`, `energy.csv`,
//!   `battery.csv` and optionally `transmissions.csv`
//! - `runs.csv`, one line per simulation
//! - `comparison.csv` and the pivoted `comparison.txt`
//!
//! Runs are independent and execute in parallel. Results are merged in
//! job order, so the files do not depend on scheduling.

mod config;
mod kpi;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use config::{ExportOptions, HydraulicInputs, ScenarioConfig};
pub use kpi::{kpi_search, Clause, Cmp, KpiOutcome, KpiPredicate, Metric};
pub use table::{ComparisonRow, ComparisonTable, RunSummary, COMPARISON_HEADER, RUNS_HEADER};

use crate::graph::{build_adjacency, degree_centrality, write_centrality_csv, Adjacency, CentralityVector};
use crate::hydraulics::{flow_proxy, ingest_hydraulic_csv, placement_weights, write_weights_csv, FlowWeight, HydraulicSeries};
use crate::inp::{parse_inp, WaterNetwork};
use crate::placement::{GatewaySet, PlacementInput, PlacementRegistry};
use crate::radio::export::{self, BATTERY_HEADER, ENERGY_HEADER, TRANSMISSION_HEADER};
use crate::radio::traffic::{TrafficModel, TrafficRegistry};
use crate::radio::{simulate, Device, SimConfig, SimulationResult};
use crate::{Error, Result};

/// Network-level inputs shared by every run of a scenario.
#[derive(Debug, Clone)]
pub struct PreparedNetwork {
    pub net: WaterNetwork,
    pub adjacency: Adjacency,
    /// Degree centrality with the blended placement weight filled in.
    pub centrality: CentralityVector,
    pub flows: Vec<f64>,
    pub flow_weight: FlowWeight,
    /// One end device per network node.
    pub devices: Vec<Device>,
}

impl PreparedNetwork {
    pub fn positions(&self) -> Vec<(f64, f64)> {
        self.devices.iter().map(|d| d.position).collect()
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Loads the INP (and hydraulic results, if configured) named by `cfg`.
pub fn prepare(cfg: &ScenarioConfig) -> Result<PreparedNetwork> {
    let net = parse_inp(&read(&cfg.inp)?)?;
    let hydraulic = match &cfg.hydraulic {
        Some(h) => Some(ingest_hydraulic_csv(read(&h.nodes)?.as_slice(), read(&h.links)?.as_slice(), &net)?),
        None => None,
    };
    prepare_network(cfg, net, hydraulic.as_ref())
}

pub fn prepare_network(
    cfg: &ScenarioConfig,
    mut net: WaterNetwork,
    hydraulic: Option<&HydraulicSeries>,
) -> Result<PreparedNetwork> {
    for w in &net.warnings {
        log::warn!("{w}");
    }
    if cfg.coordinate_scale != 1.0 {
        net.scale_coordinates(cfg.coordinate_scale);
    }
    let adjacency = build_adjacency(&net)?;
    let mut centrality = degree_centrality(&adjacency);
    let flows = match hydraulic {
        Some(series) => series.node_flow(cfg.flow_measure),
        None => {
            let proxy = flow_proxy(&net, &adjacency, cfg.proxy_distance)?;
            if !proxy.unreachable.is_empty() {
                log::warn!("{} demand nodes cannot reach a source", proxy.unreachable.len());
            }
            proxy.flow
        }
    };
    let flow_weight = placement_weights(&mut centrality, &flows, cfg.alpha)?;
    let devices = net
        .nodes
        .iter()
        .map(|n| Device { id: n.id.clone(), position: n.position })
        .collect();
    Ok(PreparedNetwork { net, adjacency, centrality, flows, flow_weight, devices })
}

/// One cell of the sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunKey {
    pub k: usize,
    pub strategy: String,
    pub seed: u64,
}

impl RunKey {
    pub fn dir_name(&self) -> String {
        format!("k{}_{}_s{}", self.k, self.strategy, self.seed)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub gateways: GatewaySet,
    pub result: SimulationResult,
    pub summary: RunSummary,
}

/// Strategy and traffic lookups resolved once per scenario.
pub struct Runner<'a> {
    cfg: &'a ScenarioConfig,
    prepared: &'a PreparedNetwork,
    sim: SimConfig,
    placements: PlacementRegistry,
    traffic: Box<dyn TrafficModel>,
}

impl<'a> Runner<'a> {
    pub fn new(cfg: &'a ScenarioConfig, prepared: &'a PreparedNetwork) -> Result<Self> {
        let placements = PlacementRegistry::builtin(&cfg.placement);
        for s in &cfg.strategies {
            placements.get(s)?;
        }
        let traffic = TrafficRegistry::builtin().create(&cfg.traffic)?;
        let sim = cfg.sim_config();
        sim.validate()?;
        Ok(Runner { cfg, prepared, sim, placements, traffic })
    }

    /// All (K, strategy, seed) combinations, K outermost.
    pub fn keys(&self) -> Vec<RunKey> {
        let mut keys = Vec::new();
        for &k in &self.cfg.gateway_counts {
            for strategy in &self.cfg.strategies {
                for &seed in &self.cfg.seeds {
                    keys.push(RunKey { k, strategy: strategy.clone(), seed });
                }
            }
        }
        keys
    }

    pub fn run(&self, key: &RunKey) -> Result<RunOutput> {
        self.run_inner(key).map_err(|e| Error::Run {
            k: key.k,
            strategy: key.strategy.clone(),
            seed: key.seed,
            source: Box::new(e),
        })
    }

    fn run_inner(&self, key: &RunKey) -> Result<RunOutput> {
        let positions = self.prepared.positions();
        let input = PlacementInput::new(&positions, &self.prepared.centrality.weight)?;
        let strategy = self.placements.get(&key.strategy)?;
        let mut gateways = strategy.place(&input, key.k, key.seed)?;
        gateways.provenance.alpha = Some(self.cfg.alpha);
        if self.cfg.snap_to_node {
            gateways.snap_to_nodes(&positions);
        }
        let result = simulate(&self.prepared.devices, &gateways.positions, &self.sim, self.traffic.as_ref(), key.seed)?;
        let f = &result.features;
        let summary = RunSummary {
            k: key.k,
            strategy: strategy.name().to_owned(),
            seed: key.seed,
            energy_j: result.energy.total_j,
            sent: f.sent,
            delivered: f.delivered,
            lost_no_coverage: f.lost_no_coverage,
            lost_collision: f.lost_collision,
            pdr: f.pdr,
            mean_sf: f.mean_sf,
            marginal_devices: f.marginal_devices,
        };
        log::info!(
            "k={} {} seed={}: {:.2} J, pdr {:.4}, mean SF {:.3}",
            summary.k,
            summary.strategy,
            summary.seed,
            summary.energy_j,
            summary.pdr,
            summary.mean_sf
        );
        Ok(RunOutput { gateways, result, summary })
    }

    /// Runs every key in parallel, optionally writing per-run datasets
    /// under `runs_dir`. Summaries come back in key order; the first failing
    /// key (in that order) determines the error.
    pub fn run_all(&self, keys: &[RunKey], runs_dir: Option<&Path>) -> Result<Vec<RunSummary>> {
        let results: Vec<Result<RunSummary>> = keys
            .par_iter()
            .map(|key| {
                let out = self.run(key)?;
                if let Some(dir) = runs_dir {
                    write_run(&dir.join(key.dir_name()), &out, &self.cfg.export)?;
                }
                Ok(out.summary)
            })
            .collect();
        results.into_iter().collect()
    }
}

/// Runs the whole sweep in memory without writing anything.
pub fn sweep(cfg: &ScenarioConfig, prepared: &PreparedNetwork) -> Result<Vec<RunSummary>> {
    let runner = Runner::new(cfg, prepared)?;
    runner.run_all(&runner.keys(), None)
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub output_dir: PathBuf,
    pub runs: Vec<RunSummary>,
    pub table: ComparisonTable,
}

/// Loads, sweeps and writes every dataset of a scenario.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    let prepared = prepare(cfg)?;
    run_prepared(cfg, &prepared)
}

/// As [`run_scenario`], for a network that is already loaded.
pub fn run_prepared(cfg: &ScenarioConfig, prepared: &PreparedNetwork) -> Result<ScenarioReport> {
    cfg.validate()?;
    let runner = Runner::new(cfg, prepared)?;
    let dir = cfg.output_dir();
    create_dir(&dir)?;
    write_network(&dir, prepared)?;

    let runs = runner.run_all(&runner.keys(), Some(&dir.join("runs")))?;
    let table = ComparisonTable::from_runs(&runs);

    write_file(&dir.join("runs.csv"), |w| Ok(export::write_rows(RUNS_HEADER, &runs, w)?))?;
    write_file(&dir.join("comparison.csv"), |w| Ok(table.write_csv(w)?))?;
    write_file(&dir.join("comparison.txt"), |w| {
        w.write_all(table.pivot_text().as_bytes()).map_err(|e| Error::io("comparison.txt", e))
    })?;
    Ok(ScenarioReport { output_dir: dir, runs, table })
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_network(dir: &Path, p: &PreparedNetwork) -> Result<()> {
    write_file(&dir.join("network.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &p.net.summary())?;
        w.write_all(b"\n").map_err(|e| Error::io("network.json", e))
    })?;
    write_file(&dir.join("centrality.csv"), |w| Ok(write_centrality_csv(&p.adjacency, &p.centrality, w)?))?;
    write_file(&dir.join("weights.csv"), |w| {
        Ok(write_weights_csv(&p.adjacency, &p.centrality, &p.flows, &p.flow_weight, w)?)
    })
}

/// Writes the datasets of a single run into `dir`.
pub fn write_run(dir: &Path, out: &RunOutput, opts: &ExportOptions) -> Result<()> {
    create_dir(dir)?;
    if opts.gateways {
        write_file(&dir.join("gateways.csv"), |w| Ok(out.gateways.write_csv(w)?))?;
    }
    if opts.energy {
        let rows = export::energy_rows(&out.result);
        write_file(&dir.join("energy.csv"), |w| Ok(export::write_rows(ENERGY_HEADER, &rows, w)?))?;
    }
    if opts.battery {
        let rows = export::battery_rows(&out.result);
        write_file(&dir.join("battery.csv"), |w| Ok(export::write_rows(BATTERY_HEADER, &rows, w)?))?;
    }
    if opts.transmissions {
        let rows = export::transmission_rows(&out.result);
        write_file(&dir.join("transmissions.csv"), |w| Ok(export::write_rows(TRANSMISSION_HEADER, &rows, w)?))?;
    }
    Ok(())
}
