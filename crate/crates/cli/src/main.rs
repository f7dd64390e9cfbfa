use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wdn_lora::graph::{build_adjacency, degree_centrality, graph_stats, write_centrality_csv};
use wdn_lora::hydraulics::{flow_proxy, ingest_hydraulic_csv, placement_weights, write_weights_csv, ProxyDistance};
use wdn_lora::inp::parse_inp;
use wdn_lora::orchestrator::{
    kpi_search, prepare_network, run_scenario, KpiPredicate, PreparedNetwork, ScenarioConfig,
};
use wdn_lora::placement::{PlacementInput, PlacementRegistry};
use wdn_lora::{Error, Result};

/// LoRaWAN gateway placement and energy simulation over water networks.
#[derive(Debug, Parser)]
#[command(name = "wdn-lora", version)]
struct Cli {
    /// Scenario file (JSON). Supplies defaults to every subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; replaces the scenario's seed list.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for sweeps, or output file for single datasets.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an INP file and print a JSON summary.
    Parse { inp: PathBuf },
    /// Print graph statistics; optionally write degree centrality as CSV.
    Graph {
        inp: PathBuf,
        /// Centrality CSV destination; stdout when given without a path.
        #[arg(long, num_args = 0..=1, value_name = "PATH")]
        csv: Option<Option<PathBuf>>,
    },
    /// Compute placement weights from centrality and flow.
    Weights {
        inp: PathBuf,
        /// Hydraulic result files: node CSV then link CSV.
        #[arg(long, num_args = 2, value_names = ["NODES", "LINKS"])]
        hydraulic: Option<Vec<PathBuf>>,
        #[command(flatten)]
        weighting: Weighting,
    },
    /// Place K gateways and print them as CSV.
    Place {
        inp: PathBuf,
        #[arg(long)]
        k: usize,
        /// Registered strategy name or alias (grid, centrality, coverage).
        #[arg(long)]
        strategy: String,
        #[command(flatten)]
        weighting: Weighting,
        /// Move each gateway onto its nearest node.
        #[arg(long)]
        snap: bool,
    },
    /// Run one simulation and write its datasets, transmissions included.
    Simulate {
        /// Gateway count; defaults to the first in the scenario.
        #[arg(long)]
        k: Option<usize>,
        /// Strategy; defaults to the first in the scenario.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Run the full sweep and write the comparison tables.
    Sweep,
    /// Run the sweep and report the smallest K meeting a KPI predicate.
    Kpi {
        /// For example "pdr>=0.9" or "pdr>=0.95 && energy<2000".
        #[arg(long)]
        predicate: String,
    },
}

#[derive(Debug, Args)]
struct Weighting {
    /// Centrality share of the weight, in [0, 1].
    #[arg(long)]
    alpha: Option<f64>,
    /// Path metric for the flow proxy.
    #[arg(long, value_parser = parse_proxy)]
    proxy_distance: Option<ProxyDistance>,
}

fn parse_proxy(s: &str) -> std::result::Result<ProxyDistance, String> {
    match s {
        "hops" => Ok(ProxyDistance::Hops),
        "pipe_length" => Ok(ProxyDistance::PipeLength),
        _ => Err(format!("expected 'hops' or 'pipe_length', got '{s}'")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.category(), one_line(&e));
            ExitCode::from(1)
        }
    }
}

fn one_line(e: &Error) -> String {
    e.to_string().replace('\n', " ")
}

fn base_config(cli: &Cli) -> Result<ScenarioConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seeds = vec![seed];
    }
    Ok(cfg)
}

fn scenario(cli: &Cli) -> Result<ScenarioConfig> {
    if cli.config.is_none() {
        return Err(Error::Config("this subcommand needs --config".into()));
    }
    let mut cfg = base_config(cli)?;
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

/// Opens `--out` or falls back to stdout.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn finish(mut w: Box<dyn Write>) -> Result<()> {
    w.flush().map_err(|e| Error::io("<output>", e))
}

fn load_network(cfg: &ScenarioConfig, inp: &Path, weighting: &Weighting) -> Result<(ScenarioConfig, PreparedNetwork)> {
    let mut cfg = cfg.clone();
    cfg.alpha = weighting.alpha.unwrap_or(cfg.alpha);
    cfg.proxy_distance = weighting.proxy_distance.unwrap_or(cfg.proxy_distance);
    let bytes = std::fs::read(inp).map_err(|e| Error::io(inp, e))?;
    let net = parse_inp(&bytes)?;
    let prepared = prepare_network(&cfg, net, None)?;
    Ok((cfg, prepared))
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Parse { inp } => {
            let bytes = std::fs::read(inp).map_err(|e| Error::io(inp, e))?;
            let net = parse_inp(&bytes)?;
            let mut w = sink(cli.out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &net.summary())?;
            writeln!(w).map_err(|e| Error::io("<output>", e))?;
            finish(w)
        }
        Command::Graph { inp, csv } => {
            let bytes = std::fs::read(inp).map_err(|e| Error::io(inp, e))?;
            let net = parse_inp(&bytes)?;
            let adj = build_adjacency(&net)?;
            let cv = degree_centrality(&adj);
            match csv {
                Some(path) => {
                    let mut w = sink(path.as_deref().or(cli.out.as_deref()))?;
                    write_centrality_csv(&adj, &cv, &mut w)?;
                    finish(w)
                }
                None => {
                    let mut w = sink(cli.out.as_deref())?;
                    serde_json::to_writer_pretty(&mut w, &graph_stats(&adj))?;
                    writeln!(w).map_err(|e| Error::io("<output>", e))?;
                    finish(w)
                }
            }
        }
        Command::Weights { inp, hydraulic, weighting } => {
            let mut cfg = base_config(&cli)?;
            cfg.alpha = weighting.alpha.unwrap_or(cfg.alpha);
            cfg.proxy_distance = weighting.proxy_distance.unwrap_or(cfg.proxy_distance);
            let bytes = std::fs::read(inp).map_err(|e| Error::io(inp, e))?;
            let net = parse_inp(&bytes)?;
            let adj = build_adjacency(&net)?;
            let mut cv = degree_centrality(&adj);
            let flows = match hydraulic.as_deref() {
                Some([nodes, links]) => {
                    let n = File::open(nodes).map_err(|e| Error::io(nodes, e))?;
                    let l = File::open(links).map_err(|e| Error::io(links, e))?;
                    ingest_hydraulic_csv(n, l, &net)?.node_flow(cfg.flow_measure)
                }
                _ => flow_proxy(&net, &adj, cfg.proxy_distance)?.flow,
            };
            let fw = placement_weights(&mut cv, &flows, cfg.alpha)?;
            let mut w = sink(cli.out.as_deref())?;
            write_weights_csv(&adj, &cv, &flows, &fw, &mut w)?;
            finish(w)
        }
        Command::Place { inp, k, strategy, weighting, snap } => {
            let cfg = base_config(&cli)?;
            let (cfg, prepared) = load_network(&cfg, inp, weighting)?;
            let registry = PlacementRegistry::builtin(&cfg.placement);
            let positions = prepared.positions();
            let input = PlacementInput::new(&positions, &prepared.centrality.weight)?;
            let seed = cfg.seeds.first().copied().unwrap_or(0);
            let mut set = registry.get(strategy)?.place(&input, *k, seed)?;
            set.provenance.alpha = Some(cfg.alpha);
            if *snap || cfg.snap_to_node {
                set.snap_to_nodes(&positions);
            }
            let mut w = sink(cli.out.as_deref())?;
            set.write_csv(&mut w)?;
            finish(w)
        }
        Command::Simulate { k, strategy } => {
            let mut cfg = scenario(&cli)?;
            cfg.gateway_counts = vec![k.or(cfg.gateway_counts.first().copied()).unwrap_or(1)];
            if let Some(s) = strategy.clone().or_else(|| cfg.strategies.first().cloned()) {
                cfg.strategies = vec![s];
            }
            cfg.seeds.truncate(1);
            cfg.export.transmissions = true;
            let report = run_scenario(&cfg)?;
            let mut w = sink(None)?;
            for run in &report.runs {
                serde_json::to_writer_pretty(&mut w, run)?;
                writeln!(w).map_err(|e| Error::io("<stdout>", e))?;
            }
            finish(w)
        }
        Command::Sweep => {
            let cfg = scenario(&cli)?;
            let report = run_scenario(&cfg)?;
            let mut w = sink(None)?;
            w.write_all(report.table.pivot_text().as_bytes()).map_err(|e| Error::io("<stdout>", e))?;
            writeln!(w, "outputs: {}", report.output_dir.display()).map_err(|e| Error::io("<stdout>", e))?;
            finish(w)
        }
        Command::Kpi { predicate } => {
            let predicate: KpiPredicate = predicate.parse()?;
            let cfg = scenario(&cli)?;
            let report = run_scenario(&cfg)?;
            let mut w = sink(None)?;
            for outcome in kpi_search(&report.table, &predicate)? {
                writeln!(w, "{}", outcome.describe()).map_err(|e| Error::io("<stdout>", e))?;
            }
            finish(w)
        }
    }
}
