use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::hydraulics::{NodeFlowMeasure, ProxyDistance};
use crate::placement::PlacementOptions;
use crate::radio::traffic::TrafficConfig;
use crate::radio::{EnergyModel, PathLossModel, RadioConfig, SfPolicy, SimConfig};
use crate::{Error, Result};

/// Paths of hydraulic result files produced by an external solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydraulicInputs {
    pub nodes: PathBuf,
    pub links: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportOptions {
    /// Per-packet transmission logs; large for big networks.
    pub transmissions: bool,
    pub battery: bool,
    pub energy: bool,
    pub gateways: bool,
}

impl Default for ExportOptions {
    fn default() -> Self {
        ExportOptions { transmissions: false, battery: true, energy: true, gateways: true }
    }
}

/// A scenario file. Every field has a default; relative paths are resolved
/// against the directory of the file they were loaded from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub inp: PathBuf,
    /// Without hydraulic results, a demand-routing proxy stands in for flow.
    pub hydraulic: Option<HydraulicInputs>,
    pub flow_measure: NodeFlowMeasure,
    pub proxy_distance: ProxyDistance,
    /// Centrality share of the placement weight.
    pub alpha: f64,
    pub coordinate_scale: f64,
    pub radio: RadioConfig,
    pub energy: EnergyModel,
    pub propagation: PathLossModel,
    pub traffic: TrafficConfig,
    pub sf_policy: SfPolicy,
    pub horizon_s: f64,
    pub battery_sample_s: f64,
    pub gateway_counts: Vec<usize>,
    pub strategies: Vec<String>,
    pub seeds: Vec<u64>,
    pub placement: PlacementOptions,
    pub snap_to_node: bool,
    pub out_dir: PathBuf,
    pub export: ExportOptions,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let sim = SimConfig::default();
        ScenarioConfig {
            name: "scenario".into(),
            inp: PathBuf::new(),
            hydraulic: None,
            flow_measure: NodeFlowMeasure::default(),
            proxy_distance: ProxyDistance::default(),
            alpha: 0.5,
            coordinate_scale: 1.0,
            radio: sim.radio,
            energy: sim.energy,
            propagation: sim.propagation,
            traffic: TrafficConfig::default(),
            sf_policy: sim.sf_policy,
            horizon_s: sim.horizon_s,
            battery_sample_s: sim.battery_sample_s,
            gateway_counts: vec![77, 96, 117, 140, 165],
            strategies: vec!["regular_grid".into(), "degree_centrality".into()],
            seeds: vec![1],
            placement: PlacementOptions::default(),
            snap_to_node: false,
            out_dir: PathBuf::from("out"),
            export: ExportOptions::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a scenario file and resolves its relative paths.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.inp);
        fix(&mut self.out_dir);
        if let Some(h) = &mut self.hydraulic {
            fix(&mut h.nodes);
            fix(&mut h.links);
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            radio: self.radio.clone(),
            energy: self.energy.clone(),
            propagation: self.propagation.clone(),
            sf_policy: self.sf_policy,
            horizon_s: self.horizon_s,
            battery_sample_s: self.battery_sample_s,
            keep_transmissions: self.export.transmissions,
        }
    }

    /// Output directory of this scenario, `<out_dir>/<name>`.
    pub fn output_dir(&self) -> PathBuf {
        self.out_dir.join(&self.name)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.name.is_empty() || self.name.contains(['/', '\\']) || self.name == "." || self.name == ".." {
            return bad(format!("scenario name '{}' is not a plain directory name", self.name));
        }
        if self.inp.as_os_str().is_empty() {
            return bad("no INP file given".into());
        }
        if self.gateway_counts.is_empty() {
            return bad("gateway_counts is empty".into());
        }
        if self.gateway_counts[0] == 0 {
            return bad("gateway counts must be positive".into());
        }
        if self.gateway_counts.windows(2).any(|w| w[0] >= w[1]) {
            return bad("gateway counts must be strictly increasing".into());
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.strategies.is_empty() {
            return bad("at least one strategy is required".into());
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha {} outside [0, 1]", self.alpha));
        }
        if !(self.coordinate_scale > 0.0 && self.coordinate_scale.is_finite()) {
            return bad("coordinate_scale must be positive".into());
        }
        self.sim_config().validate()?;
        Ok(())
    }
}
