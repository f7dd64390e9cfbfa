use thiserror::Error;

use crate::graph::GraphError;
use crate::hydraulics::HydraulicError;
use crate::inp::InpError;
use crate::placement::PlacementError;
use crate::radio::RadioError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Inp(#[from] InpError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hydraulic(#[from] HydraulicError),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error("empty sweep: {0}")]
    EmptySweep(String),
    #[error("invalid KPI predicate '{0}'")]
    Predicate(String),
    #[error("k={k} strategy={strategy} seed={seed}: {source}")]
    Run {
        k: usize,
        strategy: String,
        seed: u64,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }

    /// Stable, machine-readable error class such as `inp.dangling_endpoint`.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Inp(e) => match e {
                InpError::UndecodableText(_) => "inp.undecodable_text",
                InpError::RowOutsideSection(_) => "inp.row_outside_section",
                InpError::DuplicateId { .. } => "inp.duplicate_id",
                InpError::DanglingEndpoint { .. } => "inp.dangling_endpoint",
                InpError::MissingCoordinates(_) => "inp.missing_coordinates",
                InpError::SelfLoop(_) => "inp.self_loop",
                InpError::MalformedRow { .. } => "inp.malformed_row",
                InpError::MissingSection(_) => "inp.missing_section",
            },
            Error::Graph(e) => match e {
                GraphError::TooFewNodes(_) => "graph.too_few_nodes",
                GraphError::InvalidEdge(..) => "graph.invalid_edge",
            },
            Error::Hydraulic(e) => match e {
                HydraulicError::UnknownId { .. } => "hydraulic.unknown_id",
                HydraulicError::NonMonotoneTimestamps { .. } => "hydraulic.non_monotone_timestamps",
                HydraulicError::SchemaMismatch { .. } => "hydraulic.schema_mismatch",
                HydraulicError::NoSource => "hydraulic.no_source",
                HydraulicError::InvalidInput(_) => "hydraulic.invalid_input",
                HydraulicError::Csv(_) => "hydraulic.csv",
            },
            Error::Placement(e) => match e {
                PlacementError::InvalidK(_) => "placement.invalid_k",
                PlacementError::KExceedsN { .. } => "placement.k_exceeds_n",
                PlacementError::AllZeroWeights => "placement.all_zero_weights",
                PlacementError::DegenerateBBox => "placement.degenerate_bbox",
                PlacementError::InvalidInput(_) => "placement.invalid_input",
                PlacementError::UnknownStrategy(_) => "placement.unknown_strategy",
            },
            Error::Radio(e) => match e {
                RadioError::InvalidSf(_) => "radio.invalid_sf",
                RadioError::InvalidConfig(_) => "radio.invalid_config",
                RadioError::NoDevices => "radio.no_devices",
                RadioError::NoGateways => "radio.no_gateways",
                RadioError::UnknownTraffic(_) => "radio.unknown_traffic",
            },
            Error::Config(_) => "config.invalid",
            Error::EmptySweep(_) => "kpi.empty_sweep",
            Error::Predicate(_) => "kpi.predicate",
            Error::Run { source, .. } => source.category(),
            Error::Io { .. } => "io",
            Error::Csv(_) => "io.csv",
            Error::Json(_) => "config.json",
        }
    }
}
