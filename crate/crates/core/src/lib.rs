//! Co-simulation of LoRaWAN telemetry over water distribution networks.
//!
//! The pipeline reads an EPANET INP file ([`inp`]), derives the undirected
//! topology and degree centrality ([`graph`]), blends centrality with
//! hydraulic flow into node weights ([`hydraulics`]), places gateways with a
//! named strategy ([`placement`]) and runs a seeded discrete-event uplink
//! simulation ([`radio`]). [`orchestrator`] sweeps gateway counts, strategies
//! and seeds and writes comparison tables.

pub mod error;
pub mod graph;
pub mod hydraulics;
pub mod inp;
pub mod orchestrator;
pub mod placement;
pub mod radio;
pub mod rng;
pub mod synthetic;

pub use error::{Error, Result};
