//! Wireless feature datasets as CSV.
//!
//! Three files per run: transmissions, per-device energy and the hourly
//! battery trajectory. Each has a row type that can be read back; writing a
//! loaded file reproduces it byte for byte.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{Outcome, SimulationResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionRow {
    pub time_s: f64,
    pub device_id: String,
    pub channel_hz: f64,
    pub sf: u8,
    pub airtime_s: f64,
    pub best_gw: Option<usize>,
    pub best_rssi_dbm: f64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub device_id: String,
    pub sent: u64,
    pub delivered: u64,
    pub lost_no_coverage: u64,
    pub lost_collision: u64,
    pub energy_j: f64,
    pub battery_end_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryRow {
    pub time_s: f64,
    pub device_id: String,
    pub battery_j: f64,
}

pub const TRANSMISSION_HEADER: &str = "time_s,device_id,channel_hz,sf,airtime_s,best_gw,best_rssi_dbm,outcome";
pub const ENERGY_HEADER: &str = "device_id,sent,delivered,lost_no_coverage,lost_collision,energy_j,battery_end_j";
pub const BATTERY_HEADER: &str = "time_s,device_id,battery_j";

pub fn transmission_rows(result: &SimulationResult) -> Vec<TransmissionRow> {
    result
        .transmissions
        .iter()
        .map(|t| TransmissionRow {
            time_s: t.start_s,
            device_id: result.devices[t.device].id.clone(),
            channel_hz: t.channel_hz,
            sf: t.sf.value(),
            airtime_s: t.airtime_s,
            best_gw: t.best_gateway,
            best_rssi_dbm: t.best_rssi_dbm,
            outcome: t.outcome,
        })
        .collect()
}

pub fn energy_rows(result: &SimulationResult) -> Vec<EnergyRow> {
    result
        .devices
        .iter()
        .map(|d| EnergyRow {
            device_id: d.id.clone(),
            sent: d.sent,
            delivered: d.delivered,
            lost_no_coverage: d.lost_no_coverage,
            lost_collision: d.lost_collision,
            energy_j: d.energy_j,
            battery_end_j: d.battery_j,
        })
        .collect()
}

pub fn battery_rows(result: &SimulationResult) -> Vec<BatteryRow> {
    result
        .energy
        .battery
        .iter()
        .map(|b| BatteryRow {
            time_s: b.time_s,
            device_id: result.devices[b.device].id.clone(),
            battery_j: b.battery_j,
        })
        .collect()
}

/// Writes rows under `header`. The header is written even when `rows` is empty.
pub fn write_rows<T: Serialize, W: Write>(header: &str, rows: &[T], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<T: DeserializeOwned, R: Read>(input: R) -> Result<Vec<T>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}
