//! LoRaWAN uplink model: time on air, propagation, ADR, traffic and the
//! discrete-event simulator that turns a gateway layout into delivery and
//! energy figures.

mod adr;
mod airtime;
pub mod export;
mod propagation;
mod sim;
pub mod traffic;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use adr::{adr_assign, adr_for_link, AdrDecision};
pub use airtime::airtime;
pub use propagation::{rssi, LinkTable, PathLossModel};
pub use sim::{
    simulate, BatterySample, Device, DeviceReport, EndDeviceState, EnergyReport, Outcome, ReceivedCopy, SfPolicy,
    SimConfig, SimulationResult, TransmissionRecord, WirelessFeatures,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadioError {
    #[error("spreading factor {0} outside 7..=12")]
    InvalidSf(u8),
    #[error("invalid radio configuration: {0}")]
    InvalidConfig(String),
    #[error("simulation has no end devices")]
    NoDevices,
    #[error("simulation has no gateways")]
    NoGateways,
    #[error("unknown traffic model '{0}'")]
    UnknownTraffic(String),
}

/// LoRa spreading factor, 7 through 12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct SpreadingFactor(u8);

impl SpreadingFactor {
    pub const MIN: SpreadingFactor = SpreadingFactor(7);
    pub const MAX: SpreadingFactor = SpreadingFactor(12);

    pub fn new(sf: u8) -> Result<Self, RadioError> {
        if (7..=12).contains(&sf) {
            Ok(SpreadingFactor(sf))
        } else {
            Err(RadioError::InvalidSf(sf))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Position in per-SF tables (SF7 → 0).
    pub fn index(self) -> usize {
        (self.0 - 7) as usize
    }

    pub fn all() -> impl DoubleEndedIterator<Item = SpreadingFactor> {
        (7..=12).map(SpreadingFactor)
    }
}

impl TryFrom<u8> for SpreadingFactor {
    type Error = RadioError;

    fn try_from(v: u8) -> Result<Self, RadioError> {
        SpreadingFactor::new(v)
    }
}

impl From<SpreadingFactor> for u8 {
    fn from(sf: SpreadingFactor) -> u8 {
        sf.0
    }
}

impl fmt::Display for SpreadingFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SF{}", self.0)
    }
}

/// Per-SF table indexed SF7..SF12.
pub type PerSf<T> = [T; 6];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub bandwidth_hz: f64,
    /// Coding rate 4/(4+n), n in 1..=4.
    pub coding_rate: u8,
    pub preamble_symbols: u32,
    pub explicit_header: bool,
    pub payload_bytes: u32,
    pub tx_power_dbm: f64,
    pub channels_hz: Vec<f64>,
    /// Fraction of time a device may be on air.
    pub duty_cycle: f64,
    pub sensitivity_dbm: PerSf<f64>,
    pub required_snr_db: PerSf<f64>,
    pub adr_margin_db: f64,
    /// Power advantage needed to survive a same-SF, same-channel overlap.
    pub capture_threshold_db: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            bandwidth_hz: 125_000.0,
            coding_rate: 1,
            preamble_symbols: 8,
            explicit_header: true,
            payload_bytes: 20,
            tx_power_dbm: 14.0,
            channels_hz: vec![868_100_000.0, 868_300_000.0, 868_500_000.0],
            duty_cycle: 0.01,
            sensitivity_dbm: [-123.0, -126.0, -129.0, -132.0, -134.5, -137.0],
            required_snr_db: [-7.5, -10.0, -12.5, -15.0, -17.5, -20.0],
            adr_margin_db: 10.0,
            capture_threshold_db: 6.0,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<(), RadioError> {
        let bad = |m: &str| Err(RadioError::InvalidConfig(m.to_owned()));
        if !(self.bandwidth_hz > 0.0) {
            return bad("bandwidth must be positive");
        }
        if !(1..=4).contains(&self.coding_rate) {
            return bad("coding rate must be in 1..=4");
        }
        if !(1..=222).contains(&self.payload_bytes) {
            return bad("payload must be 1..=222 bytes");
        }
        if self.channels_hz.is_empty() {
            return bad("at least one channel is required");
        }
        if !(self.duty_cycle > 0.0 && self.duty_cycle <= 1.0) {
            return bad("duty cycle must be in (0, 1]");
        }
        let strictly_decreasing = |t: &PerSf<f64>| t.windows(2).all(|w| w[1] < w[0]);
        if !strictly_decreasing(&self.sensitivity_dbm) {
            return bad("sensitivity must strictly decrease with SF");
        }
        if !strictly_decreasing(&self.required_snr_db) {
            return bad("required SNR must strictly decrease with SF");
        }
        Ok(())
    }

    pub fn sensitivity(&self, sf: SpreadingFactor) -> f64 {
        self.sensitivity_dbm[sf.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyModel {
    pub supply_voltage_v: f64,
    /// Transmit current at the configured TX power.
    pub tx_current_a: f64,
    pub initial_battery_j: f64,
    /// Charge the two class-A receive windows after each uplink.
    pub include_rx_windows: bool,
    pub rx_current_a: f64,
    /// Length of each receive window.
    pub rx_window_s: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        EnergyModel {
            supply_voltage_v: 3.3,
            tx_current_a: 0.028,
            initial_battery_j: 10_000.0,
            include_rx_windows: false,
            rx_current_a: 0.0112,
            rx_window_s: 0.033,
        }
    }
}

impl EnergyModel {
    pub fn validate(&self) -> Result<(), RadioError> {
        if !(self.supply_voltage_v > 0.0 && self.tx_current_a > 0.0) {
            return Err(RadioError::InvalidConfig("voltage and TX current must be positive".into()));
        }
        if !(self.initial_battery_j >= 0.0) {
            return Err(RadioError::InvalidConfig("initial battery must be non-negative".into()));
        }
        if self.include_rx_windows && !(self.rx_current_a >= 0.0 && self.rx_window_s >= 0.0) {
            return Err(RadioError::InvalidConfig("RX current and window must be non-negative".into()));
        }
        Ok(())
    }

    /// Joules drawn by one uplink of the given airtime.
    pub fn uplink_energy(&self, airtime_s: f64) -> f64 {
        let tx = self.supply_voltage_v * self.tx_current_a * airtime_s;
        if self.include_rx_windows {
            tx + self.supply_voltage_v * self.rx_current_a * 2.0 * self.rx_window_s
        } else {
            tx
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        RadioConfig::default().validate().unwrap();
        EnergyModel::default().validate().unwrap();
    }

    #[test]
    fn config_rejections() {
        let mut cfg = RadioConfig { payload_bytes: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
        cfg.payload_bytes = 223;
        assert!(cfg.validate().is_err());
        let mut cfg = RadioConfig::default();
        cfg.sensitivity_dbm[3] = cfg.sensitivity_dbm[2];
        assert!(cfg.validate().is_err());
        let cfg = RadioConfig { channels_hz: vec![], ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sf_bounds() {
        assert_eq!(SpreadingFactor::new(6), Err(RadioError::InvalidSf(6)));
        assert_eq!(SpreadingFactor::new(13), Err(RadioError::InvalidSf(13)));
        assert_eq!(SpreadingFactor::all().count(), 6);
        let sf: SpreadingFactor = serde_json::from_str("9").unwrap();
        assert_eq!(sf.index(), 2);
        assert!(serde_json::from_str::<SpreadingFactor>("5").is_err());
    }

    #[test]
    fn rx_toggle_adds_window_cost() {
        let e = EnergyModel::default();
        assert_eq!(e.uplink_energy(1.0), 3.3 * 0.028);
        let rx = EnergyModel { include_rx_windows: true, ..Default::default() };
        assert!(rx.uplink_energy(1.0) > e.uplink_energy(1.0));
    }
}
