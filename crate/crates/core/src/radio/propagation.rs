use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::RadioError;
use crate::rng::{self, SimRng};

/// Log-distance path loss with optional log-normal shadowing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossModel {
    pub reference_loss_db: f64,
    pub reference_distance_m: f64,
    pub exponent: f64,
    /// Standard deviation of the per-link shadowing term; 0 disables it.
    pub shadowing_sigma_db: f64,
    pub min_distance_m: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        PathLossModel {
            reference_loss_db: 128.95,
            reference_distance_m: 1000.0,
            exponent: 2.32,
            shadowing_sigma_db: 0.0,
            min_distance_m: 1.0,
        }
    }
}

impl PathLossModel {
    pub fn validate(&self) -> Result<(), RadioError> {
        if !(self.reference_distance_m > 0.0 && self.min_distance_m > 0.0) {
            return Err(RadioError::InvalidConfig("path loss distances must be positive".into()));
        }
        if !(self.shadowing_sigma_db >= 0.0) || !self.exponent.is_finite() {
            return Err(RadioError::InvalidConfig("bad path loss exponent or shadowing sigma".into()));
        }
        Ok(())
    }

    /// Deterministic part of the loss; distances below `min_distance_m` are clamped.
    pub fn path_loss_db(&self, distance_m: f64) -> f64 {
        let d = distance_m.max(self.min_distance_m);
        self.reference_loss_db + 10.0 * self.exponent * (d / self.reference_distance_m).log10()
    }
}

pub fn rssi(tx_dbm: f64, loss_db: f64) -> f64 {
    tx_dbm - loss_db
}

/// Received power of every device at every gateway.
///
/// Shadowing for device `d` is drawn from its own substream, one value per
/// gateway in gateway order, so appending a gateway leaves the existing
/// links untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTable {
    gateways: usize,
    rssi: Vec<f64>,
}

impl LinkTable {
    pub fn build(
        devices: &[(f64, f64)],
        gateways: &[(f64, f64)],
        tx_dbm: f64,
        model: &PathLossModel,
        seed: u64,
    ) -> Self {
        let shadow = (model.shadowing_sigma_db > 0.0)
            .then(|| Normal::new(0.0, model.shadowing_sigma_db).expect("sigma validated"));
        let mut rssi_table = Vec::with_capacity(devices.len() * gateways.len());
        for (d, &(dx, dy)) in devices.iter().enumerate() {
            let mut rng: Option<SimRng> = shadow.map(|_| rng::substream(seed, rng::SHADOWING, d as u64));
            for &(gx, gy) in gateways {
                let mut loss = model.path_loss_db((dx - gx).hypot(dy - gy));
                if let (Some(dist), Some(r)) = (shadow.as_ref(), rng.as_mut()) {
                    loss += dist.sample(r);
                }
                rssi_table.push(rssi(tx_dbm, loss));
            }
        }
        LinkTable { gateways: gateways.len(), rssi: rssi_table }
    }

    pub fn gateways(&self) -> usize {
        self.gateways
    }

    pub fn row(&self, device: usize) -> &[f64] {
        &self.rssi[device * self.gateways..(device + 1) * self.gateways]
    }

    pub fn rssi(&self, device: usize, gateway: usize) -> f64 {
        self.rssi[device * self.gateways + gateway]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_distance() {
        let m = PathLossModel::default();
        assert_eq!(m.path_loss_db(1000.0), 128.95);
        assert_eq!(rssi(14.0, m.path_loss_db(1000.0)), 14.0 - 128.95);
    }

    #[test]
    fn decade_with_exponent_two() {
        let m = PathLossModel { exponent: 2.0, ..Default::default() };
        assert!((m.path_loss_db(10_000.0) - (128.95 + 20.0)).abs() < 1e-12);
    }

    #[test]
    fn clamped_below_min_distance() {
        let m = PathLossModel::default();
        assert_eq!(m.path_loss_db(0.0), m.path_loss_db(1.0));
        assert_eq!(m.path_loss_db(0.5), m.path_loss_db(1.0));
    }

    #[test]
    fn shadowing_is_seeded_and_prefix_stable() {
        let m = PathLossModel { shadowing_sigma_db: 8.0, ..Default::default() };
        let devs = [(0.0, 0.0), (500.0, 0.0)];
        let gws = [(100.0, 0.0), (900.0, 0.0)];
        let a = LinkTable::build(&devs, &gws, 14.0, &m, 9);
        let b = LinkTable::build(&devs, &gws, 14.0, &m, 9);
        assert_eq!(a, b);
        let c = LinkTable::build(&devs, &gws[..1], 14.0, &m, 9);
        assert_eq!(c.rssi(1, 0), a.rssi(1, 0));
        let flat = LinkTable::build(&devs, &gws, 14.0, &PathLossModel::default(), 9);
        assert_ne!(flat.rssi(0, 0), a.rssi(0, 0));
    }
}
