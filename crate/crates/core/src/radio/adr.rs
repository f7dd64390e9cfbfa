use super::{RadioConfig, RadioError, SpreadingFactor};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdrDecision {
    pub sf: SpreadingFactor,
    pub best_gateway: usize,
    pub best_rssi_dbm: f64,
    /// No SF clears the margin; the device was parked on SF12.
    pub marginal: bool,
}

/// Smallest SF whose sensitivity sits at least `adr_margin_db` below the
/// given RSSI, or SF12 flagged marginal when none does.
pub fn adr_assign(best_rssi_dbm: f64, cfg: &RadioConfig) -> (SpreadingFactor, bool) {
    let budget = best_rssi_dbm - cfg.adr_margin_db;
    match SpreadingFactor::all().find(|&sf| cfg.sensitivity(sf) <= budget) {
        Some(sf) => (sf, false),
        None => (SpreadingFactor::MAX, true),
    }
}

/// ADR for one device given its received power at every gateway. The
/// strongest gateway wins; ties go to the lower index.
pub fn adr_for_link(rssi_row: &[f64], cfg: &RadioConfig) -> Result<AdrDecision, RadioError> {
    let (best_gateway, best_rssi_dbm) = rssi_row
        .iter()
        .copied()
        .enumerate()
        .reduce(|best, cur| if cur.1 > best.1 { cur } else { best })
        .ok_or(RadioError::NoGateways)?;
    let (sf, marginal) = adr_assign(best_rssi_dbm, cfg);
    Ok(AdrDecision { sf, best_gateway, best_rssi_dbm, marginal })
}
