use super::{RadioConfig, RadioError, SpreadingFactor};

/// LoRa time on air in seconds (Semtech formula, CRC on).
///
/// Low data rate optimisation switches on when a symbol lasts longer than
/// 16 ms, which at 125 kHz means SF11 and SF12.
pub fn airtime(sf: SpreadingFactor, cfg: &RadioConfig) -> Result<f64, RadioError> {
    if !(1..=222).contains(&cfg.payload_bytes) {
        return Err(RadioError::InvalidConfig(format!("payload of {} bytes", cfg.payload_bytes)));
    }
    if !(1..=4).contains(&cfg.coding_rate) || !(cfg.bandwidth_hz > 0.0) {
        return Err(RadioError::InvalidConfig("coding rate or bandwidth out of range".into()));
    }
    let sf_v = i64::from(sf.value());
    let symbol_s = f64::from(1u32 << sf.value()) / cfg.bandwidth_hz;
    let low_dr = i64::from(symbol_s > 0.016);
    let implicit = i64::from(!cfg.explicit_header);

    let bits = 8 * i64::from(cfg.payload_bytes) - 4 * sf_v + 28 + 16 - 20 * implicit;
    let per_block = 4 * (sf_v - 2 * low_dr);
    // ceil for possibly negative numerators; clamped to zero below anyway
    let blocks = if bits > 0 { (bits + per_block - 1) / per_block } else { 0 };
    let payload_symbols = 8 + (blocks * (i64::from(cfg.coding_rate) + 4)).max(0);

    Ok((f64::from(cfg.preamble_symbols) + 4.25) * symbol_s + payload_symbols as f64 * symbol_s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf(v: u8) -> SpreadingFactor {
        SpreadingFactor::new(v).unwrap()
    }

    #[test]
    fn increases_with_sf() {
        let cfg = RadioConfig::default();
        let times: Vec<f64> = SpreadingFactor::all().map(|s| airtime(s, &cfg).unwrap()).collect();
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert!(times[0] > 0.0);
    }

    #[test]
    fn sf7_default_packet() {
        // 43 payload symbols + 12.25 preamble symbols of 1.024 ms
        let t = airtime(sf(7), &RadioConfig::default()).unwrap();
        assert!((t - 0.056576).abs() < 1e-9);
    }

    #[test]
    fn zero_payload_rejected() {
        let cfg = RadioConfig { payload_bytes: 0, ..Default::default() };
        assert!(airtime(sf(7), &cfg).is_err());
    }
}
