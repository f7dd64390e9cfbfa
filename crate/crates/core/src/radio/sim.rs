use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::traffic::{ArrivalStream, TrafficModel};
use super::{adr_for_link, airtime, EnergyModel, LinkTable, PathLossModel, PerSf, RadioConfig, RadioError, SpreadingFactor};
use crate::rng::{self, SimRng};

const CHANNEL: &str = "channel";

/// An end device sitting at a water network node.
#[derive(Debug, Clone, PartialEq)]
pub struct Device {
    pub id: String,
    pub position: (f64, f64),
}

/// How devices get their spreading factor before the traffic run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SfPolicy {
    /// One-shot ADR against the strongest gateway.
    #[default]
    Adr,
    /// Every device forced onto the same SF.
    Fixed(SpreadingFactor),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub radio: RadioConfig,
    pub energy: EnergyModel,
    pub propagation: PathLossModel,
    pub sf_policy: SfPolicy,
    pub horizon_s: f64,
    pub battery_sample_s: f64,
    /// Keep every [`TransmissionRecord`]; turn off for large sweeps.
    pub keep_transmissions: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            radio: RadioConfig::default(),
            energy: EnergyModel::default(),
            propagation: PathLossModel::default(),
            sf_policy: SfPolicy::Adr,
            horizon_s: 86_400.0,
            battery_sample_s: 3600.0,
            keep_transmissions: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), RadioError> {
        self.radio.validate()?;
        self.energy.validate()?;
        self.propagation.validate()?;
        if !(self.horizon_s >= 0.0 && self.horizon_s.is_finite()) {
            return Err(RadioError::InvalidConfig("horizon must be finite and non-negative".into()));
        }
        if !(self.battery_sample_s > 0.0) {
            return Err(RadioError::InvalidConfig("battery sample interval must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Delivered,
    NoCoverage,
    Collided,
}

/// A gateway that heard a transmission above sensitivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceivedCopy {
    pub gateway: usize,
    pub rssi_dbm: f64,
    pub survived: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionRecord {
    pub start_s: f64,
    pub device: usize,
    pub channel_hz: f64,
    pub sf: SpreadingFactor,
    pub airtime_s: f64,
    pub copies: Vec<ReceivedCopy>,
    /// Strongest gateway that heard the packet.
    pub best_gateway: Option<usize>,
    /// Strongest received power over all gateways, heard or not.
    pub best_rssi_dbm: f64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndDeviceState {
    pub id: String,
    pub position: (f64, f64),
    pub sf: SpreadingFactor,
    pub marginal: bool,
    pub best_gateway: usize,
    pub best_rssi_dbm: f64,
    pub battery_j: f64,
    pub energy_j: f64,
    pub sent: u64,
    pub delivered: u64,
    pub lost_no_coverage: u64,
    pub lost_collision: u64,
    /// Ran out of battery before the horizon.
    pub halted: bool,
}

impl EndDeviceState {
    pub fn pdr(&self) -> f64 {
        ratio(self.delivered, self.sent)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WirelessFeatures {
    /// Devices per assigned SF, SF7 first.
    pub sf_histogram: PerSf<usize>,
    pub marginal_devices: usize,
    pub sent: u64,
    pub delivered: u64,
    pub lost_no_coverage: u64,
    pub lost_collision: u64,
    pub pdr: f64,
    pub mean_sf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatterySample {
    pub time_s: f64,
    pub device: usize,
    pub battery_j: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyReport {
    pub per_device_j: Vec<f64>,
    pub total_j: f64,
    pub battery: Vec<BatterySample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub devices: Vec<EndDeviceState>,
    pub features: WirelessFeatures,
    pub energy: EnergyReport,
    /// Ordered by start time, then device index.
    pub transmissions: Vec<TransmissionRecord>,
}

pub type DeviceReport = EndDeviceState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EventKind {
    // at equal timestamps: ends free the channel before new starts, and
    // battery samples see every send made at that instant
    TxEnd = 0,
    TxStart = 1,
    Sample = 2,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    kind: EventKind,
    device: usize,
    /// Transmission id for ends, sample number for samples.
    tag: u64,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then((self.kind as u8).cmp(&(other.kind as u8)))
            .then(self.device.cmp(&other.device))
            .then(self.tag.cmp(&other.tag))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct InFlight {
    start: f64,
    device: usize,
    channel: usize,
    sf: SpreadingFactor,
    copies: Vec<ReceivedCopy>,
}

struct DeviceRuntime {
    arrivals: ArrivalStream,
    channel_rng: SimRng,
    sent_per_sf: PerSf<u64>,
    next_allowed: f64,
}

/// Runs one deterministic day (or any horizon) of uplink traffic.
///
/// SFs are fixed before traffic starts. Each gateway decodes a copy when
/// the received power clears the SF sensitivity; overlapping copies on the
/// same channel and SF destroy each other unless one is stronger by the
/// capture threshold. A packet is delivered when any copy survives.
pub fn simulate(
    devices: &[Device],
    gateways: &[(f64, f64)],
    cfg: &SimConfig,
    traffic: &dyn TrafficModel,
    seed: u64,
) -> Result<SimulationResult, RadioError> {
    if devices.is_empty() {
        return Err(RadioError::NoDevices);
    }
    if gateways.is_empty() {
        return Err(RadioError::NoGateways);
    }
    cfg.validate()?;
    let radio = &cfg.radio;

    let mut airtimes = [0.0; 6];
    let mut uplink_j = [0.0; 6];
    for sf in SpreadingFactor::all() {
        airtimes[sf.index()] = airtime(sf, radio)?;
        uplink_j[sf.index()] = cfg.energy.uplink_energy(airtimes[sf.index()]);
    }

    let positions: Vec<(f64, f64)> = devices.iter().map(|d| d.position).collect();
    let links = LinkTable::build(&positions, gateways, radio.tx_power_dbm, &cfg.propagation, seed);

    let mut states = Vec::with_capacity(devices.len());
    for (i, dev) in devices.iter().enumerate() {
        let adr = adr_for_link(links.row(i), radio)?;
        let (sf, marginal) = match cfg.sf_policy {
            SfPolicy::Adr => (adr.sf, adr.marginal),
            SfPolicy::Fixed(sf) => (sf, radio.sensitivity(sf) > adr.best_rssi_dbm - radio.adr_margin_db),
        };
        states.push(EndDeviceState {
            id: dev.id.clone(),
            position: dev.position,
            sf,
            marginal,
            best_gateway: adr.best_gateway,
            best_rssi_dbm: adr.best_rssi_dbm,
            battery_j: cfg.energy.initial_battery_j,
            energy_j: 0.0,
            sent: 0,
            delivered: 0,
            lost_no_coverage: 0,
            lost_collision: 0,
            halted: false,
        });
    }

    let horizon = cfg.horizon_s;
    let mut queue: BinaryHeap<Reverse<Event>> = BinaryHeap::new();
    let mut runtime: Vec<DeviceRuntime> = Vec::with_capacity(devices.len());
    for d in 0..devices.len() {
        let mut arrivals = traffic.arrivals(d, rng::substream(seed, rng::TRAFFIC, d as u64));
        if let Some(t) = arrivals.next().filter(|&t| t < horizon) {
            queue.push(Reverse(Event { time: t, kind: EventKind::TxStart, device: d, tag: 0 }));
        }
        runtime.push(DeviceRuntime {
            arrivals,
            channel_rng: rng::substream(seed, CHANNEL, d as u64),
            sent_per_sf: [0; 6],
            next_allowed: 0.0,
        });
    }
    let mut sample = 0u64;
    loop {
        let t = sample as f64 * cfg.battery_sample_s;
        if t > horizon {
            break;
        }
        queue.push(Reverse(Event { time: t, kind: EventKind::Sample, device: 0, tag: sample }));
        sample += 1;
    }

    let n_ch = radio.channels_hz.len();
    let bucket = |gw: usize, ch: usize, sf: SpreadingFactor| (gw * n_ch + ch) * 6 + sf.index();
    let mut on_air: Vec<Vec<u64>> = vec![Vec::new(); gateways.len() * n_ch * 6];
    let mut in_flight: HashMap<u64, InFlight> = HashMap::new();
    let mut finished: Vec<(u64, TransmissionRecord)> = Vec::new();
    let mut battery = Vec::new();
    let mut next_tx_id = 0u64;
    let threshold = radio.capture_threshold_db;

    while let Some(Reverse(ev)) = queue.pop() {
        match ev.kind {
            EventKind::Sample => {
                battery.extend(states.iter().enumerate().map(|(device, s)| BatterySample {
                    time_s: ev.time,
                    device,
                    battery_j: s.battery_j,
                }));
            }
            EventKind::TxStart => {
                let d = ev.device;
                let state = &mut states[d];
                let rt = &mut runtime[d];
                let sf = state.sf;
                let k = sf.index();

                rt.sent_per_sf[k] += 1;
                let spent = device_energy(&rt.sent_per_sf, &uplink_j);
                if spent > cfg.energy.initial_battery_j {
                    rt.sent_per_sf[k] -= 1;
                    state.halted = true;
                    continue;
                }
                state.energy_j = spent;
                state.battery_j = cfg.energy.initial_battery_j - spent;
                state.sent += 1;

                let channel = rt.channel_rng.random_range(0..n_ch);
                let air = airtimes[k];
                let id = next_tx_id;
                next_tx_id += 1;

                let sensitivity = radio.sensitivity(sf);
                let mut copies: Vec<ReceivedCopy> = (0..gateways.len())
                    .filter_map(|g| {
                        let r = links.rssi(d, g);
                        (r >= sensitivity).then_some(ReceivedCopy { gateway: g, rssi_dbm: r, survived: true })
                    })
                    .collect();
                for copy in &mut copies {
                    let slot = &mut on_air[bucket(copy.gateway, channel, sf)];
                    for other_id in slot.iter() {
                        let other = in_flight
                            .get_mut(other_id)
                            .and_then(|f| f.copies.iter_mut().find(|c| c.gateway == copy.gateway))
                            .expect("on-air copy is tracked");
                        if copy.rssi_dbm - other.rssi_dbm >= threshold {
                            other.survived = false;
                        } else if other.rssi_dbm - copy.rssi_dbm >= threshold {
                            copy.survived = false;
                        } else {
                            other.survived = false;
                            copy.survived = false;
                        }
                    }
                    slot.push(id);
                }
                in_flight.insert(id, InFlight { start: ev.time, device: d, channel, sf, copies });
                queue.push(Reverse(Event { time: ev.time + air, kind: EventKind::TxEnd, device: d, tag: id }));

                rt.next_allowed = ev.time + air / radio.duty_cycle;
                if let Some(nominal) = rt.arrivals.next() {
                    let t = nominal.max(rt.next_allowed);
                    if t < horizon {
                        queue.push(Reverse(Event { time: t, kind: EventKind::TxStart, device: d, tag: 0 }));
                    }
                }
            }
            EventKind::TxEnd => {
                let flight = in_flight.remove(&ev.tag).expect("ending transmission is in flight");
                for copy in &flight.copies {
                    let slot = &mut on_air[bucket(copy.gateway, flight.channel, flight.sf)];
                    slot.retain(|&x| x != ev.tag);
                }
                let outcome = if flight.copies.is_empty() {
                    Outcome::NoCoverage
                } else if flight.copies.iter().any(|c| c.survived) {
                    Outcome::Delivered
                } else {
                    Outcome::Collided
                };
                let state = &mut states[flight.device];
                match outcome {
                    Outcome::Delivered => state.delivered += 1,
                    Outcome::NoCoverage => state.lost_no_coverage += 1,
                    Outcome::Collided => state.lost_collision += 1,
                }
                if cfg.keep_transmissions {
                    let best_gateway = flight
                        .copies
                        .iter()
                        .reduce(|a, b| if b.rssi_dbm > a.rssi_dbm { b } else { a })
                        .map(|c| c.gateway);
                    finished.push((
                        ev.tag,
                        TransmissionRecord {
                            start_s: flight.start,
                            device: flight.device,
                            channel_hz: radio.channels_hz[flight.channel],
                            sf: flight.sf,
                            airtime_s: airtimes[flight.sf.index()],
                            copies: flight.copies,
                            best_gateway,
                            best_rssi_dbm: state.best_rssi_dbm,
                            outcome,
                        },
                    ));
                }
            }
        }
    }
    debug_assert!(in_flight.is_empty());

    // ids were handed out in start order, i.e. by (time, device)
    finished.sort_unstable_by_key(|(id, _)| *id);
    let transmissions = finished.into_iter().map(|(_, r)| r).collect();

    let mut features = WirelessFeatures::default();
    for s in &states {
        features.sf_histogram[s.sf.index()] += 1;
        features.marginal_devices += usize::from(s.marginal);
        features.sent += s.sent;
        features.delivered += s.delivered;
        features.lost_no_coverage += s.lost_no_coverage;
        features.lost_collision += s.lost_collision;
    }
    features.pdr = ratio(features.delivered, features.sent);
    features.mean_sf = states.iter().map(|s| f64::from(s.sf.value())).sum::<f64>() / states.len() as f64;

    let per_device_j: Vec<f64> = states.iter().map(|s| s.energy_j).collect();
    let total_j = per_device_j.iter().sum();
    Ok(SimulationResult {
        devices: states,
        features,
        energy: EnergyReport { per_device_j, total_j, battery },
        transmissions,
    })
}

/// Energy as count × per-uplink cost for each SF, so a device that sent `n`
/// packets on one SF has spent exactly `n · E(sf)`.
fn device_energy(sent: &PerSf<u64>, uplink_j: &PerSf<f64>) -> f64 {
    sent.iter().zip(uplink_j).map(|(&n, &e)| n as f64 * e).sum()
}
