//! Uplink arrival processes.
//!
//! A [`TrafficModel`] turns a per-device random stream into nominal uplink
//! times. The simulator may push a send later (duty cycle) but never earlier.
//! Models are looked up by name through [`TrafficRegistry`].

use std::fmt::Debug;

use indexmap::IndexMap;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::RadioError;
use crate::rng::SimRng;

pub type ArrivalStream = Box<dyn Iterator<Item = f64> + Send>;

pub trait TrafficModel: Debug + Send + Sync {
    fn name(&self) -> &str;

    /// Nominal uplink times for one device, non-decreasing, starting after 0.
    fn arrivals(&self, device: usize, rng: SimRng) -> ArrivalStream;
}

/// Poisson arrivals: exponential gaps with the given mean.
#[derive(Debug, Clone)]
pub struct PoissonTraffic {
    pub mean_period_s: f64,
}

impl TrafficModel for PoissonTraffic {
    fn name(&self) -> &str {
        "poisson"
    }

    fn arrivals(&self, _device: usize, mut rng: SimRng) -> ArrivalStream {
        let gap = Exp::new(1.0 / self.mean_period_s).expect("positive period");
        let mut t = 0.0;
        Box::new(std::iter::from_fn(move || {
            t += gap.sample(&mut rng);
            Some(t)
        }))
    }
}

/// Fixed period with a random phase per device and uniform jitter of
/// ±`jitter_s` around each slot.
#[derive(Debug, Clone)]
pub struct PeriodicJitterTraffic {
    pub period_s: f64,
    pub jitter_s: f64,
}

impl TrafficModel for PeriodicJitterTraffic {
    fn name(&self) -> &str {
        "periodic_jitter"
    }

    fn arrivals(&self, _device: usize, mut rng: SimRng) -> ArrivalStream {
        let period = self.period_s;
        let jitter = self.jitter_s.min(period / 2.0);
        let phase = rng.random_range(0.0..period);
        let mut slot = 0u64;
        let mut last = 0.0f64;
        Box::new(std::iter::from_fn(move || {
            let offset = if jitter > 0.0 { rng.random_range(-jitter..=jitter) } else { 0.0 };
            let t = (phase + slot as f64 * period + offset).max(last);
            slot += 1;
            last = t;
            Some(t)
        }))
    }
}

/// Explicit per-device schedules; devices beyond the list stay silent.
#[derive(Debug, Clone, Default)]
pub struct ScheduledTraffic {
    pub schedules: Vec<Vec<f64>>,
}

impl TrafficModel for ScheduledTraffic {
    fn name(&self) -> &str {
        "scheduled"
    }

    fn arrivals(&self, device: usize, _rng: SimRng) -> ArrivalStream {
        Box::new(self.schedules.get(device).cloned().unwrap_or_default().into_iter())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficConfig {
    /// Registered model name.
    pub model: String,
    /// Mean (Poisson) or nominal (periodic) interval between uplinks.
    pub period_s: f64,
    pub jitter_s: f64,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        TrafficConfig { model: "poisson".into(), period_s: 300.0, jitter_s: 30.0 }
    }
}

type TrafficFactory = fn(&TrafficConfig) -> Box<dyn TrafficModel>;

pub struct TrafficRegistry {
    factories: IndexMap<&'static str, TrafficFactory>,
}

impl TrafficRegistry {
    pub fn empty() -> Self {
        TrafficRegistry { factories: IndexMap::new() }
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        reg.register("poisson", |c| Box::new(PoissonTraffic { mean_period_s: c.period_s }));
        reg.register("periodic_jitter", |c| {
            Box::new(PeriodicJitterTraffic { period_s: c.period_s, jitter_s: c.jitter_s })
        });
        reg
    }

    pub fn register(&mut self, name: &'static str, factory: TrafficFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn create(&self, cfg: &TrafficConfig) -> Result<Box<dyn TrafficModel>, RadioError> {
        if !(cfg.period_s > 0.0) || !(cfg.jitter_s >= 0.0) {
            return Err(RadioError::InvalidConfig("traffic period must be positive, jitter non-negative".into()));
        }
        let factory = self
            .factories
            .get(cfg.model.as_str())
            .ok_or_else(|| RadioError::UnknownTraffic(cfg.model.clone()))?;
        Ok(factory(cfg))
    }
}
