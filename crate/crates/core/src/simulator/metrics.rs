use serde::Serialize;

use crate::energy::EnergyState;
use crate::network::{ControlCounts, EnergyLedger};

/// Delivered over sent; `None` when nothing was sent.
pub fn compute_pdr(sent: u64, delivered: u64) -> Option<f64> {
    debug_assert!(delivered <= sent);
    (sent > 0).then(|| delivered as f64 / sent as f64)
}

/// Mean over nodes of consumed/initial, in percent.
pub fn compute_avg_energy_rate<'a>(states: impl IntoIterator<Item = &'a EnergyState>) -> Option<f64> {
    let (sum, n) = states
        .into_iter()
        .fold((0.0, 0usize), |(sum, n), s| (sum + s.consumed() / s.initial() * 100.0, n + 1));
    (n > 0).then(|| sum / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathTally {
    pub nodes: Vec<String>,
    /// Stability at the most recent discovery of this path.
    pub stability: f64,
    pub sent: u64,
    pub delivered: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowRecord {
    pub source: String,
    pub destination: String,
    pub sent: u64,
    pub delivered: u64,
    pub pdr: Option<f64>,
    pub discoveries: u64,
    pub route_failures: u64,
    pub paths: Vec<PathTally>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub packets_sent: u64,
    pub packets_delivered: u64,
    pub packets_lost: u64,
    pub pdr: Option<f64>,
    pub control: ControlCounts,
    pub per_node_consumed: Vec<f64>,
    /// Percent.
    pub avg_energy_consumption_rate: f64,
    pub paths_discovered: u64,
    pub discoveries: u64,
    pub route_failures: u64,
    pub dead_nodes: usize,
    pub flows: Vec<FlowRecord>,
    pub ledger: EnergyLedger,
    pub events_processed: u64,
    pub end_time: f64,
}
