//! Discrete-event driver: scenario construction, the event loop, metrics
//! and parameter sweeps.

pub mod config;
mod engine;
pub mod metrics;
mod scenario;
mod sweep;

pub use config::{ConfigError, FlowSpec, NodeSpec, SimConfig};
pub use engine::{run, EventKind, Simulation};
pub use metrics::{compute_avg_energy_rate, compute_pdr, FlowRecord, MetricsReport, PathTally};
pub use scenario::{generate_scenario, Scenario};
pub use sweep::{compare, mean_std, run_repetitions, summarize, sweep, CompareRow, SweepAxis, SweepRow};
