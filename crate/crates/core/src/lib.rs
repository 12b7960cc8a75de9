//! Discrete-event simulator for mobile ad-hoc networks running an
//! energy- and link-stability-aware multipath routing protocol.
//!
//! Module map:
//! - [`kinematics`]: constant-velocity motion with wall reflection.
//! - [`link_model`]: link expiration time and link-stability scoring.
//! - [`energy`]: per-bit radio energy accounting.
//! - [`routing`]: route cache, discovery wave, data distribution.
//! - [`simulator`]: event loop, scenarios, metrics and sweeps.
//! - [`cli_io`]: scenario files, CSV/SVG output and the `amr` commands.

pub mod cli_io;
pub mod energy;
pub mod event;
pub mod kinematics;
pub mod link_model;
pub mod network;
pub mod routing;
pub mod simulator;

pub use energy::{EnergyModel, EnergyState};
pub use kinematics::{NodeId, NodeKinematics, Terrain};
pub use link_model::{LetResult, LinkAssessment, StabilityConfig};
pub use network::{ControlCounts, Network, Node};
pub use routing::{Path, ProtocolConfig, Router, RoutingMode};
pub use simulator::{MetricsReport, SimConfig};
