use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::EnergyModel;
use crate::kinematics::Terrain;
use crate::routing::ProtocolConfig;

/// A configuration value that failed validation. `key` is the JSON path.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{key}: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { key: key.into(), message: message.into() }
    }
}

/// Fixed node for hand-built scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub speed: f64,
    /// Degrees counter-clockwise from east.
    pub heading: f64,
    #[serde(default = "full_battery")]
    pub residual_percent: f64,
}

fn full_battery() -> f64 {
    100.0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub source: String,
    pub destination: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub terrain: Terrain,
    /// Radio range in metres.
    pub range: f64,
    pub node_count: usize,
    /// Speed of every randomly placed node, m/s.
    pub speed: f64,
    /// Joules per node.
    pub initial_energy: f64,
    pub energy: EnergyModel,
    pub protocol: ProtocolConfig,
    pub packets_per_flow: u64,
    /// Data packets per second within a flow.
    pub packet_rate: f64,
    /// Number of random (source, destination) flows when `flows` is absent.
    pub random_flows: usize,
    pub flows: Option<Vec<FlowSpec>>,
    /// Seconds between consecutive flow starts.
    pub flow_stagger: f64,
    /// Simulated seconds; nothing is sent after this.
    pub duration: f64,
    pub seed: u64,
    /// Explicit node table; replaces random placement when present.
    pub nodes: Option<Vec<NodeSpec>>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            terrain: Terrain::default(),
            range: 200.0,
            node_count: 60,
            speed: 10.0,
            initial_energy: 5.0,
            energy: EnergyModel::MICA2,
            protocol: ProtocolConfig::default(),
            packets_per_flow: 100,
            packet_rate: 10.0,
            random_flows: 5,
            flows: None,
            flow_stagger: 1.0,
            duration: 30.0,
            seed: 1,
            nodes: None,
        }
    }
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("must be a positive number (got {v})")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("must be a non-negative number (got {v})")))
    }
}

impl SimConfig {
    /// Checks every field and renormalizes the stability weights.
    pub fn validate(mut self) -> Result<SimConfig, ConfigError> {
        positive("terrain.width", self.terrain.width)?;
        positive("terrain.height", self.terrain.height)?;
        positive("range", self.range)?;
        non_negative("speed", self.speed)?;
        positive("initial_energy", self.initial_energy)?;
        positive("energy.tx_cost", self.energy.tx_cost)?;
        positive("energy.rx_cost", self.energy.rx_cost)?;
        positive("packet_rate", self.packet_rate)?;
        non_negative("flow_stagger", self.flow_stagger)?;
        positive("duration", self.duration)?;

        let p = &mut self.protocol;
        p.stability = p
            .stability
            .normalized()
            .map_err(|e| ConfigError::new("protocol.stability", e.to_string()))?;
        positive("protocol.cache_ttl", p.cache_ttl)?;
        positive("protocol.hop_latency", p.hop_latency)?;
        if p.max_paths == 0 {
            return Err(ConfigError::new("protocol.max_paths", "must be at least 1"));
        }
        if let Some(w) = p.collection_window {
            positive("protocol.collection_window", w)?;
        }
        if p.hop_budget == Some(0) {
            return Err(ConfigError::new("protocol.hop_budget", "must be at least 1"));
        }
        for (key, bits) in [
            ("protocol.message_bits.hello", p.message_bits.hello),
            ("protocol.message_bits.reply_hello", p.message_bits.reply_hello),
            ("protocol.message_bits.rreq", p.message_bits.rreq),
            ("protocol.message_bits.rrep", p.message_bits.rrep),
            ("protocol.message_bits.data", p.message_bits.data),
        ] {
            if bits == 0 {
                return Err(ConfigError::new(key, "must be at least 1 bit"));
            }
        }

        let labels: Vec<String> = match &self.nodes {
            Some(nodes) => {
                if nodes.len() != self.node_count {
                    return Err(ConfigError::new(
                        "node_count",
                        format!("is {} but the node table lists {} nodes", self.node_count, nodes.len()),
                    ));
                }
                for (i, n) in nodes.iter().enumerate() {
                    let key = |f: &str| format!("nodes[{i}].{f}");
                    if n.id.is_empty() || nodes[..i].iter().any(|m| m.id == n.id) {
                        return Err(ConfigError::new(key("id"), format!("must be unique and non-empty (got {:?})", n.id)));
                    }
                    if !(n.x.is_finite() && (0.0..=self.terrain.width).contains(&n.x)) {
                        return Err(ConfigError::new(key("x"), format!("must lie inside the terrain (got {})", n.x)));
                    }
                    if !(n.y.is_finite() && (0.0..=self.terrain.height).contains(&n.y)) {
                        return Err(ConfigError::new(key("y"), format!("must lie inside the terrain (got {})", n.y)));
                    }
                    non_negative(&key("speed"), n.speed)?;
                    if !n.heading.is_finite() {
                        return Err(ConfigError::new(key("heading"), "must be finite"));
                    }
                    if !(0.0..=100.0).contains(&n.residual_percent) {
                        return Err(ConfigError::new(
                            key("residual_percent"),
                            format!("must lie in [0, 100] (got {})", n.residual_percent),
                        ));
                    }
                }
                nodes.iter().map(|n| n.id.clone()).collect()
            }
            None => (0..self.node_count).map(|i| i.to_string()).collect(),
        };
        if self.node_count < 2 {
            return Err(ConfigError::new("node_count", "must be at least 2"));
        }

        match &self.flows {
            Some(flows) => {
                if flows.is_empty() {
                    return Err(ConfigError::new("flows", "must list at least one flow"));
                }
                for (i, f) in flows.iter().enumerate() {
                    for (field, label) in [("source", &f.source), ("destination", &f.destination)] {
                        if !labels.contains(label) {
                            return Err(ConfigError::new(
                                format!("flows[{i}].{field}"),
                                format!("unknown node {label:?}"),
                            ));
                        }
                    }
                    if f.source == f.destination {
                        return Err(ConfigError::new(format!("flows[{i}]"), "source and destination must differ"));
                    }
                }
            }
            None => {
                if self.random_flows == 0 {
                    return Err(ConfigError::new("random_flows", "must be at least 1 when no flows are listed"));
                }
            }
        }
        Ok(self)
    }
}
