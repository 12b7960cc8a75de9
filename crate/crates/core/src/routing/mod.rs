//! On-demand multipath routing driven by link stability.
//!
//! A send first consults the route cache. On a miss the source runs a
//! discovery wave: visited nodes exchange Hello/Reply_Hello with their
//! neighbours to score each link, then forward RREQs to one, two or all
//! neighbours depending on how stable the best link is. The destination
//! keeps the most stable arriving paths and answers each with an RREP;
//! the source caches whatever comes back and spreads data across it.

mod cache;
mod establish;
mod forwarding;

pub use cache::{CacheLookup, EntryId, RouteCache, RouteCacheEntry};
pub use establish::{
    accept_rreq, discover_neighbors, establish_routes, extend_rreq, route_discovery, select_forwarding_set,
    Discovery, ForwardRecord, LinkView, Neighbor, RreqFilter, RreqVerdict,
};
pub use forwarding::{distribute_data, DeliveryRecord, PathDelivery};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::NodeId;
use crate::link_model::StabilityConfig;
use crate::network::{ControlCounts, Network};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoutingError {
    #[error("node {0} is dead")]
    SenderDead(NodeId),
    #[error("no neighbours to forward to")]
    DeadEnd,
    #[error("{next} is already on the partial path")]
    Loop { next: NodeId },
    #[error("no route from {origin} to {destination}")]
    RouteFailure { origin: NodeId, destination: NodeId },
    #[error("no paths to distribute data over")]
    NoPaths,
}

/// A simple path and the product of its link stabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub stability: f64,
}

impl Path {
    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn destination(&self) -> NodeId {
        *self.nodes.last().expect("path is never empty")
    }

    pub fn hops(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = self.nodes.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

/// Orders paths most stable first, then by node sequence.
pub(crate) fn by_stability_desc(a: &Path, b: &Path) -> std::cmp::Ordering {
    b.stability.total_cmp(&a.stability).then_with(|| a.nodes.cmp(&b.nodes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelloMsg {
    pub sender: NodeId,
    pub position: (f64, f64),
    pub speed: f64,
    pub heading: f64,
    pub sent_at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplyHelloMsg {
    pub responder: NodeId,
    pub link_stability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RequestId(pub u64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RreqMsg {
    pub request_id: RequestId,
    pub source: NodeId,
    /// Node the message is addressed to; the last element of `partial_path`.
    pub next: NodeId,
    pub partial_path: Vec<NodeId>,
    pub partial_path_stability: f64,
}

impl RreqMsg {
    pub fn originate(request_id: RequestId, source: NodeId) -> Self {
        RreqMsg {
            request_id,
            source,
            next: source,
            partial_path: vec![source],
            partial_path_stability: 1.0,
        }
    }

    pub fn into_path(self) -> Path {
        Path { nodes: self.partial_path, stability: self.partial_path_stability }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RrepMsg {
    pub request_id: RequestId,
    pub path: Path,
}

/// Whose residual energy enters the link score when a Hello is received.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyReading {
    /// The node receiving the Hello (the next hop of the link).
    #[default]
    Receiver,
    Sender,
    Min,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RoutingMode {
    /// Round-robin over every cached path.
    #[default]
    Multipath,
    /// Only the most stable path carries data.
    Single,
}

/// Message sizes in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MessageSizes {
    pub hello: u64,
    pub reply_hello: u64,
    pub rreq: u64,
    pub rrep: u64,
    pub data: u64,
}

impl Default for MessageSizes {
    fn default() -> Self {
        MessageSizes { hello: 128, reply_hello: 128, rreq: 256, rrep: 256, data: 1024 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolConfig {
    pub stability: StabilityConfig,
    pub message_bits: MessageSizes,
    /// Seconds a discovered route stays in the cache.
    pub cache_ttl: f64,
    /// Seconds per message hop.
    pub hop_latency: f64,
    /// Paths the destination keeps per discovery.
    pub max_paths: usize,
    /// RREQ collection window at the destination; `2 * nodes * hop_latency` when absent.
    pub collection_window: Option<f64>,
    /// Maximum RREQ hop count; the node count when absent.
    pub hop_budget: Option<usize>,
    pub mode: RoutingMode,
    pub energy_reading: EnergyReading,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            stability: StabilityConfig::default(),
            message_bits: MessageSizes::default(),
            cache_ttl: 10.0,
            hop_latency: 1e-3,
            max_paths: 3,
            collection_window: None,
            hop_budget: None,
            mode: RoutingMode::Multipath,
            energy_reading: EnergyReading::Receiver,
        }
    }
}

impl ProtocolConfig {
    pub fn window_for(&self, node_count: usize) -> f64 {
        self.collection_window.unwrap_or(2.0 * node_count as f64 * self.hop_latency)
    }

    pub fn hop_budget_for(&self, node_count: usize) -> usize {
        self.hop_budget.unwrap_or(node_count)
    }
}

/// One call into the protocol: send `packets` data packets from `source` to
/// `destination`, the first departing at `now` and the rest every `interval`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SendRequest {
    pub source: NodeId,
    pub destination: NodeId,
    pub packets: u64,
    /// Round-robin position of the first packet, so successive calls keep rotating.
    pub first_packet_index: u64,
    pub interval: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SendOutcome {
    pub delivery: DeliveryRecord,
    /// Control traffic generated by this call.
    pub control: ControlCounts,
    /// Paths freshly discovered, empty on a cache hit.
    pub discovered: Vec<Path>,
    /// Cache entries created by this call.
    pub cached: Vec<EntryId>,
}

/// Routing state of the whole network: the route cache plus the request-id counter.
#[derive(Debug, Clone, Default)]
pub struct Router {
    pub cache: RouteCache,
    next_request: u64,
}

impl Router {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next_request_id(&mut self) -> RequestId {
        let id = RequestId(self.next_request);
        self.next_request += 1;
        id
    }

    /// Sends data, discovering routes first if the cache has none.
    pub fn amr_send(
        &mut self,
        net: &mut Network,
        req: SendRequest,
        cfg: &ProtocolConfig,
        now: f64,
    ) -> Result<SendOutcome, RoutingError> {
        if !net.is_alive(req.source) {
            return Err(RoutingError::SenderDead(req.source));
        }
        let before = net.counts;
        let lookup = self.cache.check(req.source, req.destination, now);
        let (paths, discovered, cached, depart) = if lookup.count > 0 {
            let mut paths: Vec<Path> = lookup
                .entry_ids
                .iter()
                .filter_map(|id| self.cache.get(*id))
                .map(|e| e.path.clone())
                .collect();
            paths.sort_by(by_stability_desc);
            (paths, Vec::new(), Vec::new(), now)
        } else {
            let request_id = self.next_request_id();
            let found = establish_routes(net, req.source, req.destination, cfg, now, request_id)?;
            let expires_at = now + cfg.cache_ttl;
            let cached = found
                .paths
                .iter()
                .map(|p| self.cache.insert(req.source, req.destination, p.clone(), expires_at))
                .collect();
            (found.paths.clone(), found.paths, cached, found.completed_at)
        };

        let used: &[Path] = match cfg.mode {
            RoutingMode::Multipath => &paths,
            RoutingMode::Single => &paths[..1],
        };
        let delivery = distribute_data(net, used, req.packets, req.first_packet_index, depart, req.interval, cfg)?;
        if !discovered.is_empty() {
            self.cache.maintain(now);
        }
        Ok(SendOutcome { delivery, control: net.counts.since(&before), discovered, cached })
    }
}

#[cfg(test)]
mod tests;
