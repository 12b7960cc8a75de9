use super::{Path, ProtocolConfig, RoutingError};
use crate::network::Network;

#[derive(Debug, Clone, PartialEq)]
pub struct PathDelivery {
    pub path: Path,
    pub sent: u64,
    pub delivered: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketOutcome {
    pub index: u64,
    pub path: usize,
    pub departed_at: f64,
    pub delivered: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeliveryRecord {
    pub per_path: Vec<PathDelivery>,
    pub packets: Vec<PacketOutcome>,
}

impl DeliveryRecord {
    pub fn sent(&self) -> u64 {
        self.per_path.iter().map(|p| p.sent).sum()
    }

    pub fn delivered(&self) -> u64 {
        self.per_path.iter().map(|p| p.delivered).sum()
    }
}

/// Sends `packets` data packets round-robin over `paths` (expected most
/// stable first): packet `first_index + i` departs at `start + i * interval`
/// on path `(first_index + i) % paths.len()`.
///
/// Each hop charges the sender's transmit and the receiver's receive cost. A
/// packet is lost when a hop's sender or receiver is dead or the two are out
/// of range at the moment of forwarding.
pub fn distribute_data(
    net: &mut Network,
    paths: &[Path],
    packets: u64,
    first_index: u64,
    start: f64,
    interval: f64,
    cfg: &ProtocolConfig,
) -> Result<DeliveryRecord, RoutingError> {
    if paths.is_empty() {
        return Err(RoutingError::NoPaths);
    }
    let mut record = DeliveryRecord {
        per_path: paths.iter().map(|p| PathDelivery { path: p.clone(), sent: 0, delivered: 0 }).collect(),
        packets: Vec::with_capacity(packets as usize),
    };
    for i in 0..packets {
        let index = first_index + i;
        let slot = (index % paths.len() as u64) as usize;
        let departed_at = start + i as f64 * interval;
        let delivered = forward_packet(net, &paths[slot], departed_at, cfg);
        let tally = &mut record.per_path[slot];
        tally.sent += 1;
        tally.delivered += u64::from(delivered);
        record.packets.push(PacketOutcome { index, path: slot, departed_at, delivered });
    }
    Ok(record)
}

fn forward_packet(net: &mut Network, path: &Path, departed_at: f64, cfg: &ProtocolConfig) -> bool {
    let bits = cfg.message_bits.data;
    let mut t = departed_at;
    for hop in path.nodes.windows(2) {
        let (from, to) = (hop[0], hop[1]);
        if !net.is_alive(from) || !net.transmit(from, bits).completed {
            return false;
        }
        if !net.is_alive(to) || !net.connected(from, to, t) {
            return false;
        }
        if !net.receive(to, bits).completed {
            return false;
        }
        t += cfg.hop_latency;
    }
    true
}
