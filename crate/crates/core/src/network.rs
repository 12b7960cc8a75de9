//! Shared simulation state: nodes, radio range, energy charging and
//! message/energy accounting.

use serde::{Deserialize, Serialize};

use crate::energy::{Charge, EnergyModel, EnergyState};
use crate::kinematics::{in_range, NodeId, NodeKinematics, Terrain};

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub label: String,
    pub motion: NodeKinematics,
    pub energy: EnergyState,
}

/// Control traffic counters. `hello` counts broadcasts, the rest count
/// per-hop transmissions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlCounts {
    pub hello: u64,
    pub reply_hello: u64,
    pub rreq: u64,
    pub rrep: u64,
    /// RREQs dropped by the loop guard.
    pub rreq_loop_drops: u64,
    /// RREQs discarded because a better one was already seen.
    pub rreq_discarded: u64,
}

impl ControlCounts {
    pub fn total_messages(&self) -> u64 {
        self.hello + self.reply_hello + self.rreq + self.rrep
    }

    pub fn since(&self, earlier: &ControlCounts) -> ControlCounts {
        ControlCounts {
            hello: self.hello - earlier.hello,
            reply_hello: self.reply_hello - earlier.reply_hello,
            rreq: self.rreq - earlier.rreq,
            rrep: self.rrep - earlier.rrep,
            rreq_loop_drops: self.rreq_loop_drops - earlier.rreq_loop_drops,
            rreq_discarded: self.rreq_discarded - earlier.rreq_discarded,
        }
    }
}

/// Running record of every radio transaction charged to a live node.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub tx_bits: u64,
    pub rx_bits: u64,
    /// Sum of energy actually drawn.
    pub charged: f64,
    /// Requested minus drawn, for transactions cut short by depletion.
    pub depletion_shortfall: f64,
    pub depleted_transactions: u64,
}

impl EnergyLedger {
    /// Energy implied by the bit counts, less what depletion clamped away.
    pub fn expected_consumption(&self, model: &EnergyModel) -> f64 {
        self.tx_bits as f64 * model.tx_cost + self.rx_bits as f64 * model.rx_cost
            - self.depletion_shortfall
    }

    fn record(&mut self, charge: &Charge) {
        self.charged += charge.charged;
        if charge.charged < charge.requested {
            self.depletion_shortfall += charge.requested - charge.charged;
            self.depleted_transactions += 1;
        }
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    pub terrain: Terrain,
    pub range: f64,
    pub energy_model: EnergyModel,
    nodes: Vec<Node>,
    baseline_consumed: Vec<f64>,
    pub counts: ControlCounts,
    pub ledger: EnergyLedger,
}

impl Network {
    /// Node ids must equal their index in `nodes`.
    pub fn new(terrain: Terrain, range: f64, energy_model: EnergyModel, nodes: Vec<Node>) -> Self {
        for (i, n) in nodes.iter().enumerate() {
            assert_eq!(n.id.index(), i, "node ids must be dense and ordered");
        }
        let baseline_consumed = nodes.iter().map(|n| n.energy.consumed()).collect();
        Network {
            terrain,
            range,
            energy_model,
            nodes,
            baseline_consumed,
            counts: ControlCounts::default(),
            ledger: EnergyLedger::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id.index()]
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.id)
    }

    pub fn find(&self, label: &str) -> Option<NodeId> {
        self.nodes.iter().find(|n| n.label == label).map(|n| n.id)
    }

    pub fn is_alive(&self, id: NodeId) -> bool {
        self.node(id).energy.is_alive()
    }

    pub fn position(&self, id: NodeId, t: f64) -> (f64, f64) {
        self.node(id)
            .motion
            .position_at(t, &self.terrain)
            .expect("simulation time precedes node reference time")
    }

    pub fn connected(&self, a: NodeId, b: NodeId, t: f64) -> bool {
        in_range(&self.node(a).motion, &self.node(b).motion, t, self.range, &self.terrain)
            .expect("simulation time precedes node reference time")
    }

    pub fn transmit(&mut self, id: NodeId, bits: u64) -> Charge {
        let model = self.energy_model;
        let node = &mut self.nodes[id.index()];
        let alive = node.energy.is_alive();
        let charge = node.energy.consume_tx(&model, bits);
        if alive {
            self.ledger.tx_bits += bits;
            self.ledger.record(&charge);
        }
        charge
    }

    pub fn receive(&mut self, id: NodeId, bits: u64) -> Charge {
        let model = self.energy_model;
        let node = &mut self.nodes[id.index()];
        let alive = node.energy.is_alive();
        let charge = node.energy.consume_rx(&model, bits);
        if alive {
            self.ledger.rx_bits += bits;
            self.ledger.record(&charge);
        }
        charge
    }

    /// Energy drawn by each node since the network was built.
    pub fn consumed_since_start(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.baseline_consumed)
            .map(|(n, base)| n.energy.consumed() - base)
            .sum()
    }
}
