use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SimConfig;
use crate::energy::EnergyState;
use crate::kinematics::{NodeId, NodeKinematics};
use crate::network::{Network, Node};

/// A ready-to-run network plus its traffic pairs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub network: Network,
    pub flows: Vec<(NodeId, NodeId)>,
}

/// Builds the initial network for a validated config.
///
/// Random placement draws, per node, x then y uniformly over the terrain and
/// a heading uniformly over [0, 360); random flows are drawn afterwards from
/// the same generator. Equal seeds give identical scenarios.
pub fn generate_scenario(cfg: &SimConfig) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let nodes: Vec<Node> = match &cfg.nodes {
        Some(table) => table
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let id = NodeId(i as u32);
                Node {
                    id,
                    label: spec.id.clone(),
                    motion: NodeKinematics::new(id, (spec.x, spec.y), spec.speed, spec.heading, 0.0)
                        .expect("validated node table"),
                    energy: EnergyState::with_residual_fraction(cfg.initial_energy, spec.residual_percent / 100.0)
                        .expect("validated node table"),
                }
            })
            .collect(),
        None => (0..cfg.node_count)
            .map(|i| {
                let id = NodeId(i as u32);
                let x = rng.gen_range(0.0..cfg.terrain.width);
                let y = rng.gen_range(0.0..cfg.terrain.height);
                let heading = rng.gen_range(0.0..360.0);
                Node {
                    id,
                    label: i.to_string(),
                    motion: NodeKinematics::new(id, (x, y), cfg.speed, heading, 0.0).expect("validated config"),
                    energy: EnergyState::new(cfg.initial_energy).expect("validated config"),
                }
            })
            .collect(),
    };
    let network = Network::new(cfg.terrain, cfg.range, cfg.energy, nodes);

    let flows = match &cfg.flows {
        Some(list) => list
            .iter()
            .map(|f| {
                let s = network.find(&f.source).expect("validated flow");
                let d = network.find(&f.destination).expect("validated flow");
                (s, d)
            })
            .collect(),
        None => {
            let n = network.len() as u32;
            (0..cfg.random_flows)
                .map(|_| {
                    let s = rng.gen_range(0..n);
                    let mut d = rng.gen_range(0..n - 1);
                    if d >= s {
                        d += 1;
                    }
                    (NodeId(s), NodeId(d))
                })
                .collect()
        }
    };
    Scenario { network, flows }
}
