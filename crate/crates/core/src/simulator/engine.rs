use super::metrics::{compute_avg_energy_rate, compute_pdr, FlowRecord, MetricsReport, PathTally};
use super::scenario::{generate_scenario, Scenario};
use super::{ConfigError, SimConfig};
use crate::event::EventQueue;
use crate::kinematics::NodeId;
use crate::network::Network;
use crate::routing::{Path, Router, RoutingError, SendRequest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    FlowStart { flow: usize },
    /// The next data packet of a flow leaves its source.
    DataSend { flow: usize },
    CacheExpiry,
}

#[derive(Debug, Clone)]
struct FlowState {
    source: NodeId,
    destination: NodeId,
    sent: u64,
    delivered: u64,
    discoveries: u64,
    route_failures: u64,
    paths: Vec<PathTally>,
}

/// One single-threaded simulation run.
pub struct Simulation {
    cfg: SimConfig,
    net: Network,
    router: Router,
    queue: EventQueue<EventKind>,
    flows: Vec<FlowState>,
    events_processed: u64,
    paths_discovered: u64,
}

impl Simulation {
    pub fn new(cfg: SimConfig) -> Result<Self, ConfigError> {
        let cfg = cfg.validate()?;
        let Scenario { network, flows } = generate_scenario(&cfg);
        Ok(Self::with_scenario(cfg, network, flows))
    }

    /// Runs `cfg`'s traffic over a prebuilt network. `cfg` must already be validated.
    pub fn with_scenario(cfg: SimConfig, net: Network, flows: Vec<(NodeId, NodeId)>) -> Self {
        let mut queue = EventQueue::new(0.0);
        for (i, _) in flows.iter().enumerate() {
            queue.schedule(i as f64 * cfg.flow_stagger, EventKind::FlowStart { flow: i });
        }
        let flows = flows
            .into_iter()
            .map(|(source, destination)| FlowState {
                source,
                destination,
                sent: 0,
                delivered: 0,
                discoveries: 0,
                route_failures: 0,
                paths: Vec::new(),
            })
            .collect();
        Simulation {
            cfg,
            net,
            router: Router::new(),
            queue,
            flows,
            events_processed: 0,
            paths_discovered: 0,
        }
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn now(&self) -> f64 {
        self.queue.now()
    }

    /// Processes one event. Returns false once nothing is left to do.
    pub fn step(&mut self) -> bool {
        let Some((now, event)) = self.queue.pop() else {
            return false;
        };
        if now > self.cfg.duration {
            return false;
        }
        self.events_processed += 1;
        match event {
            EventKind::FlowStart { flow } => self.queue.schedule(now, EventKind::DataSend { flow }),
            EventKind::DataSend { flow } => self.send_one(flow, now),
            EventKind::CacheExpiry => {
                self.router.cache.maintain(now);
            }
        }
        true
    }

    fn send_one(&mut self, flow: usize, now: f64) {
        let interval = 1.0 / self.cfg.packet_rate;
        let state = &self.flows[flow];
        let req = SendRequest {
            source: state.source,
            destination: state.destination,
            packets: 1,
            first_packet_index: state.sent,
            interval,
        };
        let result = self.router.amr_send(&mut self.net, req, &self.cfg.protocol, now);
        let state = &mut self.flows[flow];
        state.sent += 1;
        match result {
            Ok(outcome) => {
                if !outcome.discovered.is_empty() {
                    state.discoveries += 1;
                    self.paths_discovered += outcome.discovered.len() as u64;
                    for p in &outcome.discovered {
                        tally_for(&mut state.paths, &self.net, p).stability = p.stability;
                    }
                    self.queue.schedule(now + self.cfg.protocol.cache_ttl, EventKind::CacheExpiry);
                }
                for pd in &outcome.delivery.per_path {
                    let tally = tally_for(&mut state.paths, &self.net, &pd.path);
                    tally.sent += pd.sent;
                    tally.delivered += pd.delivered;
                }
                state.delivered += outcome.delivery.delivered();
            }
            Err(RoutingError::RouteFailure { .. }) => {
                state.discoveries += 1;
                state.route_failures += 1;
            }
            Err(_) => {}
        }
        if state.sent < self.cfg.packets_per_flow {
            self.queue.schedule(now + interval, EventKind::DataSend { flow });
        }
    }

    pub fn run_to_end(&mut self) {
        while self.step() {}
    }

    pub fn report(&self) -> MetricsReport {
        let sent: u64 = self.flows.iter().map(|f| f.sent).sum();
        let delivered: u64 = self.flows.iter().map(|f| f.delivered).sum();
        let label = |id: NodeId| self.net.node(id).label.clone();
        MetricsReport {
            packets_sent: sent,
            packets_delivered: delivered,
            packets_lost: sent - delivered,
            pdr: compute_pdr(sent, delivered),
            control: self.net.counts,
            per_node_consumed: self.net.nodes().iter().map(|n| n.energy.consumed()).collect(),
            avg_energy_consumption_rate: compute_avg_energy_rate(self.net.nodes().iter().map(|n| &n.energy))
                .unwrap_or(0.0),
            paths_discovered: self.paths_discovered,
            discoveries: self.flows.iter().map(|f| f.discoveries).sum(),
            route_failures: self.flows.iter().map(|f| f.route_failures).sum(),
            dead_nodes: self.net.nodes().iter().filter(|n| !n.energy.is_alive()).count(),
            flows: self
                .flows
                .iter()
                .map(|f| FlowRecord {
                    source: label(f.source),
                    destination: label(f.destination),
                    sent: f.sent,
                    delivered: f.delivered,
                    pdr: compute_pdr(f.sent, f.delivered),
                    discoveries: f.discoveries,
                    route_failures: f.route_failures,
                    paths: f.paths.clone(),
                })
                .collect(),
            ledger: self.net.ledger,
            events_processed: self.events_processed,
            end_time: self.queue.now(),
        }
    }
}

fn tally_for<'a>(paths: &'a mut Vec<PathTally>, net: &Network, path: &Path) -> &'a mut PathTally {
    let labels: Vec<String> = path.nodes.iter().map(|&id| net.node(id).label.clone()).collect();
    match paths.iter().position(|t| t.nodes == labels) {
        Some(i) => &mut paths[i],
        None => {
            paths.push(PathTally { nodes: labels, stability: path.stability, sent: 0, delivered: 0 });
            paths.last_mut().expect("just pushed")
        }
    }
}

/// Validates `cfg`, builds its scenario and runs it to completion.
pub fn run(cfg: &SimConfig) -> Result<MetricsReport, ConfigError> {
    let mut sim = Simulation::new(cfg.clone())?;
    sim.run_to_end();
    Ok(sim.report())
}
