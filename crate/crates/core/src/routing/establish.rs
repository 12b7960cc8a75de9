//! Neighbour discovery, forwarding-set selection and the RREQ/RREP exchange.

use std::collections::BTreeMap;

use super::{
    by_stability_desc, EnergyReading, HelloMsg, Path, ProtocolConfig, ReplyHelloMsg, RequestId,
    RoutingError, RreqMsg, RrepMsg,
};
use crate::event::EventQueue;
use crate::kinematics::{NodeId, NodeKinematics};
use crate::link_model::{compute_let, link_stability, LinkAssessment, LinkError, StabilityConfig};
use crate::network::Network;

/// Frozen view of the network at the start of a discovery: every node's
/// current trajectory and residual fraction. Link scores for the whole wave
/// are computed against it.
#[derive(Debug, Clone)]
pub struct LinkView {
    pub time: f64,
    pub range: f64,
    motion: Vec<NodeKinematics>,
    residual: Vec<f64>,
}

impl LinkView {
    pub fn capture(net: &Network, t: f64) -> Self {
        let motion = net
            .nodes()
            .iter()
            .map(|n| n.motion.snapshot_at(t, &net.terrain).expect("discovery before node reference time"))
            .collect();
        let residual = net.nodes().iter().map(|n| n.energy.residual_fraction()).collect();
        LinkView { time: t, range: net.range, motion, residual }
    }

    pub fn motion(&self, id: NodeId) -> &NodeKinematics {
        &self.motion[id.index()]
    }

    pub fn residual_fraction(&self, id: NodeId) -> f64 {
        self.residual[id.index()]
    }

    pub fn in_range(&self, a: NodeId, b: NodeId) -> bool {
        let (pa, pb) = (self.motion(a), self.motion(b));
        (pa.x0 - pb.x0).hypot(pa.y0 - pb.y0) <= self.range
    }

    /// Score of the link `sender -> receiver` as computed by the receiver of a Hello.
    pub fn assess(
        &self,
        sender: NodeId,
        receiver: NodeId,
        reading: EnergyReading,
        cfg: &StabilityConfig,
    ) -> Result<LinkAssessment, LinkError> {
        let let_ = compute_let(self.motion(sender), self.motion(receiver), self.time, self.range)?;
        let re = match reading {
            EnergyReading::Receiver => self.residual_fraction(receiver),
            EnergyReading::Sender => self.residual_fraction(sender),
            EnergyReading::Min => self.residual_fraction(sender).min(self.residual_fraction(receiver)),
        };
        link_stability(re, let_, cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: NodeId,
    pub assessment: LinkAssessment,
}

/// Hello broadcast from `node` and the Reply_Hello round that follows.
///
/// Every message is charged to its sender (tx) and receiver (rx). Returns
/// the live neighbours with their link scores, ordered by id.
pub fn discover_neighbors(
    net: &mut Network,
    view: &LinkView,
    node: NodeId,
    cfg: &ProtocolConfig,
) -> Result<Vec<Neighbor>, RoutingError> {
    if !net.is_alive(node) {
        return Err(RoutingError::SenderDead(node));
    }
    let me = view.motion(node);
    let hello = HelloMsg {
        sender: node,
        position: (me.x0, me.y0),
        speed: me.speed,
        heading: me.heading,
        sent_at: view.time,
    };
    net.counts.hello += 1;
    if !net.transmit(node, cfg.message_bits.hello).completed {
        return Err(RoutingError::SenderDead(node));
    }

    let receivers: Vec<NodeId> = net
        .ids()
        .filter(|&id| id != node && net.is_alive(id) && view.in_range(hello.sender, id))
        .collect();
    let mut out = Vec::with_capacity(receivers.len());
    for id in receivers {
        if !net.receive(id, cfg.message_bits.hello).completed {
            continue;
        }
        let assessment = view
            .assess(hello.sender, id, cfg.energy_reading, &cfg.stability)
            .expect("in-range pair with a valid residual fraction");
        let reply = ReplyHelloMsg { responder: id, link_stability: assessment.stability };
        net.counts.reply_hello += 1;
        if !net.transmit(reply.responder, cfg.message_bits.reply_hello).completed {
            continue;
        }
        if !net.receive(node, cfg.message_bits.reply_hello).completed {
            return Err(RoutingError::SenderDead(node));
        }
        out.push(Neighbor { id: reply.responder, assessment });
    }
    Ok(out)
}

/// Picks the neighbours a discovery wave continues through:
/// the best one when its score reaches `theta_high`, the best two when it
/// reaches `theta_moderate`, and everyone otherwise. Result is ordered by
/// score, ties to the smaller id.
pub fn select_forwarding_set(
    neighbors: &[(NodeId, f64)],
    cfg: &StabilityConfig,
) -> Result<Vec<NodeId>, RoutingError> {
    let mut ranked = neighbors.to_vec();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let best = ranked.first().ok_or(RoutingError::DeadEnd)?.1;
    let take = if best >= cfg.theta_high {
        1
    } else if best >= cfg.theta_moderate {
        2
    } else {
        ranked.len()
    };
    Ok(ranked.into_iter().take(take).map(|(id, _)| id).collect())
}

/// Appends `next` to the RREQ and folds `link` into its stability product.
pub fn extend_rreq(rreq: &RreqMsg, link: f64, next: NodeId) -> Result<RreqMsg, RoutingError> {
    if rreq.partial_path.contains(&next) {
        return Err(RoutingError::Loop { next });
    }
    let mut partial_path = rreq.partial_path.clone();
    partial_path.push(next);
    Ok(RreqMsg {
        request_id: rreq.request_id,
        source: rreq.source,
        next,
        partial_path,
        partial_path_stability: rreq.partial_path_stability * link,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RreqVerdict {
    Accept,
    Discard,
}

/// Per-node record of the best RREQ stability seen for each request.
#[derive(Debug, Clone, Default)]
pub struct RreqFilter {
    best: BTreeMap<RequestId, f64>,
}

impl RreqFilter {
    pub fn best_seen(&self, request: RequestId) -> Option<f64> {
        self.best.get(&request).copied()
    }
}

/// First RREQ of a request is accepted; later ones only if strictly more stable.
pub fn accept_rreq(filter: &mut RreqFilter, rreq: &RreqMsg) -> RreqVerdict {
    match filter.best.get(&rreq.request_id) {
        Some(&best) if rreq.partial_path_stability <= best => RreqVerdict::Discard,
        _ => {
            filter.best.insert(rreq.request_id, rreq.partial_path_stability);
            RreqVerdict::Accept
        }
    }
}

/// A node forwarding an accepted RREQ during a discovery.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardRecord {
    pub time: f64,
    pub node: NodeId,
    /// Partial-path stability of the accepted RREQ, before extension.
    pub stability: f64,
    pub targets: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discovery {
    pub request_id: RequestId,
    /// Paths the destination kept, most stable first.
    pub enlisted: Vec<Path>,
    /// Enlisted paths whose RREP made it back to the source.
    pub paths: Vec<Path>,
    /// Time the last successful RREP reached the source.
    pub completed_at: f64,
    pub forwarded: Vec<ForwardRecord>,
}

struct Arrival {
    from: NodeId,
    rreq: RreqMsg,
}

/// Breadth-first Hello wave from `source`: each node taken off the frontier
/// broadcasts a Hello and records its neighbour set, and newly heard nodes
/// join the next layer. Stops when the destination comes up as the current
/// node. Returns the per-node neighbour sets and the number of layers that
/// broadcast.
pub fn route_discovery(
    net: &mut Network,
    view: &LinkView,
    source: NodeId,
    destination: NodeId,
    cfg: &ProtocolConfig,
) -> (Vec<Option<Vec<Neighbor>>>, usize) {
    let n = net.len();
    let mut sets: Vec<Option<Vec<Neighbor>>> = vec![None; n];
    let mut queued = vec![false; n];
    queued[source.index()] = true;
    let mut frontier = vec![source];
    let mut layers = 0;
    while !frontier.is_empty() {
        layers += 1;
        let mut next = Vec::new();
        for &current in &frontier {
            if current == destination {
                return (sets, layers - 1);
            }
            let found = discover_neighbors(net, view, current, cfg).unwrap_or_default();
            for nb in &found {
                if !queued[nb.id.index()] {
                    queued[nb.id.index()] = true;
                    next.push(nb.id);
                }
            }
            sets[current.index()] = Some(found);
        }
        frontier = next;
    }
    (sets, layers)
}

/// Runs one route discovery plus RREQ establishment wave from `source`.
///
/// Link scores come from a snapshot taken at `now`. The RREQ wave is
/// simulated on its own clock once the Hello wave is over; each RREQ hop
/// takes `hop_latency` and the destination stops listening when the
/// collection window closes. RREPs then travel back hop by hop. Nodes the
/// RREQ wave reaches beyond the Hello wave run their own neighbour discovery.
pub fn establish_routes(
    net: &mut Network,
    source: NodeId,
    destination: NodeId,
    cfg: &ProtocolConfig,
    now: f64,
    request_id: RequestId,
) -> Result<Discovery, RoutingError> {
    if !net.is_alive(source) {
        return Err(RoutingError::SenderDead(source));
    }
    let failure = RoutingError::RouteFailure { origin: source, destination };
    let n = net.len();
    let hop_budget = cfg.hop_budget_for(n);
    let latency = cfg.hop_latency;
    let view = LinkView::capture(net, now);

    let (mut neighbor_sets, layers) = route_discovery(net, &view, source, destination, cfg);
    // each Hello layer costs a Hello hop plus a Reply_Hello hop
    let start = now + 2.0 * layers as f64 * latency;
    let deadline = start + cfg.window_for(n);
    let mut filters: Vec<RreqFilter> = vec![RreqFilter::default(); n];
    let mut arrived: Vec<Path> = Vec::new();
    let mut forwarded = Vec::new();

    let mut queue = EventQueue::new(start);
    queue.schedule(start, Arrival { from: source, rreq: RreqMsg::originate(request_id, source) });

    while let Some((t, Arrival { from, rreq })) = queue.pop() {
        if t > deadline {
            break;
        }
        let at = rreq.next;
        if from != at {
            if !net.is_alive(at) || !net.connected(from, at, t) {
                continue;
            }
            if !net.receive(at, cfg.message_bits.rreq).completed {
                continue;
            }
        }
        if at == destination {
            arrived.push(rreq.into_path());
            continue;
        }
        if accept_rreq(&mut filters[at.index()], &rreq) == RreqVerdict::Discard {
            net.counts.rreq_discarded += 1;
            continue;
        }
        if rreq.partial_path.len() > hop_budget {
            continue;
        }

        let neighbors = neighbor_sets[at.index()]
            .get_or_insert_with(|| discover_neighbors(net, &view, at, cfg).unwrap_or_default());
        let candidates: Vec<(NodeId, f64)> = neighbors
            .iter()
            .filter(|nb| !rreq.partial_path.contains(&nb.id))
            .map(|nb| (nb.id, nb.assessment.stability))
            .collect();
        let Ok(selected) = select_forwarding_set(&candidates, &cfg.stability) else {
            continue;
        };

        let mut record = ForwardRecord { time: t, node: at, stability: rreq.partial_path_stability, targets: vec![] };
        for next in selected {
            let link = candidates.iter().find(|c| c.0 == next).map(|c| c.1).expect("selected from candidates");
            let ext = match extend_rreq(&rreq, link, next) {
                Ok(m) => m,
                Err(_) => {
                    net.counts.rreq_loop_drops += 1;
                    continue;
                }
            };
            net.counts.rreq += 1;
            if !net.transmit(at, cfg.message_bits.rreq).completed {
                break;
            }
            record.targets.push(next);
            queue.schedule(t + latency, Arrival { from: at, rreq: ext });
        }
        if !record.targets.is_empty() {
            forwarded.push(record);
        }
    }

    arrived.sort_by(by_stability_desc);
    arrived.dedup_by(|a, b| a.nodes == b.nodes);
    arrived.truncate(cfg.max_paths);
    if arrived.is_empty() {
        return Err(failure);
    }

    let mut paths = Vec::new();
    let mut completed_at = deadline;
    for path in &arrived {
        let rrep = RrepMsg { request_id, path: path.clone() };
        if let Some(t) = return_rrep(net, &rrep, deadline, cfg) {
            completed_at = completed_at.max(t);
            paths.push(path.clone());
        }
    }
    if paths.is_empty() {
        return Err(failure);
    }
    Ok(Discovery { request_id, enlisted: arrived, paths, completed_at, forwarded })
}

/// Carries an RREP from the destination back to the source. Returns the
/// arrival time at the source, or `None` if a hop failed.
fn return_rrep(net: &mut Network, rrep: &RrepMsg, start: f64, cfg: &ProtocolConfig) -> Option<f64> {
    let mut t = start;
    for hop in rrep.path.nodes.windows(2).rev() {
        let (to, from) = (hop[0], hop[1]);
        if !net.is_alive(from) {
            return None;
        }
        net.counts.rrep += 1;
        if !net.transmit(from, cfg.message_bits.rrep).completed {
            return None;
        }
        t += cfg.hop_latency;
        if !net.is_alive(to) || !net.connected(from, to, t) {
            return None;
        }
        if !net.receive(to, cfg.message_bits.rrep).completed {
            return None;
        }
    }
    Some(t)
}
