use proptest::prelude::*;

use super::*;
use crate::energy::{EnergyModel, EnergyState};
use crate::kinematics::{NodeKinematics, Terrain};
use crate::link_model::LetResult;
use crate::network::Node;

/// (x, y, speed, heading, residual fraction)
type Spec = (f64, f64, f64, f64, f64);

fn net(specs: &[Spec]) -> Network {
    let nodes = specs
        .iter()
        .enumerate()
        .map(|(i, &(x, y, speed, heading, re))| {
            let id = NodeId(i as u32);
            Node {
                id,
                label: format!("n{i}"),
                motion: NodeKinematics::new(id, (x, y), speed, heading, 0.0).unwrap(),
                energy: EnergyState::with_residual_fraction(5.0, re).unwrap(),
            }
        })
        .collect();
    Network::new(Terrain::default(), 200.0, EnergyModel::MICA2, nodes)
}

fn ids(v: &[u32]) -> Vec<NodeId> {
    v.iter().map(|&i| NodeId(i)).collect()
}

fn cfg() -> ProtocolConfig {
    ProtocolConfig::default()
}

#[test]
fn forwarding_set_examples() {
    let s = StabilityConfig::default();
    let a = |v: &[(u32, f64)]| v.iter().map(|&(i, x)| (NodeId(i), x)).collect::<Vec<_>>();
    assert_eq!(select_forwarding_set(&a(&[(0, 0.9), (1, 0.5)]), &s).unwrap(), ids(&[0]));
    assert_eq!(select_forwarding_set(&a(&[(0, 0.6), (1, 0.5), (2, 0.2)]), &s).unwrap(), ids(&[0, 1]));
    assert_eq!(select_forwarding_set(&a(&[(0, 0.3), (1, 0.2)]), &s).unwrap(), ids(&[0, 1]));
    assert_eq!(select_forwarding_set(&[], &s), Err(RoutingError::DeadEnd));
}

#[test]
fn forwarding_set_orders_by_score_then_id() {
    let s = StabilityConfig::default();
    let set = [(NodeId(5), 0.5), (NodeId(2), 0.5), (NodeId(9), 0.5)];
    assert_eq!(select_forwarding_set(&set, &s).unwrap(), ids(&[2, 5]));
    let set = [(NodeId(4), 0.1), (NodeId(1), 0.3), (NodeId(3), 0.3)];
    assert_eq!(select_forwarding_set(&set, &s).unwrap(), ids(&[1, 3, 4]));
}

#[test]
fn forwarding_set_cardinality_around_thresholds() {
    let s = StabilityConfig::default();
    let eps = 1e-9;
    let bests = [0.0, 0.1, 0.4 - eps, 0.4, 0.4 + eps, 0.55, 0.7 - eps, 0.7, 0.7 + eps, 0.95, 1.0];
    for &best in &bests {
        for n in 1..=5u32 {
            let mut nb = vec![(NodeId(0), best)];
            nb.extend((1..n).map(|i| (NodeId(i), best * i as f64 / (n as f64 + 1.0))));
            let got = select_forwarding_set(&nb, &s).unwrap();
            let want = if best >= 0.7 {
                1
            } else if best >= 0.4 {
                2.min(n as usize)
            } else {
                n as usize
            };
            assert_eq!(got.len(), want, "best {best} with {n} neighbours");
            assert_eq!(got[0], NodeId(0));
        }
    }
}

#[test]
fn extend_rreq_examples() {
    let s = RreqMsg::originate(RequestId(3), NodeId(0));
    let x = extend_rreq(&s, 0.8, NodeId(1)).unwrap();
    assert_eq!(x.partial_path, ids(&[0, 1]));
    assert_eq!(x.partial_path_stability, 0.8);
    assert_eq!(x.next, NodeId(1));
    let y = extend_rreq(&x, 0.9, NodeId(2)).unwrap();
    assert_eq!(y.partial_path, ids(&[0, 1, 2]));
    assert!((y.partial_path_stability - 0.72).abs() < 1e-12);
    assert_eq!(extend_rreq(&y, 0.5, NodeId(1)), Err(RoutingError::Loop { next: NodeId(1) }));
}

#[test]
fn accept_rreq_examples() {
    let mut f = RreqFilter::default();
    let msg = |req: u64, s: f64| RreqMsg { partial_path_stability: s, ..RreqMsg::originate(RequestId(req), NodeId(0)) };
    assert_eq!(accept_rreq(&mut f, &msg(1, 0.5)), RreqVerdict::Accept);
    assert_eq!(accept_rreq(&mut f, &msg(1, 0.7)), RreqVerdict::Accept);
    assert_eq!(f.best_seen(RequestId(1)), Some(0.7));
    assert_eq!(accept_rreq(&mut f, &msg(1, 0.5)), RreqVerdict::Discard);
    assert_eq!(accept_rreq(&mut f, &msg(1, 0.7)), RreqVerdict::Discard);
    assert_eq!(accept_rreq(&mut f, &msg(2, 0.1)), RreqVerdict::Accept);
}

#[test]
fn isolated_node_has_no_neighbours() {
    let mut n = net(&[(10.0, 10.0, 0.0, 0.0, 1.0), (400.0, 400.0, 0.0, 0.0, 1.0)]);
    let view = LinkView::capture(&n, 0.0);
    assert!(discover_neighbors(&mut n, &view, NodeId(0), &cfg()).unwrap().is_empty());
    assert_eq!((n.counts.hello, n.counts.reply_hello), (1, 0));
    assert!((n.node(NodeId(0)).energy.consumed() - 128.0 * 0.312e-6).abs() < 1e-15);
    assert_eq!(n.node(NodeId(1)).energy.consumed(), 0.0);
}

#[test]
fn neighbour_scores_match_hand_evaluation() {
    // Node 1 is parked (LET never expires) with 80% energy: 0.5*0.8 + 0.5*1 = 0.9.
    // Node 2 drifts away at 5 m/s from 50 m: LET = 150/5 = 30 s, so 0.5*0.5 + 0.5*0.3 = 0.4.
    let mut n = net(&[
        (250.0, 250.0, 0.0, 0.0, 1.0),
        (150.0, 250.0, 0.0, 0.0, 0.8),
        (300.0, 250.0, 5.0, 0.0, 0.5),
    ]);
    let view = LinkView::capture(&n, 0.0);
    let got = discover_neighbors(&mut n, &view, NodeId(0), &cfg()).unwrap();
    assert_eq!(got.iter().map(|g| g.id).collect::<Vec<_>>(), ids(&[1, 2]));
    assert!((got[0].assessment.stability - 0.9).abs() < 1e-12);
    assert!((got[1].assessment.stability - 0.4).abs() < 1e-12);
    assert_eq!(got[0].assessment.let_, LetResult::NeverExpires);
    assert_eq!((n.counts.hello, n.counts.reply_hello), (1, 2));
}

#[test]
fn dead_neighbour_is_excluded() {
    let mut n = net(&[(250.0, 250.0, 0.0, 0.0, 1.0), (150.0, 250.0, 0.0, 0.0, 0.0), (300.0, 250.0, 0.0, 0.0, 1.0)]);
    let view = LinkView::capture(&n, 0.0);
    let got = discover_neighbors(&mut n, &view, NodeId(0), &cfg()).unwrap();
    assert_eq!(got.iter().map(|g| g.id).collect::<Vec<_>>(), ids(&[2]));
    assert_eq!(n.node(NodeId(1)).energy.consumed(), 5.0);
}

#[test]
fn dead_sender_cannot_discover() {
    let mut n = net(&[(250.0, 250.0, 0.0, 0.0, 0.0), (150.0, 250.0, 0.0, 0.0, 1.0)]);
    let view = LinkView::capture(&n, 0.0);
    assert_eq!(discover_neighbors(&mut n, &view, NodeId(0), &cfg()), Err(RoutingError::SenderDead(NodeId(0))));
    assert_eq!(n.counts.hello, 0);
}

#[test]
fn one_hop_route() {
    let mut n = net(&[(200.0, 200.0, 0.0, 0.0, 1.0), (300.0, 200.0, 0.0, 0.0, 0.8)]);
    let d = establish_routes(&mut n, NodeId(0), NodeId(1), &cfg(), 0.0, RequestId(0)).unwrap();
    assert_eq!(d.paths.len(), 1);
    assert_eq!(d.paths[0].nodes, ids(&[0, 1]));
    assert!((d.paths[0].stability - 0.9).abs() < 1e-12);
    assert_eq!(d.enlisted, d.paths);
}

#[test]
fn partitioned_network_fails() {
    let mut n = net(&[(10.0, 10.0, 0.0, 0.0, 1.0), (100.0, 10.0, 0.0, 0.0, 1.0), (490.0, 490.0, 0.0, 0.0, 1.0)]);
    assert_eq!(
        establish_routes(&mut n, NodeId(0), NodeId(2), &cfg(), 0.0, RequestId(0)),
        Err(RoutingError::RouteFailure { origin: NodeId(0), destination: NodeId(2) })
    );
}

#[test]
fn line_topology_control_counts() {
    let mut n = net(&[(50.0, 250.0, 0.0, 0.0, 1.0), (200.0, 250.0, 0.0, 0.0, 1.0), (350.0, 250.0, 0.0, 0.0, 1.0)]);
    let d = establish_routes(&mut n, NodeId(0), NodeId(2), &cfg(), 0.0, RequestId(0)).unwrap();
    assert_eq!(d.paths[0].nodes, ids(&[0, 1, 2]));
    let c = n.counts;
    assert_eq!((c.hello, c.reply_hello, c.rreq, c.rrep), (2, 3, 2, 2));
    // two Hello layers, two RREQ hops and two RREP hops at 1 ms each
    let window = cfg().window_for(3);
    assert!((d.completed_at - (0.004 + window + 0.002)).abs() < 1e-12, "{}", d.completed_at);
}

#[test]
fn keeps_the_most_stable_paths() {
    // A diamond 0-{1,2,3}-4 where each relay's energy sets its rank.
    let mut n = net(&[
        (100.0, 250.0, 0.0, 0.0, 1.0),
        (250.0, 120.0, 0.0, 0.0, 0.3),
        (250.0, 250.0, 0.0, 0.0, 0.2),
        (250.0, 380.0, 0.0, 0.0, 0.1),
        (400.0, 250.0, 0.0, 0.0, 1.0),
    ]);
    let pc = ProtocolConfig { max_paths: 2, ..cfg() };
    let d = establish_routes(&mut n, NodeId(0), NodeId(4), &pc, 0.0, RequestId(0)).unwrap();
    let got: Vec<_> = d.paths.iter().map(|p| p.nodes.clone()).collect();
    assert_eq!(got, vec![ids(&[0, 1, 4]), ids(&[0, 2, 4])]);
    assert!((d.paths[0].stability - 0.65).abs() < 1e-12);
    assert!((d.paths[1].stability - 0.6).abs() < 1e-12);
}

fn two_paths() -> Vec<Path> {
    vec![
        Path { nodes: ids(&[0, 1]), stability: 0.9 },
        Path { nodes: ids(&[0, 2, 1]), stability: 0.5 },
    ]
}

#[test]
fn round_robin_splits() {
    let mut n = net(&[(100.0, 100.0, 0.0, 0.0, 1.0), (250.0, 100.0, 0.0, 0.0, 1.0), (175.0, 150.0, 0.0, 0.0, 1.0)]);
    let r = distribute_data(&mut n, &two_paths(), 10, 0, 0.0, 0.1, &cfg()).unwrap();
    assert_eq!(r.per_path.iter().map(|p| p.sent).collect::<Vec<_>>(), vec![5, 5]);
    assert_eq!(r.delivered(), 10);

    let mut three = two_paths();
    three.push(Path { nodes: ids(&[0, 2, 1]), stability: 0.4 });
    let r = distribute_data(&mut n, &three, 10, 0, 0.0, 0.1, &cfg()).unwrap();
    assert_eq!(r.per_path.iter().map(|p| p.sent).collect::<Vec<_>>(), vec![4, 3, 3]);

    // rotation continues from the given index
    let r = distribute_data(&mut n, &two_paths(), 1, 7, 0.0, 0.1, &cfg()).unwrap();
    assert_eq!(r.packets[0].path, 1);

    assert_eq!(distribute_data(&mut n, &[], 1, 0, 0.0, 0.1, &cfg()), Err(RoutingError::NoPaths));
}

#[test]
fn data_hops_charge_both_ends() {
    let mut n = net(&[(100.0, 100.0, 0.0, 0.0, 1.0), (250.0, 100.0, 0.0, 0.0, 1.0), (175.0, 150.0, 0.0, 0.0, 1.0)]);
    let path = Path { nodes: ids(&[0, 2, 1]), stability: 0.5 };
    distribute_data(&mut n, &[path], 1, 0, 0.0, 0.1, &cfg()).unwrap();
    let e = |i: u32| n.node(NodeId(i)).energy.consumed();
    assert!((e(0) - 1024.0 * 0.312e-6).abs() < 1e-15);
    assert!((e(2) - 1024.0 * (0.312e-6 + 0.234e-6)).abs() < 1e-15);
    assert!((e(1) - 1024.0 * 0.234e-6).abs() < 1e-15);
}

#[test]
fn losses_begin_when_the_link_expires() {
    // Destination recedes from the relay at 5 m/s starting 150 m away: LET = (200-150)/5 = 10 s.
    let mut n = net(&[(100.0, 250.0, 0.0, 0.0, 1.0), (250.0, 250.0, 0.0, 0.0, 1.0), (400.0, 250.0, 5.0, 0.0, 1.0)]);
    let path = Path { nodes: ids(&[0, 1, 2]), stability: 1.0 };
    let r = distribute_data(&mut n, &[path], 200, 0, 0.0, 0.1, &cfg()).unwrap();
    let first_lost = r.packets.iter().find(|p| !p.delivered).expect("link breaks within the run");
    assert!(r.packets.iter().filter(|p| p.departed_at < first_lost.departed_at).all(|p| p.delivered));
    assert!(r.packets.iter().filter(|p| p.departed_at > first_lost.departed_at).all(|p| !p.delivered));
    assert!((first_lost.departed_at - 10.0).abs() <= 0.1 + 1e-9, "{}", first_lost.departed_at);
    assert!(r.delivered() < 200);
}

#[test]
fn cache_hit_then_expiry() {
    let mut n = net(&[(50.0, 250.0, 0.0, 0.0, 1.0), (200.0, 250.0, 0.0, 0.0, 1.0), (350.0, 250.0, 0.0, 0.0, 1.0)]);
    let mut router = Router::new();
    let req = SendRequest { source: NodeId(0), destination: NodeId(2), packets: 3, first_packet_index: 0, interval: 0.1 };
    let c = cfg();

    let first = router.amr_send(&mut n, req, &c, 0.0).unwrap();
    assert_eq!((first.control.hello, first.control.reply_hello, first.control.rreq, first.control.rrep), (2, 3, 2, 2));
    assert_eq!(first.discovered.len(), 1);
    assert_eq!(router.cache.len(), 1);
    assert_eq!(router.cache.entries()[0].expires_at, 10.0);

    let second = router.amr_send(&mut n, req, &c, 5.0).unwrap();
    assert_eq!(second.control, ControlCounts::default());
    assert!(second.discovered.is_empty());
    assert_eq!(second.delivery.delivered(), 3);

    let third = router.amr_send(&mut n, req, &c, 10.0).unwrap();
    assert_eq!((third.control.hello, third.control.reply_hello, third.control.rreq, third.control.rrep), (2, 3, 2, 2));
    assert_eq!(router.cache.len(), 1);
}

#[test]
fn single_mode_uses_only_the_best_path() {
    let mut n = net(&[
        (100.0, 250.0, 0.0, 0.0, 1.0),
        (250.0, 120.0, 0.0, 0.0, 0.3),
        (250.0, 250.0, 0.0, 0.0, 0.2),
        (250.0, 380.0, 0.0, 0.0, 0.1),
        (400.0, 250.0, 0.0, 0.0, 1.0),
    ]);
    let c = ProtocolConfig { mode: RoutingMode::Single, ..cfg() };
    let req = SendRequest { source: NodeId(0), destination: NodeId(4), packets: 6, first_packet_index: 0, interval: 0.1 };
    let out = Router::new().amr_send(&mut n, req, &c, 0.0).unwrap();
    assert_eq!(out.discovered.len(), 2);
    assert_eq!(out.delivery.per_path.len(), 1);
    assert_eq!(out.delivery.per_path[0].path.nodes, ids(&[0, 1, 4]));
}

#[test]
fn dead_source_is_rejected() {
    let mut n = net(&[(50.0, 250.0, 0.0, 0.0, 0.0), (200.0, 250.0, 0.0, 0.0, 1.0)]);
    let req = SendRequest { source: NodeId(0), destination: NodeId(1), packets: 1, first_packet_index: 0, interval: 0.1 };
    assert_eq!(Router::new().amr_send(&mut n, req, &cfg(), 0.0), Err(RoutingError::SenderDead(NodeId(0))));
}

fn arb_specs() -> impl Strategy<Value = Vec<Spec>> {
    prop::collection::vec(
        (0.0..500.0f64, 0.0..500.0f64, 0.0..20.0f64, 0.0..360.0f64, 0.05..1.0f64),
        3..10,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn discovered_paths_are_sound(specs in arb_specs(), t in 0.0..20.0f64) {
        let mut n = net(&specs);
        let dst = NodeId(specs.len() as u32 - 1);
        let view = LinkView::capture(&n, t);
        let c = cfg();
        let Ok(d) = establish_routes(&mut n, NodeId(0), dst, &c, t, RequestId(0)) else { return Ok(()) };
        prop_assert!(d.enlisted.len() <= c.max_paths);
        for p in &d.enlisted {
            prop_assert!(p.is_simple());
            prop_assert_eq!(p.source(), NodeId(0));
            prop_assert_eq!(p.destination(), dst);
            let mut product = 1.0;
            for hop in p.nodes.windows(2) {
                let link = view.assess(hop[0], hop[1], c.energy_reading, &c.stability).unwrap().stability;
                prop_assert!(link <= 1.0);
                let next = product * link;
                prop_assert!(next <= product);
                product = next;
            }
            prop_assert!((p.stability - product).abs() <= 1e-9 * product.max(1e-300));
        }
        for w in d.enlisted.windows(2) {
            prop_assert!(w[0].stability >= w[1].stability);
        }
    }

    #[test]
    fn forwarded_stability_strictly_increases_per_node(specs in arb_specs()) {
        let mut n = net(&specs);
        let dst = NodeId(specs.len() as u32 - 1);
        let mut c = cfg();
        c.stability.theta_high = 1.0;
        c.stability.theta_moderate = 0.999;
        let Ok(d) = establish_routes(&mut n, NodeId(0), dst, &c, 0.0, RequestId(0)) else { return Ok(()) };
        for node in 0..specs.len() as u32 {
            let seq: Vec<&ForwardRecord> = d.forwarded.iter().filter(|r| r.node == NodeId(node)).collect();
            for w in seq.windows(2) {
                prop_assert!(w[0].time <= w[1].time);
                prop_assert!(w[1].stability > w[0].stability);
            }
        }
    }
}
