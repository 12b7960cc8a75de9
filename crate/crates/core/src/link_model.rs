//! Link expiration time prediction and the weighted link-stability score.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{KinematicsError, NodeKinematics};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkError {
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("nodes are {distance:.3} m apart, beyond range {range} m")]
    OutOfRange { distance: f64, range: f64 },
    #[error("residual fraction {0} outside [0, 1]")]
    Domain(f64),
    #[error("invalid stability config: {0}")]
    Config(String),
}

/// Predicted time until a link breaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LetResult {
    Finite(f64),
    /// Zero relative velocity: the pair never drifts apart.
    NeverExpires,
}

impl LetResult {
    pub fn seconds(self) -> f64 {
        match self {
            LetResult::Finite(s) => s,
            LetResult::NeverExpires => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityConfig {
    /// Weight on the residual-energy fraction.
    pub w1: f64,
    /// Weight on the normalized LET.
    pub w2: f64,
    /// LET at or above this many seconds scores as fully stable.
    pub let_cap: f64,
    pub theta_high: f64,
    pub theta_moderate: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig { w1: 0.5, w2: 0.5, let_cap: 100.0, theta_high: 0.7, theta_moderate: 0.4 }
    }
}

impl StabilityConfig {
    /// Validates thresholds and rescales the weights so they sum to one.
    pub fn new(
        w1: f64,
        w2: f64,
        let_cap: f64,
        theta_high: f64,
        theta_moderate: f64,
    ) -> Result<Self, LinkError> {
        StabilityConfig { w1, w2, let_cap, theta_high, theta_moderate }.normalized()
    }

    pub fn normalized(self) -> Result<Self, LinkError> {
        let StabilityConfig { w1, w2, let_cap, theta_high, theta_moderate } = self;
        if !(w1 >= 0.0 && w2 >= 0.0 && w1.is_finite() && w2.is_finite()) || w1 + w2 <= 0.0 {
            return Err(LinkError::Config(format!(
                "weights must be non-negative with a positive sum (w1={w1}, w2={w2})"
            )));
        }
        if !(let_cap.is_finite() && let_cap > 0.0) {
            return Err(LinkError::Config(format!("let_cap must be positive (got {let_cap})")));
        }
        if !(theta_high > 0.0 && theta_high <= 1.0) {
            return Err(LinkError::Config(format!("theta_high must lie in (0, 1] (got {theta_high})")));
        }
        if !(theta_moderate > 0.0 && theta_moderate < theta_high) {
            return Err(LinkError::Config(format!(
                "theta_moderate must lie in (0, theta_high) (got {theta_moderate})"
            )));
        }
        let sum = w1 + w2;
        if (sum - 1.0).abs() <= 1e-12 {
            return Ok(self);
        }
        Ok(StabilityConfig { w1: w1 / sum, w2: w2 / sum, ..self })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkAssessment {
    pub let_: LetResult,
    pub stability: f64,
}

/// Closed-form link expiration time for two nodes on straight-line courses.
///
/// Positions are the unreflected positions at `t`; pass snapshots from
/// [`NodeKinematics::snapshot_at`] to predict from a node's current state.
pub fn compute_let(
    n1: &NodeKinematics,
    n2: &NodeKinematics,
    t: f64,
    r: f64,
) -> Result<LetResult, LinkError> {
    let (x1, y1) = n1.unbounded_position_at(t)?;
    let (x2, y2) = n2.unbounded_position_at(t)?;
    let (v1x, v1y) = n1.velocity();
    let (v2x, v2y) = n2.velocity();

    let a = v1x - v2x;
    let b = x1 - x2;
    let c = v1y - v2y;
    let d = y1 - y2;

    let dist = b.hypot(d);
    if dist > r {
        return Err(LinkError::OutOfRange { distance: dist, range: r });
    }

    let rel_speed_sq = a * a + c * c;
    if rel_speed_sq == 0.0 {
        return Ok(LetResult::NeverExpires);
    }
    let cross = a * d - c * b;
    let scale = rel_speed_sq * r * r;
    let mut disc = scale - cross * cross;
    // an in-range pair always has a real chord; only rounding can push this negative
    debug_assert!(disc >= -1e-9 * scale.max(1.0), "discriminant {disc}");
    if disc < 0.0 {
        disc = 0.0;
    }
    let let_ = (-(a * b + c * d) + disc.sqrt()) / rel_speed_sq;
    Ok(LetResult::Finite(let_.max(0.0)))
}

pub fn normalize_let(l: LetResult, cfg: &StabilityConfig) -> f64 {
    match l {
        LetResult::NeverExpires => 1.0,
        LetResult::Finite(s) => s.min(cfg.let_cap) / cfg.let_cap,
    }
}

/// `w1 * residual_fraction + w2 * normalized_let`.
pub fn link_stability(
    re_fraction: f64,
    l: LetResult,
    cfg: &StabilityConfig,
) -> Result<LinkAssessment, LinkError> {
    if !(0.0..=1.0).contains(&re_fraction) {
        return Err(LinkError::Domain(re_fraction));
    }
    let stability = (cfg.w1 * re_fraction + cfg.w2 * normalize_let(l, cfg)).clamp(0.0, 1.0);
    Ok(LinkAssessment { let_: l, stability })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::NodeId;
    use proptest::prelude::*;

    fn node(id: u32, x: f64, y: f64, speed: f64, heading: f64) -> NodeKinematics {
        NodeKinematics::new(NodeId(id), (x, y), speed, heading, 0.0).unwrap()
    }

    #[test]
    fn head_on_and_separating() {
        let a = node(0, 0.0, 0.0, 10.0, 0.0);
        let b = node(1, 100.0, 0.0, 10.0, 180.0);
        match compute_let(&a, &b, 0.0, 200.0).unwrap() {
            LetResult::Finite(s) => assert!((s - 15.0).abs() < 1e-9, "{s}"),
            other => panic!("{other:?}"),
        }
        let a = node(0, 0.0, 0.0, 10.0, 180.0);
        let b = node(1, 100.0, 0.0, 10.0, 0.0);
        match compute_let(&a, &b, 0.0, 200.0).unwrap() {
            LetResult::Finite(s) => assert!((s - 5.0).abs() < 1e-9, "{s}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_relative_velocity_never_expires() {
        let a = node(0, 0.0, 0.0, 10.0, 45.0);
        let b = node(1, 50.0, 20.0, 10.0, 45.0);
        assert_eq!(compute_let(&a, &b, 0.0, 200.0).unwrap(), LetResult::NeverExpires);
        let a = NodeKinematics::stationary(NodeId(0), (0.0, 0.0));
        let b = NodeKinematics::stationary(NodeId(1), (10.0, 0.0));
        assert_eq!(compute_let(&a, &b, 0.0, 200.0).unwrap(), LetResult::NeverExpires);
    }

    #[test]
    fn out_of_range_pair_is_rejected() {
        let a = NodeKinematics::stationary(NodeId(0), (0.0, 0.0));
        let b = NodeKinematics::stationary(NodeId(1), (300.0, 0.0));
        assert!(matches!(compute_let(&a, &b, 0.0, 200.0), Err(LinkError::OutOfRange { .. })));
    }

    #[test]
    fn boundary_pair_moving_apart_expires_now() {
        let a = node(0, 0.0, 0.0, 0.0, 0.0);
        let b = node(1, 200.0, 0.0, 5.0, 0.0);
        assert_eq!(compute_let(&a, &b, 0.0, 200.0).unwrap(), LetResult::Finite(0.0));
    }

    #[test]
    fn normalization() {
        let cfg = StabilityConfig::default();
        assert_eq!(normalize_let(LetResult::Finite(50.0), &cfg), 0.5);
        assert_eq!(normalize_let(LetResult::NeverExpires, &cfg), 1.0);
        assert_eq!(normalize_let(LetResult::Finite(250.0), &cfg), 1.0);
    }

    #[test]
    fn stability_examples() {
        let cfg = StabilityConfig::default();
        let s = link_stability(1.0, LetResult::NeverExpires, &cfg).unwrap();
        assert_eq!(s.stability, 1.0);
        let s = link_stability(0.9, LetResult::Finite(50.0), &cfg).unwrap();
        assert!((s.stability - 0.7).abs() < 1e-12);
        let energy_only = StabilityConfig::new(1.0, 0.0, 100.0, 0.7, 0.4).unwrap();
        let s = link_stability(0.85, LetResult::Finite(3.0), &energy_only).unwrap();
        assert!((s.stability - 0.85).abs() < 1e-12);
        assert!(matches!(link_stability(1.2, LetResult::NeverExpires, &cfg), Err(LinkError::Domain(_))));
    }

    #[test]
    fn weights_are_renormalized() {
        let cfg = StabilityConfig::new(2.0, 6.0, 100.0, 0.7, 0.4).unwrap();
        assert_eq!((cfg.w1, cfg.w2), (0.25, 0.75));
        assert!(StabilityConfig::new(0.0, 0.0, 100.0, 0.7, 0.4).is_err());
        assert!(StabilityConfig::new(0.5, 0.5, 100.0, 0.4, 0.4).is_err());
        assert!(StabilityConfig::new(0.5, 0.5, 100.0, 1.1, 0.4).is_err());
        assert!(StabilityConfig::new(0.5, 0.5, 0.0, 0.7, 0.4).is_err());
    }

    fn arb_let() -> impl Strategy<Value = LetResult> {
        prop_oneof![
            (0.0..500.0f64).prop_map(LetResult::Finite),
            Just(LetResult::NeverExpires),
        ]
    }

    proptest! {
        #[test]
        fn stability_in_unit_interval(re in 0.0..=1.0f64, l in arb_let(), w1 in 0.0..1.0f64, cap in 1.0..500.0f64) {
            let cfg = StabilityConfig::new(w1, 1.0 - w1 + 1e-3, cap, 0.7, 0.4).unwrap();
            let s = link_stability(re, l, &cfg).unwrap().stability;
            prop_assert!((0.0..=1.0).contains(&s));
        }

        #[test]
        fn stability_is_monotone(re in 0.0..=1.0f64, dre in 0.0..=1.0f64, l in 0.0..300.0f64, dl in 0.0..300.0f64) {
            let cfg = StabilityConfig::default();
            let re2 = (re + dre).min(1.0);
            let base = link_stability(re, LetResult::Finite(l), &cfg).unwrap().stability;
            prop_assert!(link_stability(re2, LetResult::Finite(l), &cfg).unwrap().stability >= base);
            prop_assert!(link_stability(re, LetResult::Finite(l + dl), &cfg).unwrap().stability >= base);
            prop_assert!(link_stability(re, LetResult::NeverExpires, &cfg).unwrap().stability >= base);
        }

        #[test]
        fn let_is_symmetric(
            x1 in 0.0..500.0f64, y1 in 0.0..500.0f64, s1 in 0.0..20.0f64, h1 in 0.0..360.0f64,
            dx in -140.0..140.0f64, dy in -140.0..140.0f64, s2 in 0.0..20.0f64, h2 in 0.0..360.0f64,
        ) {
            let a = node(0, x1, y1, s1, h1);
            let b = node(1, x1 + dx, y1 + dy, s2, h2);
            let ab = compute_let(&a, &b, 0.0, 200.0).unwrap().seconds();
            let ba = compute_let(&b, &a, 0.0, 200.0).unwrap().seconds();
            // swapping negates every intermediate, so the result is bit-identical
            prop_assert_eq!(ab, ba);
        }
    }
}
