//! Constant-velocity node motion on a bounded terrain.
//!
//! Nodes move in straight lines and bounce off the terrain edges with
//! specular reflection. Positions are evaluated analytically, so any
//! simulated instant can be queried without stepping.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("query time {requested} s precedes reference time {reference} s")]
    TemporalOrder { requested: f64, reference: f64 },
    #[error("invalid {field}: {value}")]
    Invalid { field: &'static str, value: f64 },
}

/// Opaque node identifier. Ordering is used for deterministic tie-breaking.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Terrain {
    pub width: f64,
    pub height: f64,
}

impl Terrain {
    pub fn new(width: f64, height: f64) -> Result<Self, KinematicsError> {
        if !(width.is_finite() && width > 0.0) {
            return Err(KinematicsError::Invalid { field: "width", value: width });
        }
        if !(height.is_finite() && height > 0.0) {
            return Err(KinematicsError::Invalid { field: "height", value: height });
        }
        Ok(Terrain { width, height })
    }

    pub fn contains(&self, (x, y): (f64, f64)) -> bool {
        (0.0..=self.width).contains(&x) && (0.0..=self.height).contains(&y)
    }
}

impl Default for Terrain {
    fn default() -> Self {
        Terrain { width: 500.0, height: 500.0 }
    }
}

/// Straight-line motion of one node, anchored at reference time `t0`.
///
/// `heading` is in degrees, counter-clockwise from the +x axis, kept in `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeKinematics {
    pub id: NodeId,
    pub x0: f64,
    pub y0: f64,
    pub speed: f64,
    pub heading: f64,
    pub t0: f64,
}

impl NodeKinematics {
    pub fn new(
        id: NodeId,
        (x0, y0): (f64, f64),
        speed: f64,
        heading: f64,
        t0: f64,
    ) -> Result<Self, KinematicsError> {
        if !(speed.is_finite() && speed >= 0.0) {
            return Err(KinematicsError::Invalid { field: "speed", value: speed });
        }
        for (field, value) in [("x", x0), ("y", y0), ("heading", heading), ("t0", t0)] {
            if !value.is_finite() {
                return Err(KinematicsError::Invalid { field, value });
            }
        }
        Ok(NodeKinematics { id, x0, y0, speed, heading: normalize_heading(heading), t0 })
    }

    pub fn stationary(id: NodeId, pos: (f64, f64)) -> Self {
        NodeKinematics { id, x0: pos.0, y0: pos.1, speed: 0.0, heading: 0.0, t0: 0.0 }
    }

    /// Velocity components (m/s) along the reference heading.
    pub fn velocity(&self) -> (f64, f64) {
        let rad = self.heading.to_radians();
        (self.speed * rad.cos(), self.speed * rad.sin())
    }

    fn elapsed(&self, t: f64) -> Result<f64, KinematicsError> {
        if t < self.t0 {
            return Err(KinematicsError::TemporalOrder { requested: t, reference: self.t0 });
        }
        Ok(t - self.t0)
    }

    /// Position on the straight, unreflected trajectory.
    pub fn unbounded_position_at(&self, t: f64) -> Result<(f64, f64), KinematicsError> {
        let dt = self.elapsed(t)?;
        let (vx, vy) = self.velocity();
        Ok((self.x0 + vx * dt, self.y0 + vy * dt))
    }

    pub fn position_at(&self, t: f64, terrain: &Terrain) -> Result<(f64, f64), KinematicsError> {
        let (ux, uy) = self.unbounded_position_at(t)?;
        Ok((fold(ux, terrain.width).0, fold(uy, terrain.height).0))
    }

    /// Velocity at `t`, with each component's sign flipped once per wall bounce.
    pub fn velocity_at(&self, t: f64, terrain: &Terrain) -> Result<(f64, f64), KinematicsError> {
        let (ux, uy) = self.unbounded_position_at(t)?;
        let (vx, vy) = self.velocity();
        let sx = if fold(ux, terrain.width).1 { -1.0 } else { 1.0 };
        let sy = if fold(uy, terrain.height).1 { -1.0 } else { 1.0 };
        Ok((sx * vx, sy * vy))
    }

    /// The same node re-anchored at `t`: current position and current heading.
    pub fn snapshot_at(&self, t: f64, terrain: &Terrain) -> Result<NodeKinematics, KinematicsError> {
        let (x, y) = self.position_at(t, terrain)?;
        let heading = if self.speed > 0.0 {
            let (vx, vy) = self.velocity_at(t, terrain)?;
            normalize_heading(vy.atan2(vx).to_degrees())
        } else {
            self.heading
        };
        Ok(NodeKinematics { id: self.id, x0: x, y0: y, speed: self.speed, heading, t0: t })
    }
}

pub fn normalize_heading(deg: f64) -> f64 {
    let h = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if h >= 360.0 {
        0.0
    } else {
        h
    }
}

/// Folds an unbounded coordinate into `[0, extent]`. The flag is true when
/// an odd number of reflections has happened.
fn fold(u: f64, extent: f64) -> (f64, bool) {
    let k = (u / extent).floor();
    let odd = (k as i64).rem_euclid(2) == 1;
    let v = if odd { (k + 1.0) * extent - u } else { u - k * extent };
    (v.clamp(0.0, extent), odd)
}

pub fn distance(
    a: &NodeKinematics,
    b: &NodeKinematics,
    t: f64,
    terrain: &Terrain,
) -> Result<f64, KinematicsError> {
    let (ax, ay) = a.position_at(t, terrain)?;
    let (bx, by) = b.position_at(t, terrain)?;
    Ok((ax - bx).hypot(ay - by))
}

/// Unit-disk connectivity; distance exactly `r` counts as connected.
pub fn in_range(
    a: &NodeKinematics,
    b: &NodeKinematics,
    t: f64,
    r: f64,
    terrain: &Terrain,
) -> Result<bool, KinematicsError> {
    Ok(distance(a, b, t, terrain)? <= r)
}
