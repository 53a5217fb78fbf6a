//! Configuration space: configurations, distance and interpolation, robot
//! geometry models, the time-varying obstacle world, and collision queries.
//!
//! All types are immutable after construction and all operations are pure,
//! so everything here is safe to use from any loop without synchronization.

pub mod geom;
mod robot;
mod world;

mod collision;

pub use collision::{config_in_collision, segment_check_steps, segment_in_collision};
pub use geom::{Capsule, Vec3};
pub use robot::{forward_kinematics, JointSpec, RobotModel, SerialChain};
pub use world::{BoxObstacle, CollisionWorld, WorldSnapshot};

use serde::{Deserialize, Serialize};

/// A point in configuration space: joint positions (radians) for arm models,
/// workspace coordinates (meters) for the point model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(Vec<f64>);

impl Configuration {
    pub fn new(coords: Vec<f64>) -> Self {
        assert!(!coords.is_empty(), "configuration cannot be empty");
        assert!(
            coords.iter().all(|c| c.is_finite()),
            "configuration coordinates must be finite: {coords:?}"
        );
        Configuration(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Workspace point view, valid for 3-dimensional configurations.
    pub fn as_vec3(&self) -> Vec3 {
        Vec3::from_slice(&self.0)
    }

    /// Exact bit pattern of the coordinates; used to key configurations that
    /// were produced by cloning the same value.
    pub fn bit_key(&self) -> Vec<u64> {
        self.0.iter().map(|c| c.to_bits()).collect()
    }
}

impl std::ops::Index<usize> for Configuration {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Euclidean distance between two configurations.
///
/// Panics if the dimensions differ (contract violation).
pub fn distance(a: &Configuration, b: &Configuration) -> f64 {
    assert!(
        a.dim() == b.dim(),
        "dimension mismatch: {} vs {}",
        a.dim(),
        b.dim()
    );
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Linear interpolation `a + s * (b - a)` with `s` in `[0, 1]`.
///
/// Panics if the dimensions differ or `s` is out of range.
pub fn interpolate(a: &Configuration, b: &Configuration, s: f64) -> Configuration {
    assert!(
        a.dim() == b.dim(),
        "dimension mismatch: {} vs {}",
        a.dim(),
        b.dim()
    );
    assert!((0.0..=1.0).contains(&s), "interpolation parameter {s} outside [0, 1]");
    // Endpoints reproduce exactly: downstream code identifies shared
    // waypoints by their coordinate bits.
    if s == 0.0 {
        return a.clone();
    }
    if s == 1.0 {
        return b.clone();
    }
    Configuration(
        a.coords()
            .iter()
            .zip(b.coords())
            .map(|(x, y)| x + s * (y - x))
            .collect(),
    )
}
