//! Collision queries against a world snapshot.
//!
//! Point-robot segments are tested exactly (slab clipping against each box),
//! which is strictly more conservative than sampling and keeps re-checks at
//! finer resolutions from ever discovering a missed collision. Serial-chain
//! segments are discretized in joint space at the configured resolution;
//! the step count is rounded up to a power of two so halving the resolution
//! yields a strictly nested sample set.

use super::geom::{capsule_intersects_box, point_in_box, segment_intersects_box};
use super::robot::{forward_kinematics, RobotModel};
use super::world::WorldSnapshot;
use super::{distance, interpolate, Configuration};

/// True iff the robot at configuration `q` touches any active box.
/// Boundary contact counts as collision.
pub fn config_in_collision(q: &Configuration, world: &WorldSnapshot, model: &RobotModel) -> bool {
    match model {
        RobotModel::Point => {
            let p = q.as_vec3();
            world
                .active_boxes()
                .iter()
                .any(|b| point_in_box(p, b.center, b.half_extents))
        }
        RobotModel::SerialChain(_) => {
            let capsules = forward_kinematics(q, model);
            world.active_boxes().iter().any(|b| {
                capsules
                    .iter()
                    .any(|c| capsule_intersects_box(c, b.center, b.half_extents))
            })
        }
    }
}

/// Number of interpolation steps a discretized check of a segment of length
/// `len` performs at resolution `delta` (power of two, so refinement nests).
pub fn segment_check_steps(len: f64, delta: f64) -> u64 {
    assert!(delta > 0.0, "check resolution must be positive");
    if len <= delta {
        return 1;
    }
    let needed = (len / delta).ceil() as u64;
    needed.next_power_of_two()
}

/// True iff the straight segment from `a` to `b` collides at resolution `delta`.
pub fn segment_in_collision(
    a: &Configuration,
    b: &Configuration,
    world: &WorldSnapshot,
    model: &RobotModel,
    delta: f64,
) -> bool {
    match model {
        RobotModel::Point => {
            let (pa, pb) = (a.as_vec3(), b.as_vec3());
            world
                .active_boxes()
                .iter()
                .any(|bx| segment_intersects_box(pa, pb, bx.center, bx.half_extents))
        }
        RobotModel::SerialChain(_) => {
            let len = distance(a, b);
            if len == 0.0 {
                return config_in_collision(a, world, model);
            }
            let steps = segment_check_steps(len, delta);
            (0..=steps).any(|k| {
                let q = interpolate(a, b, k as f64 / steps as f64);
                config_in_collision(&q, world, model)
            })
        }
    }
}
