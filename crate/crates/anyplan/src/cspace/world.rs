//! Obstacle world: static boxes plus boxes that spawn at scheduled times.
//! Queries always go through an immutable per-instant [`WorldSnapshot`].

use serde::{Deserialize, Serialize};

use super::geom::Vec3;

/// Axis-aligned box obstacle. `spawn_time` is `None` for static boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxObstacle {
    pub center: Vec3,
    pub half_extents: Vec3,
    pub spawn_time: Option<f64>,
}

impl BoxObstacle {
    pub fn new_static(center: Vec3, half_extents: Vec3) -> Self {
        Self::validated(center, half_extents, None)
    }

    pub fn spawned(center: Vec3, half_extents: Vec3, spawn_time: f64) -> Self {
        Self::validated(center, half_extents, Some(spawn_time))
    }

    /// Cube of the given side length.
    pub fn cube(center: Vec3, side: f64, spawn_time: Option<f64>) -> Self {
        let h = side / 2.0;
        Self::validated(center, Vec3::new(h, h, h), spawn_time)
    }

    fn validated(center: Vec3, half_extents: Vec3, spawn_time: Option<f64>) -> Self {
        assert!(
            half_extents.x > 0.0 && half_extents.y > 0.0 && half_extents.z > 0.0,
            "box half extents must be strictly positive: {half_extents:?}"
        );
        if let Some(t) = spawn_time {
            assert!(t >= 0.0, "spawn time must be non-negative: {t}");
        }
        BoxObstacle { center, half_extents, spawn_time }
    }

    pub fn active_at(&self, time: f64) -> bool {
        match self.spawn_time {
            None => true,
            Some(t) => t <= time,
        }
    }
}

/// Static boxes plus the boxes spawned so far. Obstacles never despawn
/// within a trial; new ones are appended as the episode progresses.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CollisionWorld {
    boxes: Vec<BoxObstacle>,
}

impl CollisionWorld {
    pub fn new(static_boxes: Vec<BoxObstacle>) -> Self {
        CollisionWorld { boxes: static_boxes }
    }

    /// Registers a scheduled or already-spawned box.
    pub fn add(&mut self, b: BoxObstacle) {
        self.boxes.push(b);
    }

    pub fn boxes(&self) -> &[BoxObstacle] {
        &self.boxes
    }

    /// Immutable view of the world at `time`: exactly the static boxes plus
    /// the moving boxes with spawn_time <= time.
    pub fn snapshot(&self, time: f64) -> WorldSnapshot {
        WorldSnapshot {
            active_boxes: self.boxes.iter().filter(|b| b.active_at(time)).cloned().collect(),
            snapshot_time: time,
        }
    }

    /// Monotone version counter substitute: number of boxes active at `time`.
    /// Two snapshots with equal counts over a spawn-free interval see the
    /// same geometry.
    pub fn active_count(&self, time: f64) -> usize {
        self.boxes.iter().filter(|b| b.active_at(time)).count()
    }
}

/// The set of boxes active at one instant. Immutable after construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorldSnapshot {
    active_boxes: Vec<BoxObstacle>,
    snapshot_time: f64,
}

impl WorldSnapshot {
    pub fn empty() -> Self {
        WorldSnapshot { active_boxes: Vec::new(), snapshot_time: 0.0 }
    }

    pub fn active_boxes(&self) -> &[BoxObstacle] {
        &self.active_boxes
    }

    pub fn snapshot_time(&self) -> f64 {
        self.snapshot_time
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn world_with_spawns() -> CollisionWorld {
        let mut w = CollisionWorld::new(vec![BoxObstacle::new_static(
            Vec3::ZERO,
            Vec3::new(0.1, 0.1, 0.1),
        )]);
        w.add(BoxObstacle::cube(Vec3::new(1.0, 0.0, 0.0), 0.05, Some(0.5)));
        w.add(BoxObstacle::cube(Vec3::new(2.0, 0.0, 0.0), 0.05, Some(1.0)));
        w
    }

    #[test]
    fn snapshot_filters_by_spawn_time() {
        let w = world_with_spawns();
        assert_eq!(w.snapshot(0.0).active_boxes().len(), 1);
        assert_eq!(w.snapshot(0.5).active_boxes().len(), 2);
        assert_eq!(w.snapshot(10.0).active_boxes().len(), 3);
    }

    #[test]
    fn later_snapshots_contain_earlier_boxes() {
        let w = world_with_spawns();
        for (t1, t2) in [(0.0, 0.4), (0.4, 0.5), (0.5, 1.0), (1.0, 7.0)] {
            let early = w.snapshot(t1);
            let late = w.snapshot(t2);
            for b in early.active_boxes() {
                assert!(late.active_boxes().contains(b), "box lost between {t1} and {t2}");
            }
        }
    }

    #[test]
    #[should_panic(expected = "strictly positive")]
    fn zero_extent_box_rejected() {
        BoxObstacle::new_static(Vec3::ZERO, Vec3::new(0.0, 0.1, 0.1));
    }
}
