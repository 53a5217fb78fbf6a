//! Constant-speed trajectory over a path: arc length traversed is linear in
//! time, sampling clamps at the goal.

use serde::{Deserialize, Serialize};

use crate::cspace::Configuration;
use crate::paths::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    path: Path,
    speed: f64,
    start_time: f64,
    /// Arc length where execution begins (the swap point on a re-planned
    /// path; zero for a fresh start).
    start_arc: f64,
    duration: f64,
}

impl Trajectory {
    /// Builds the constant-speed profile over `p` starting now.
    ///
    /// Panics when the path is infeasible or the speed is not positive.
    pub fn new(p: Path, speed: f64, start_time: f64) -> Self {
        Self::starting_at(p, speed, start_time, 0.0)
    }

    /// Same, but execution begins at `start_arc` along the path.
    pub fn starting_at(p: Path, speed: f64, start_time: f64, start_arc: f64) -> Self {
        assert!(
            p.cost().is_finite(),
            "cannot build a trajectory over an infeasible path"
        );
        assert!(speed > 0.0, "speed must be positive");
        let start_arc = start_arc.clamp(0.0, p.geometric_length());
        let duration = (p.geometric_length() - start_arc) / speed;
        Trajectory { path: p, speed, start_time, start_arc, duration }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn end_time(&self) -> f64 {
        self.start_time + self.duration
    }

    /// Configuration at time `t`, clamped to the goal beyond the end.
    ///
    /// Panics when sampled before the start time (contract violation).
    pub fn sample(&self, t: f64) -> Configuration {
        assert!(
            t >= self.start_time - 1e-12,
            "sampled at {t} before trajectory start {}",
            self.start_time
        );
        let arc = self.start_arc + self.speed * (t - self.start_time);
        self.path.point_at_arc(arc).config
    }
}
