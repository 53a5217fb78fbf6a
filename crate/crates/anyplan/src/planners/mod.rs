//! Sampling-based planning primitives: uniform and informed ellipsoidal
//! samplers, RRT-Connect for initial path sets, RRT*-style optimization and
//! the ellipsoid-restricted connector used by the path switcher.
//!
//! Planner invocations are single-threaded and self-contained; distinct
//! invocations with distinct RNG streams may run concurrently. Planner
//! compute is metered through a [`PlanTimer`]: in virtual mode every
//! configuration check advances the timer by a fixed cost, which makes time
//! budgets (and everything built on them) deterministic for a given seed.

mod ellipsoid;
mod kdtree;
mod rrt_connect;
mod rrt_star;
mod sampler;
mod tree;

pub use ellipsoid::plan_in_ellipsoid;
pub use kdtree::KdTree;
pub use rrt_connect::rrt_connect;
pub use rrt_star::rrt_star_optimize;
pub use sampler::{sample_informed, sample_uniform, InformedRegion, Sampler, SamplingBounds};
pub use tree::Tree;

use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::cspace::{
    config_in_collision, distance, segment_check_steps, segment_in_collision, Configuration,
    RobotModel, WorldSnapshot,
};

/// Tunables shared by every planner, read from the scenario file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlannerParams {
    /// Collision-check resolution in configuration-space units.
    pub delta: f64,
    /// Steering step for tree extension.
    pub eta: f64,
    /// Node merge threshold: nearby candidate nodes are considered one.
    pub eps_merge: f64,
    /// Rejected draws allowed before informed sampling gives up.
    pub rejection_budget: u32,
    /// Virtual seconds charged per configuration check.
    pub check_cost_s: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            delta: 0.01,
            eta: 0.3,
            eps_merge: 0.05,
            rejection_budget: 1000,
            check_cost_s: 1.0e-5,
        }
    }
}

/// Planner stopwatch. Virtual mode accumulates a fixed cost per
/// configuration check; wall mode reads the monotonic clock.
#[derive(Debug)]
pub enum PlanTimer {
    Virtual { elapsed: f64, check_cost: f64 },
    Wall { start: Instant },
}

impl PlanTimer {
    pub fn simulated(check_cost: f64) -> Self {
        PlanTimer::Virtual { elapsed: 0.0, check_cost }
    }

    pub fn wall() -> Self {
        PlanTimer::Wall { start: Instant::now() }
    }

    /// Seconds since the timer was created.
    pub fn elapsed(&self) -> f64 {
        match self {
            PlanTimer::Virtual { elapsed, .. } => *elapsed,
            PlanTimer::Wall { start } => start.elapsed().as_secs_f64(),
        }
    }

    pub fn charge(&mut self, checks: u64) {
        if let PlanTimer::Virtual { elapsed, check_cost } = self {
            *elapsed += checks as f64 * *check_cost;
        }
    }
}

/// Everything a planner invocation needs: the frozen world snapshot it plans
/// against, the robot geometry, sampling bounds, tunables, its RNG stream
/// and its stopwatch. Collision queries go through this context so they are
/// charged to the timer.
pub struct PlanContext<'a> {
    pub world: &'a WorldSnapshot,
    pub model: &'a RobotModel,
    pub bounds: &'a SamplingBounds,
    pub params: &'a PlannerParams,
    pub rng: &'a mut rand_chacha::ChaCha8Rng,
    pub timer: PlanTimer,
}

impl PlanContext<'_> {
    pub fn elapsed(&self) -> f64 {
        self.timer.elapsed()
    }

    pub fn expired(&self, deadline: f64) -> bool {
        self.timer.elapsed() >= deadline
    }

    /// Charged single-configuration check.
    pub fn config_free(&mut self, q: &Configuration) -> bool {
        self.timer.charge(1);
        !config_in_collision(q, self.world, self.model)
    }

    /// Charged segment check at the configured resolution.
    pub fn segment_free(&mut self, a: &Configuration, b: &Configuration) -> bool {
        let len = distance(a, b);
        self.timer.charge(segment_check_steps(len, self.params.delta) + 1);
        !segment_in_collision(a, b, self.world, self.model, self.params.delta)
    }

    /// Charged draw from a sampler; rejections are charged as well so a
    /// tight region cannot stall a virtual-time budget. The rejection run
    /// is capped by the time left until `deadline`, keeping one draw from
    /// overshooting it by more than a check.
    pub fn sample(&mut self, sampler: &Sampler, deadline: f64) -> crate::Result<Configuration> {
        let budget = match sampler {
            Sampler::Uniform => self.params.rejection_budget,
            Sampler::Informed(_) => {
                let left = ((deadline - self.timer.elapsed()) / self.params.check_cost_s).floor();
                (self.params.rejection_budget as f64).min(left.max(1.0)) as u32
            }
        };
        let (q, rejected) = match sampler {
            Sampler::Uniform => (sample_uniform(self.bounds, self.rng), 0),
            Sampler::Informed(region) => region.sample_counting(self.bounds, self.rng, budget)?,
        };
        self.timer.charge(1 + rejected as u64);
        Ok(q)
    }

    /// Virtual cost of one segment check, used by budget-aware callers to
    /// decide whether an operation still fits the remaining time.
    pub fn segment_check_cost(&self, len: f64) -> f64 {
        (segment_check_steps(len, self.params.delta) + 1) as f64 * self.params.check_cost_s
    }
}
