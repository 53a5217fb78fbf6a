//! Episode log: everything that happened during one episode, serializable
//! for offline export and verification. Events additionally render as
//! line-delimited text records.

use serde::{Deserialize, Serialize};

use crate::cspace::{BoxObstacle, Configuration};
use crate::paths::{Cost, Path};
use crate::replanner::BudgetMode;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum EventKind {
    ReplanStart {
        mode: BudgetMode,
        budget_s: f64,
    },
    ReplanDone {
        mode: BudgetMode,
        improved: bool,
        prev_cost: Cost,
        new_cost: Cost,
        prev_length: f64,
        new_length: f64,
        planner_s: f64,
        wall_ms: f64,
    },
    Swap {
        new_cost: Cost,
    },
    CollisionDetected {
        /// Index of the obstructed path in the set; the current path also
        /// reports here.
        path_index: usize,
        current: bool,
    },
    ObstacleSpawned {
        center: [f64; 3],
        side: f64,
    },
    SpawnSkipped {
        scheduled: f64,
    },
    SafetyStop,
    GoalReached,
}

impl std::fmt::Display for Event {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            EventKind::ReplanStart { mode, budget_s } => {
                write!(f, "replan-start t={:.4} mode={mode} budget_s={budget_s}", self.t)
            }
            EventKind::ReplanDone {
                mode,
                improved,
                prev_cost,
                new_cost,
                planner_s,
                wall_ms,
                ..
            } => write!(
                f,
                "replan-done t={:.4} mode={mode} improved={improved} prev_cost={prev_cost} new_cost={new_cost} planner_s={planner_s:.4} wall_ms={wall_ms:.3}",
                self.t
            ),
            EventKind::Swap { new_cost } => write!(f, "swap t={:.4} new_cost={new_cost}", self.t),
            EventKind::CollisionDetected { path_index, current } => write!(
                f,
                "collision-detected t={:.4} path_index={path_index} current={current}",
                self.t
            ),
            EventKind::ObstacleSpawned { center, side } => write!(
                f,
                "obstacle-spawned t={:.4} center=({},{},{}) side={side}",
                self.t, center[0], center[1], center[2]
            ),
            EventKind::SpawnSkipped { scheduled } => {
                write!(f, "spawn-skipped t={:.4} scheduled={scheduled}", self.t)
            }
            EventKind::SafetyStop => write!(f, "safety-stop t={:.4}", self.t),
            EventKind::GoalReached => write!(f, "goal-reached t={:.4}", self.t),
        }
    }
}

/// One re-planning invocation, as recorded by the executor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplanRecord {
    pub t_start: f64,
    pub t_done: f64,
    pub mode: BudgetMode,
    pub budget_s: f64,
    /// Geometric length of the current tail when the invocation started.
    pub prev_length: f64,
    pub prev_cost: Cost,
    pub new_length: f64,
    pub new_cost: Cost,
    pub accepted: bool,
    /// Planner seconds consumed (virtual in simulated mode).
    pub elapsed_s: f64,
    /// Wall-clock seconds the computation actually took (diagnostic).
    pub wall_s: f64,
    pub mean_cycle_s: Option<f64>,
    pub cycle_count: usize,
    /// Time of the world snapshot the invocation planned against.
    pub snapshot_time: f64,
    /// The accepted re-planned path, kept for export and re-checking.
    pub path: Option<Path>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraversedSample {
    pub t: f64,
    pub config: Configuration,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    pub goal_reached: bool,
    pub goal_time: Option<f64>,
    pub safety_stops: usize,
    pub end_time: f64,
    pub skipped_spawns: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub initial_paths: Vec<Path>,
    pub initial_index: usize,
    pub static_boxes: Vec<BoxObstacle>,
    pub spawned: Vec<BoxObstacle>,
    pub events: Vec<Event>,
    pub replans: Vec<ReplanRecord>,
    pub traversed: Vec<TraversedSample>,
    pub outcome: EpisodeOutcome,
}

impl EpisodeLog {
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Line-delimited event records.
    pub fn event_lines(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for e in &self.events {
            let _ = writeln!(out, "{e}");
        }
        out
    }
}
