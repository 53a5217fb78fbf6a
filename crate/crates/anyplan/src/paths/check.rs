//! Whole-path collision checking: scans the edges in order and reports the
//! node right before the first obstruction and the first node from which the
//! remainder of the path is free of every detected obstruction.

use serde::{Deserialize, Serialize};

use super::{Node, ObstructionSpan, Path};
use crate::cspace::{segment_in_collision, RobotModel, WorldSnapshot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub obstructed: bool,
    /// Source node of the first colliding edge.
    pub x_before: Option<Node>,
    /// First node after which no detected collision remains on the path.
    pub x_after: Option<Node>,
    /// Edge-index form of the verdict, relative to the checked path.
    pub span: Option<ObstructionSpan>,
    pub checked_at: f64,
}

impl CollisionReport {
    pub fn free(checked_at: f64) -> Self {
        CollisionReport { obstructed: false, x_before: None, x_after: None, span: None, checked_at }
    }
}

/// Checks every edge of `p` against the snapshot, in order.
pub fn check_path(
    p: &Path,
    world: &WorldSnapshot,
    model: &RobotModel,
    delta: f64,
) -> CollisionReport {
    let mut first = None;
    let mut last = None;
    for edge in 0..p.len_edges() {
        let hit = segment_in_collision(
            p.node(edge).config(),
            p.node(edge + 1).config(),
            world,
            model,
            delta,
        );
        if hit {
            first.get_or_insert(edge);
            last = Some(edge);
        }
    }
    match (first, last) {
        (Some(f), Some(l)) => CollisionReport {
            obstructed: true,
            x_before: Some(p.node(f).clone()),
            x_after: Some(p.node(l + 1).clone()),
            span: Some(ObstructionSpan { first_edge: f, last_edge: l }),
            checked_at: world.snapshot_time(),
        },
        _ => CollisionReport::free(world.snapshot_time()),
    }
}
