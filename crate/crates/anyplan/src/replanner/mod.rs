//! The online re-planning manager. Given the pre-computed path set, the
//! robot's projection onto the current path and the latest collision
//! verdict, it repeatedly calls the path switcher from the most promising
//! nodes, keeps the cheapest goal-reaching route found, and stops at the
//! cycle budget. An obstructed current path seeds the search only from the
//! nodes before the obstruction (the part already validated) and re-uses
//! the part beyond it as one more alternative.

mod budget;
mod path_switch;

pub use budget::{cycle_gate, update_budget, BudgetMode, CycleTimeTracker, TimeBudget};
pub use path_switch::{
    improvement_bound, path_switch, prune_check, CandidateAction, CandidateEvent, SwitchOutcome,
    SwitchTrace,
};

use std::collections::HashSet;
use std::sync::Arc;

use crate::cspace::distance;
use crate::paths::{CollisionReport, Cost, Path, PathPoint, PathSet};
use crate::planners::PlanContext;

/// Result of one re-planning invocation.
#[derive(Debug, Clone)]
pub struct ReplanOutcome {
    /// Best route from the invoking configuration to the goal. Infinite
    /// cost means no feasible route was found; with an obstructed current
    /// path the executor must issue a safety stop.
    pub path: Path,
    /// Planner seconds consumed by this invocation.
    pub elapsed: f64,
    /// True iff the incumbent was strictly improved at least once.
    pub improved: bool,
    pub mode: BudgetMode,
    /// Cost of the current tail when the invocation started.
    pub prev_cost: Cost,
    /// Geometric length of the current tail at entry (finite even when
    /// obstructed; avoidance quality records use it).
    pub prev_length: f64,
    /// Mean duration of the successful connector cycles, if any.
    pub mean_cycle: Option<f64>,
    pub cycle_count: usize,
}

/// A queued start node together with the path value it was seeded from (the
/// current tail for the initial wave, the incumbent for refills). The home
/// path provides both the switch-search seed tail and the prefix of any
/// accepted route.
#[derive(Debug, Clone)]
struct QueuedNode {
    home: Arc<Path>,
    index: usize,
}

/// Re-anchors a collision verdict onto a freshly projected current tail.
/// The report's bracketing nodes are matched by exact coordinate bits; a
/// verdict whose obstruction lies entirely behind the new projection maps
/// to no obstruction.
pub fn map_report(tail: &Path, report: &CollisionReport) -> Path {
    let tail = tail.with_obstruction(None);
    if !report.obstructed {
        return tail;
    }
    let after = report.x_after.as_ref().and_then(|n| tail.locate(n.config()));
    let before = report.x_before.as_ref().and_then(|n| tail.locate(n.config()));
    let span = match (before, after) {
        (Some(b), Some(a)) if b < a => {
            Some(crate::paths::ObstructionSpan { first_edge: b, last_edge: a - 1 })
        }
        // The node before the obstruction is gone: the robot's own edge is
        // the obstructed one, so re-planning must start from the projection
        // itself.
        (None, Some(a)) if a >= 1 => {
            Some(crate::paths::ObstructionSpan { first_edge: 0, last_edge: a - 1 })
        }
        _ => None,
    };
    tail.with_obstruction(span)
}

/// One re-planning invocation over the path set.
///
/// `x_h` is the robot's (monotone) projection onto `set.current()`;
/// `report` is the latest collision verdict for the current tail. The
/// context carries the planning-time snapshot, the RNG stream and the
/// running timer; budget accounting is relative to the timer value at entry.
pub fn informed_online_replanning(
    ctx: &mut PlanContext,
    set: &PathSet,
    x_h: &PathPoint,
    budget: &TimeBudget,
    report: &CollisionReport,
) -> ReplanOutcome {
    let entry = ctx.elapsed();
    let t_rp = budget.t_rp();

    let (with_xh, xh_idx) = set.current().insert_point(x_h.edge, x_h.t);
    let fresh_tail = with_xh.subpath(xh_idx, with_xh.len_nodes() - 1);
    let sigma_cur = map_report(&fresh_tail, report);
    let x_h_config = sigma_cur.start().clone();
    let goal = sigma_cur.goal().clone();

    let mut alternatives: Vec<Path> = set.others().cloned().collect();
    let mut queue: Vec<QueuedNode> = Vec::new();
    let home_cur = Arc::new(sigma_cur.clone());
    match sigma_cur.obstruction() {
        Some(span) => {
            let x_after = span.last_edge + 1;
            if x_after < sigma_cur.len_nodes() - 1 {
                // The part of the current path beyond the obstacle is free
                // and goal-reaching: one more path to switch onto.
                alternatives.push(sigma_cur.subpath(x_after, sigma_cur.len_nodes() - 1));
            }
            for index in 0..=span.first_edge {
                queue.push(QueuedNode { home: home_cur.clone(), index });
            }
        }
        None => {
            alternatives.push(sigma_cur.clone());
            for index in 0..sigma_cur.len_nodes() {
                queue.push(QueuedNode { home: home_cur.clone(), index });
            }
        }
    }

    let entry_cost = sigma_cur.cost();
    let prev_length = sigma_cur.geometric_length();
    let mut incumbent = sigma_cur.clone();
    let mut c_cur = entry_cost;
    let mut improved = false;
    let mut used: HashSet<Vec<u64>> = HashSet::new();
    let mut pooled = CycleTimeTracker::new();

    // Cycle-entry margin: the switch call charges a guard check up front,
    // which must not push the invocation past its budget.
    let margin = 8.0 * ctx.params.check_cost_s;
    while !queue.is_empty() && ctx.elapsed() - entry < t_rp - margin {
        // Farthest-from-the-robot node first: the robot needs the longest
        // time to reach it, leaving the most room to finish the search.
        let pick = queue
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let da = distance(a.home.node(a.index).config(), &goal);
                let db = distance(b.home.node(b.index).config(), &goal);
                da.partial_cmp(&db).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap();
        let picked = queue.remove(pick);
        used.insert(picked.home.node(picked.index).config().bit_key());

        let t_max = t_rp - (ctx.elapsed() - entry);
        let switch = path_switch(ctx, &picked.home, picked.index, &alternatives, t_max, None);
        for &d in switch.tracker.durations() {
            pooled.record(d);
        }

        if switch.path.cost().is_finite() {
            let prefix = picked.home.subpath(0, picked.index);
            // With an obstructed current path the queue stops at the node
            // before the obstruction, so the prefix is free by construction.
            debug_assert!(!prefix.is_obstructed(), "switch prefix crosses the obstruction");
            let candidate = prefix.concat(&switch.path, ctx.params.eps_merge);
            if candidate.cost() < c_cur {
                incumbent = candidate;
                c_cur = incumbent.cost();
                improved = true;
            }
        }

        if queue.is_empty() && improved {
            let home_rp = Arc::new(incumbent.clone());
            for (index, node) in incumbent.nodes().iter().enumerate() {
                if !used.contains(&node.config().bit_key()) {
                    queue.push(QueuedNode { home: home_rp.clone(), index });
                }
            }
        }
    }

    debug_assert!(incumbent.start() == &x_h_config && incumbent.goal() == &goal);
    ReplanOutcome {
        path: incumbent,
        elapsed: ctx.elapsed() - entry,
        improved,
        mode: budget.mode,
        prev_cost: entry_cost,
        prev_length,
        mean_cycle: pooled.mean(),
        cycle_count: pooled.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::geom::Vec3;
    use crate::cspace::{
        segment_in_collision, BoxObstacle, CollisionWorld, Configuration, RobotModel,
        WorldSnapshot,
    };
    use crate::paths::{check_path, project_on_path};
    use crate::planners::{PlanContext, PlanTimer, PlannerParams, SamplingBounds};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(v: &[f64]) -> Configuration {
        Configuration::new(v.to_vec())
    }

    fn line(points: &[[f64; 3]]) -> Path {
        Path::new(points.iter().map(|p| cfg(p)).collect())
    }

    struct Fixture {
        world: WorldSnapshot,
        bounds: SamplingBounds,
        params: PlannerParams,
    }

    impl Fixture {
        fn open() -> Self {
            Fixture {
                world: WorldSnapshot::empty(),
                bounds: SamplingBounds::new(vec![-6.0; 3], vec![6.0; 3]),
                params: PlannerParams::default(),
            }
        }

        fn with_boxes(boxes: Vec<BoxObstacle>) -> Self {
            Fixture {
                world: CollisionWorld::new(boxes).snapshot(0.0),
                bounds: SamplingBounds::new(vec![-6.0; 3], vec![6.0; 3]),
                params: PlannerParams::default(),
            }
        }

        fn replan(
            &self,
            seed: u64,
            set: &PathSet,
            x_h: &PathPoint,
            budget: &TimeBudget,
            report: &CollisionReport,
        ) -> ReplanOutcome {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ctx = PlanContext {
                world: &self.world,
                model: &RobotModel::Point,
                bounds: &self.bounds,
                params: &self.params,
                rng: &mut rng,
                timer: PlanTimer::simulated(1e-5),
            };
            informed_online_replanning(&mut ctx, set, x_h, budget, report)
        }
    }

    #[test]
    fn free_path_without_better_alternative_is_kept() {
        let fx = Fixture::open();
        // Current path is already the straight line; alternative is longer.
        let cur = line(&[[0.0, 0.0, 0.0], [4.0, 0.0, 0.0]]);
        let alt = line(&[[0.0, 0.0, 0.0], [2.0, 3.0, 0.0], [4.0, 0.0, 0.0]]);
        let set = PathSet::new(vec![cur.clone(), alt], 0);
        let x_h = project_on_path(&cfg(&[0.0, 0.0, 0.0]), &cur, 0.0);
        let budget = TimeBudget::new(0.05, 0.10);
        let out = fx.replan(61, &set, &x_h, &budget, &CollisionReport::free(0.0));
        assert!(!out.improved);
        assert_eq!(out.path.nodes(), cur.nodes());
        assert_eq!(out.mode, BudgetMode::Optimization);
    }

    #[test]
    fn obstructed_path_switches_to_free_precomputed_path() {
        let fx = Fixture::with_boxes(vec![BoxObstacle::cube(Vec3::new(2.0, 0.0, 0.0), 0.05, None)]);
        let cur = line(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [3.0, 0.0, 0.0], [4.0, 0.0, 0.0]]);
        let alt = line(&[[0.0, 0.0, 0.0], [2.0, -1.0, 0.0], [4.0, 0.0, 0.0]]);
        let set = PathSet::new(vec![cur.clone(), alt], 0);
        let state = cfg(&[0.2, 0.0, 0.0]);
        let x_h = project_on_path(&state, &cur, 0.0);
        let (with_xh, idx) = cur.insert_point(x_h.edge, x_h.t);
        let report = check_path(
            &with_xh.subpath(idx, with_xh.len_nodes() - 1),
            &fx.world,
            &RobotModel::Point,
            0.01,
        );
        assert!(report.obstructed);
        let budget = update_budget(&report, &TimeBudget::new(0.05, 0.10));
        assert_eq!(budget.mode, BudgetMode::Avoidance);

        let out = fx.replan(62, &set, &x_h, &budget, &report);
        assert!(out.path.cost().is_finite(), "avoidance must find a finite route");
        assert!(out.improved);
        // Independent re-check at half resolution against the same snapshot.
        for e in 0..out.path.len_edges() {
            assert!(!segment_in_collision(
                out.path.node(e).config(),
                out.path.node(e + 1).config(),
                &fx.world,
                &RobotModel::Point,
                fx.params.delta / 2.0,
            ));
        }
        assert_eq!(out.path.start(), &x_h.config);
        assert_eq!(out.path.goal(), cur.goal());
    }

    #[test]
    fn shorter_alternative_with_free_connector_improves() {
        let fx = Fixture::open();
        let cur = line(&[[0.0, 0.0, 0.0], [0.0, 3.0, 0.0], [4.0, 3.0, 0.0], [4.0, 0.0, 0.0]]);
        let alt = line(&[[0.0, -0.5, 0.0], [2.0, -0.5, 0.0], [4.0, 0.0, 0.0]]);
        let set = PathSet::new(vec![cur.clone(), alt.clone()], 0);
        let x_h = project_on_path(&cfg(&[0.0, 0.0, 0.0]), &cur, 0.0);
        let budget = TimeBudget::new(0.05, 0.10);
        let out = fx.replan(63, &set, &x_h, &budget, &CollisionReport::free(0.0));
        assert!(out.improved);
        let got = out.path.cost().finite().unwrap();
        assert!(got < cur.geometric_length());

        // Brute-force over all (start node, target node) straight
        // connections, starting the switch from any current-path node.
        let mut best = cur.geometric_length();
        for i in 0..cur.len_nodes() {
            let x_n = cur.node(i).config();
            let spent = cur.arc_at_node(i);
            for p in [&cur, &alt] {
                for (j, n) in p.nodes().iter().enumerate() {
                    let total = spent
                        + distance(x_n, n.config())
                        + (p.geometric_length() - p.arc_at_node(j));
                    if total < best {
                        best = total;
                    }
                }
            }
        }
        assert!(
            (got - best).abs() < 1e-6,
            "replanned cost {got} vs straight-connector optimum {best}"
        );
    }

    #[test]
    fn identical_inputs_and_seed_reproduce_the_outcome() {
        let fx = Fixture::with_boxes(vec![BoxObstacle::cube(Vec3::new(2.0, 0.1, 0.0), 0.3, None)]);
        let cur = line(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [3.0, 0.0, 0.0], [4.0, 0.0, 0.0]]);
        let alt = line(&[[0.0, 0.0, 0.0], [2.0, -1.2, 0.0], [4.0, 0.0, 0.0]]);
        let set = PathSet::new(vec![cur.clone(), alt], 0);
        let x_h = project_on_path(&cfg(&[0.4, 0.0, 0.0]), &cur, 0.0);
        let report = {
            let (with_xh, idx) = cur.insert_point(x_h.edge, x_h.t);
            check_path(
                &with_xh.subpath(idx, with_xh.len_nodes() - 1),
                &fx.world,
                &RobotModel::Point,
                0.01,
            )
        };
        let budget = update_budget(&report, &TimeBudget::new(0.05, 0.10));
        let a = fx.replan(64, &set, &x_h, &budget, &report);
        let b = fx.replan(64, &set, &x_h, &budget, &report);
        assert_eq!(a.path.nodes(), b.path.nodes());
        assert_eq!(a.elapsed, b.elapsed);
        assert_eq!(a.improved, b.improved);
    }

    #[test]
    fn budget_is_respected_at_cycle_boundaries() {
        let fx = Fixture::with_boxes(vec![BoxObstacle::cube(Vec3::new(2.0, 0.0, 0.0), 0.05, None)]);
        let cur = line(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [3.0, 0.0, 0.0], [4.0, 0.0, 0.0]]);
        let alt = line(&[[0.0, 1.0, 0.0], [2.0, 1.0, 0.0], [4.0, 0.0, 0.0]]);
        let set = PathSet::new(vec![cur.clone(), alt], 0);
        let x_h = project_on_path(&cfg(&[0.0, 0.0, 0.0]), &cur, 0.0);
        let budget = TimeBudget::new(0.05, 0.10);
        let out = fx.replan(65, &set, &x_h, &budget, &CollisionReport::free(0.0));
        let allowance = out.mean_cycle.unwrap_or(0.01);
        assert!(
            out.elapsed <= budget.t_rp() + allowance + 1e-9,
            "elapsed {} exceeded t_RP {} + cycle mean {allowance}",
            out.elapsed,
            budget.t_rp()
        );
    }

    #[test]
    fn unrecoverable_obstruction_returns_infinite_cost() {
        // The robot's own configuration is inside the spawned cube: nothing
        // feasible can start from it.
        let fx = Fixture::with_boxes(vec![BoxObstacle::cube(Vec3::new(0.2, 0.0, 0.0), 0.2, None)]);
        let cur = line(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [4.0, 0.0, 0.0]]);
        let alt = line(&[[0.0, 1.0, 0.0], [2.0, 1.0, 0.0], [4.0, 0.0, 0.0]]);
        let set = PathSet::new(vec![cur.clone(), alt], 0);
        let x_h = project_on_path(&cfg(&[0.2, 0.0, 0.0]), &cur, 0.0);
        let report = {
            let (with_xh, idx) = cur.insert_point(x_h.edge, x_h.t);
            check_path(
                &with_xh.subpath(idx, with_xh.len_nodes() - 1),
                &fx.world,
                &RobotModel::Point,
                0.01,
            )
        };
        assert!(report.obstructed);
        let budget = update_budget(&report, &TimeBudget::new(0.05, 0.10));
        let out = fx.replan(66, &set, &x_h, &budget, &report);
        assert!(!out.path.cost().is_finite(), "no feasible route can exist");
        assert!(!out.improved);
    }

    #[test]
    fn report_maps_onto_fresh_projection() {
        let p = line(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [3.0, 0.0, 0.0]]);
        let world = CollisionWorld::new(vec![BoxObstacle::cube(Vec3::new(1.5, 0.0, 0.0), 0.05, None)])
            .snapshot(0.0);
        let report = check_path(&p, &world, &RobotModel::Point, 0.01);
        // Fresh tail from a projection strictly inside the first edge.
        let (with_xh, idx) = p.insert_point(0, 0.5);
        let tail = with_xh.subpath(idx, with_xh.len_nodes() - 1);
        let mapped = map_report(&tail, &report);
        let span = mapped.obstruction().unwrap();
        // Node 1 of the tail is the original node (1,0,0) = x_before.
        assert_eq!(span.first_edge, 1);
        assert_eq!(span.last_edge, 1);

        // Projection beyond x_before: the verdict collapses to "robot edge".
        let (with_xh2, idx2) = p.insert_point(1, 0.2);
        let tail2 = with_xh2.subpath(idx2, with_xh2.len_nodes() - 1);
        let mapped2 = map_report(&tail2, &report);
        let span2 = mapped2.obstruction().unwrap();
        assert_eq!(span2.first_edge, 0);
    }
}
