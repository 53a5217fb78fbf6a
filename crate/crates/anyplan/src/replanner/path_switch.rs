//! Path switching: from a node of the path being traveled, try to connect to
//! the nodes of every available path and keep the cheapest resulting route
//! to the goal.
//!
//! Two pruning rules keep the search fast. A candidate node is skipped when
//! the straight-line distance to it (a lower bound on any connector) cannot
//! beat the incumbent once the candidate's goal-tail cost is paid; and the
//! connector search itself is restricted to the ellipsoid of configurations
//! that could still improve the incumbent. An infeasible incumbent makes
//! both bounds vacuous, so every candidate stays eligible.

use crate::cspace::{distance, Configuration};
use crate::paths::{Cost, Path};
use crate::planners::{plan_in_ellipsoid, PlanContext};

use super::budget::{cycle_gate, CycleTimeTracker};

/// Largest connector cost that could still improve the incumbent: the
/// right-hand side of the pruning inequality under extended arithmetic.
/// An infeasible goal tail yields negative infinity (the candidate can never
/// produce a finite path); an infeasible incumbent with a feasible tail
/// yields positive infinity (everything is eligible).
pub fn improvement_bound(best_cost: Cost, goal_tail_cost: Cost) -> f64 {
    match (best_cost, goal_tail_cost) {
        (_, Cost::Infinite) => f64::NEG_INFINITY,
        (Cost::Infinite, Cost::Finite(_)) => f64::INFINITY,
        (Cost::Finite(best), Cost::Finite(tail)) => best - tail,
    }
}

/// Keep-node test: true iff the straight-line lower bound still leaves room
/// for improvement.
pub fn prune_check(
    x_n: &Configuration,
    x_j: &Configuration,
    best_cost: Cost,
    goal_tail_cost: Cost,
) -> bool {
    distance(x_n, x_j) < improvement_bound(best_cost, goal_tail_cost)
}

/// What happened to one candidate node, for offline verification.
#[derive(Debug, Clone)]
pub enum CandidateAction {
    MergeSkipped,
    Pruned,
    EndpointBlocked,
    PlanFailed,
    Improved,
    NotImproved,
}

#[derive(Debug, Clone)]
pub struct CandidateEvent {
    pub path_index: usize,
    pub node_index: usize,
    pub dist: f64,
    pub best_cost: Cost,
    pub tail_cost: Cost,
    pub action: CandidateAction,
}

#[derive(Debug, Clone, Default)]
pub struct SwitchTrace {
    pub events: Vec<CandidateEvent>,
}

pub struct SwitchOutcome {
    /// Best route from the starting node to the goal found so far; its cost
    /// is infinite when the starting tail was obstructed and nothing better
    /// was found (callers treat that as failure).
    pub path: Path,
    /// Durations of the successful connector cycles of this call.
    pub tracker: CycleTimeTracker,
}

/// Runs the switch search from node `node_index` of `home` against the
/// alternatives in `others`, within `t_max` seconds of planner time.
pub fn path_switch(
    ctx: &mut PlanContext,
    home: &Path,
    node_index: usize,
    others: &[Path],
    t_max: f64,
    mut trace: Option<&mut SwitchTrace>,
) -> SwitchOutcome {
    let entry = ctx.elapsed();
    let deadline = entry + t_max;
    let x_n = home.node(node_index).config().clone();
    let mut best = home.subpath(node_index, home.len_nodes() - 1);
    let mut best_cost = best.cost();
    let mut tracker = CycleTimeTracker::new();

    // A start node in collision cannot grow any connector.
    if !ctx.config_free(&x_n) {
        return SwitchOutcome { path: best, tracker };
    }

    'paths: for (path_index, sigma_j) in others.iter().enumerate() {
        // Snapshot of the candidate queue, visited by ascending distance
        // from the start node (ties: lower waypoint index).
        let mut queue: Vec<(usize, f64)> = sigma_j
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| (i, distance(&x_n, n.config())))
            .collect();
        queue.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));

        let mut last_tried: Option<Configuration> = None;
        for (node_j, dist) in queue {
            // Margin covering the candidate's fixed charges (endpoint
            // guards plus the connector's direct probe), so admitting it
            // cannot push the call past its deadline.
            let overhead = ctx.segment_check_cost(dist) + 8.0 * ctx.params.check_cost_s;
            let remaining = deadline - ctx.elapsed() - overhead;
            if !cycle_gate(&tracker, remaining, best_cost.is_finite()) {
                break 'paths;
            }
            let x_j = sigma_j.node(node_j).config();
            let tail_cost = sigma_j.tail_cost(node_j);
            // Incumbent cost at decision time, recorded with every event.
            let best_at = best_cost;
            let event = |action: CandidateAction| CandidateEvent {
                path_index,
                node_index: node_j,
                dist,
                best_cost: best_at,
                tail_cost,
                action,
            };

            // Nearby successive candidates would yield near-identical
            // solutions; only the first one is tried.
            if let Some(prev) = &last_tried {
                if distance(prev, x_j) < ctx.params.eps_merge {
                    log_event(&mut trace, event(CandidateAction::MergeSkipped));
                    continue;
                }
            }
            last_tried = Some(x_j.clone());

            let bound = improvement_bound(best_cost, tail_cost);
            // Negated form on purpose: prune whenever the strict
            // improvement inequality fails to hold.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(dist < bound) {
                log_event(&mut trace, event(CandidateAction::Pruned));
                continue;
            }

            // One connector attempt is a cycle; the gate above is what
            // keeps a new cycle from starting once the remaining time drops
            // below the mean of the previous successful ones.
            let cycle_start = ctx.elapsed();
            if !ctx.config_free(x_j) {
                log_event(&mut trace, event(CandidateAction::EndpointBlocked));
                continue;
            }
            let conn = plan_in_ellipsoid(ctx, &x_n, x_j, bound, deadline);
            let duration = ctx.elapsed() - cycle_start;

            match conn {
                Some(conn) => {
                    tracker.record(duration);
                    let total = conn.cost() + tail_cost;
                    if total < best_cost {
                        let tail = sigma_j.subpath(node_j, sigma_j.len_nodes() - 1);
                        best = conn.concat(&tail, ctx.params.eps_merge);
                        best_cost = total;
                        log_event(&mut trace, event(CandidateAction::Improved));
                    } else {
                        log_event(&mut trace, event(CandidateAction::NotImproved));
                    }
                }
                None => log_event(&mut trace, event(CandidateAction::PlanFailed)),
            }
        }
    }

    SwitchOutcome { path: best, tracker }
}

fn log_event(trace: &mut Option<&mut SwitchTrace>, ev: CandidateEvent) {
    if let Some(t) = trace.as_deref_mut() {
        t.events.push(ev);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::geom::Vec3;
    use crate::cspace::{
        segment_in_collision, BoxObstacle, CollisionWorld, RobotModel, WorldSnapshot,
    };
    use crate::paths::ObstructionSpan;
    use crate::planners::{PlanTimer, PlannerParams, SamplingBounds};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(v: &[f64]) -> Configuration {
        Configuration::new(v.to_vec())
    }

    fn line(points: &[[f64; 3]]) -> Path {
        Path::new(points.iter().map(|p| cfg(p)).collect())
    }

    #[test]
    fn prune_arithmetic_matches_the_inequality() {
        let a = cfg(&[0.0, 0.0, 0.0]);
        let b = cfg(&[2.0, 0.0, 0.0]);
        // dist 2, bound 5 - 4 = 1: pruned.
        assert!(!prune_check(&a, &b, Cost::Finite(5.0), Cost::Finite(4.0)));
        // Infeasible incumbent keeps everything.
        assert!(prune_check(&a, &b, Cost::Infinite, Cost::Finite(4.0)));
        let c = cfg(&[0.5, 0.0, 0.0]);
        assert!(prune_check(&a, &c, Cost::Finite(5.0), Cost::Finite(4.0)));
        // Infeasible tail never helps.
        assert!(!prune_check(&a, &c, Cost::Infinite, Cost::Infinite));
    }

    fn make_ctx<'a>(
        world: &'a WorldSnapshot,
        bounds: &'a SamplingBounds,
        params: &'a PlannerParams,
        rng: &'a mut ChaCha8Rng,
    ) -> PlanContext<'a> {
        PlanContext {
            world,
            model: &RobotModel::Point,
            bounds,
            params,
            rng,
            timer: PlanTimer::simulated(1e-5),
        }
    }

    #[test]
    fn empty_alternative_set_returns_the_tail_unchanged() {
        let home = line(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        let world = WorldSnapshot::empty();
        let bounds = SamplingBounds::new(vec![-5.0; 3], vec![5.0; 3]);
        let params = PlannerParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let mut ctx = make_ctx(&world, &bounds, &params, &mut rng);
        let out = path_switch(&mut ctx, &home, 1, &[], 1.0, None);
        assert_eq!(out.path.nodes(), home.subpath(1, 2).nodes());
        assert!(out.tracker.is_empty());
    }

    /// Exhaustive straight-connector oracle on a toy world: the best cost
    /// over every candidate node, considering only straight free segments.
    fn brute_force_best(
        x_n: &Configuration,
        initial: Cost,
        others: &[Path],
        world: &WorldSnapshot,
        delta: f64,
    ) -> Cost {
        let mut best = initial;
        for p in others {
            for (i, node) in p.nodes().iter().enumerate() {
                let tail = p.tail_cost(i);
                let free =
                    !segment_in_collision(x_n, node.config(), world, &RobotModel::Point, delta);
                if free {
                    let total = Cost::Finite(distance(x_n, node.config())) + tail;
                    if total < best {
                        best = total;
                    }
                }
            }
        }
        best
    }

    #[test]
    fn straight_reachable_shorter_alternative_wins() {
        // Long dog-leg home path, straight alternative below it.
        let home = line(&[[0.0, 0.0, 0.0], [0.0, 3.0, 0.0], [4.0, 3.0, 0.0], [4.0, 0.0, 0.0]]);
        let alt = line(&[[0.0, -1.0, 0.0], [2.0, -1.0, 0.0], [4.0, 0.0, 0.0]]);
        let world = WorldSnapshot::empty();
        let bounds = SamplingBounds::new(vec![-5.0; 3], vec![5.0; 3]);
        let params = PlannerParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let mut ctx = make_ctx(&world, &bounds, &params, &mut rng);
        let out = path_switch(&mut ctx, &home, 0, std::slice::from_ref(&alt), 5.0, None);

        let expected = brute_force_best(
            home.node(0).config(),
            home.cost(),
            std::slice::from_ref(&alt),
            &world,
            params.delta,
        );
        let got = out.path.cost().finite().unwrap();
        let want = expected.finite().unwrap();
        assert!((got - want).abs() < 1e-6, "switch cost {got} vs brute force {want}");
        assert!(got < home.geometric_length());
        assert_eq!(out.path.goal(), home.goal());
    }

    #[test]
    fn obstructed_tail_switches_to_free_alternative() {
        // Home tail blocked by a cube; alternative passes well below.
        let home = line(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [4.0, 0.0, 0.0]])
            .with_obstruction(Some(ObstructionSpan { first_edge: 0, last_edge: 0 }));
        let alt = line(&[[0.0, -1.0, 0.0], [2.0, -1.0, 0.0], [4.0, 0.0, 0.0]]);
        let world = CollisionWorld::new(vec![BoxObstacle::cube(Vec3::new(1.0, 0.0, 0.0), 0.05, None)])
            .snapshot(0.0);
        let bounds = SamplingBounds::new(vec![-5.0; 3], vec![5.0; 3]);
        let params = PlannerParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let mut ctx = make_ctx(&world, &bounds, &params, &mut rng);
        let out = path_switch(&mut ctx, &home, 0, std::slice::from_ref(&alt), 5.0, None);

        assert!(out.path.cost().is_finite(), "switch must escape the obstruction");
        // Independent re-check at half resolution.
        for e in 0..out.path.len_edges() {
            assert!(!segment_in_collision(
                out.path.node(e).config(),
                out.path.node(e + 1).config(),
                &world,
                &RobotModel::Point,
                params.delta / 2.0,
            ));
        }
        assert!(!out.tracker.is_empty(), "successful cycles must be recorded");
    }

    #[test]
    fn pruned_candidates_could_never_improve() {
        let home = line(&[[0.0, 0.0, 0.0], [0.0, 2.0, 0.0], [4.0, 2.0, 0.0], [4.0, 0.0, 0.0]]);
        let alt = line(&[[0.0, -2.0, 0.0], [2.0, -2.5, 0.0], [4.0, 0.0, 0.0]]);
        let world = WorldSnapshot::empty();
        let bounds = SamplingBounds::new(vec![-5.0; 3], vec![5.0; 3]);
        let params = PlannerParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let mut ctx = make_ctx(&world, &bounds, &params, &mut rng);
        let mut trace = SwitchTrace::default();
        path_switch(&mut ctx, &home, 0, std::slice::from_ref(&alt), 5.0, Some(&mut trace));
        for ev in &trace.events {
            if matches!(ev.action, CandidateAction::Pruned) {
                let lower = Cost::Finite(ev.dist) + ev.tail_cost;
                assert!(
                    !(lower < ev.best_cost),
                    "pruned candidate had room to improve: {lower:?} < {:?}",
                    ev.best_cost
                );
            }
        }
    }

    #[test]
    fn zero_budget_returns_initial_tail() {
        let home = line(&[[0.0, 0.0, 0.0], [4.0, 0.0, 0.0]]);
        let alt = line(&[[0.0, 1.0, 0.0], [4.0, 0.0, 0.0]]);
        let world = WorldSnapshot::empty();
        let bounds = SamplingBounds::new(vec![-5.0; 3], vec![5.0; 3]);
        let params = PlannerParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let mut ctx = make_ctx(&world, &bounds, &params, &mut rng);
        let out = path_switch(&mut ctx, &home, 0, std::slice::from_ref(&alt), 0.0, None);
        assert_eq!(out.path.nodes(), home.nodes());
    }
}
