//! Bidirectional RRT with greedy connection. Used both for the initial path
//! set (uniform sampling) and as the connector inside the informed ellipsoid
//! (informed sampling): the sampler is injected by the caller.

use crate::cspace::{distance, interpolate, Configuration};
use crate::paths::Path;
use crate::Error;

use super::tree::Tree;
use super::{PlanContext, Sampler};

enum Extend {
    Trapped,
    Advanced(usize),
    Reached(usize),
}

/// Plans a feasible path from `start` to `goal` against the context's
/// snapshot, stopping at `deadline` (elapsed seconds on the context timer).
///
/// Returns `Ok(None)` when the budget runs out or sampling is exhausted;
/// start or goal in collision is an error (precondition violation).
pub fn rrt_connect(
    ctx: &mut PlanContext,
    start: &Configuration,
    goal: &Configuration,
    sampler: &Sampler,
    deadline: f64,
) -> crate::Result<Option<Path>> {
    if ctx.expired(deadline) {
        return Ok(None);
    }
    if !ctx.config_free(start) {
        return Err(Error::StartInCollision);
    }
    if !ctx.config_free(goal) {
        return Err(Error::GoalInCollision);
    }
    if distance(start, goal) == 0.0 {
        return Ok(Some(Path::new(vec![start.clone()])));
    }
    // Direct connection first: in open space the answer is the segment.
    // Skipped when the probe alone would blow the remaining budget.
    if ctx.elapsed() + ctx.segment_check_cost(distance(start, goal)) < deadline
        && ctx.segment_free(start, goal)
    {
        return Ok(Some(Path::new(vec![start.clone(), goal.clone()])));
    }

    let mut start_tree = Tree::new(start.clone());
    let mut goal_tree = Tree::new(goal.clone());
    let mut from_start = true;

    // Reserve the cost of one steering step so the loop never charges past
    // its deadline.
    let step_cost = ctx.segment_check_cost(ctx.params.eta) + 2.0 * ctx.params.check_cost_s;
    while ctx.elapsed() + step_cost < deadline {
        let target = match ctx.sample(sampler, deadline) {
            Ok(q) => q,
            Err(Error::SamplingExhausted { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let (tree_a, tree_b) =
            if from_start { (&mut start_tree, &mut goal_tree) } else { (&mut goal_tree, &mut start_tree) };

        if let Extend::Advanced(new_a) | Extend::Reached(new_a) = extend(ctx, tree_a, &target) {
            let bridge = tree_a.vertex(new_a).config.clone();
            if let Some(new_b) = connect(ctx, tree_b, &bridge, deadline) {
                let (s_leaf, g_leaf) = if from_start { (new_a, new_b) } else { (new_b, new_a) };
                let mut configs = start_tree.chain_from_root(s_leaf);
                let mut tail = goal_tree.chain_from_root(g_leaf);
                tail.reverse();
                // Both chains end at the bridge configuration; keep one copy.
                configs.extend(tail.into_iter().skip(1));
                let path = shortcut(ctx, configs, deadline);
                return Ok(Some(path));
            }
        }
        from_start = !from_start;
    }
    Ok(None)
}

/// One steering step of at most `eta` from the nearest vertex toward `target`.
fn extend(ctx: &mut PlanContext, tree: &mut Tree, target: &Configuration) -> Extend {
    let nearest = tree.nearest(target);
    let from = tree.vertex(nearest).config.clone();
    let d = distance(&from, target);
    if d == 0.0 {
        return Extend::Reached(nearest);
    }
    let eta = ctx.params.eta;
    let (q_new, reached) = if d <= eta {
        (target.clone(), true)
    } else {
        (interpolate(&from, target, eta / d), false)
    };
    if !ctx.segment_free(&from, &q_new) {
        return Extend::Trapped;
    }
    let idx = tree.add(q_new.clone(), nearest, distance(&from, &q_new));
    if reached {
        Extend::Reached(idx)
    } else {
        Extend::Advanced(idx)
    }
}

/// Greedy connect: keep extending toward `target` until reached or trapped.
fn connect(ctx: &mut PlanContext, tree: &mut Tree, target: &Configuration, deadline: f64) -> Option<usize> {
    let step_cost = ctx.segment_check_cost(ctx.params.eta) + ctx.params.check_cost_s;
    loop {
        if ctx.elapsed() + step_cost >= deadline {
            return None;
        }
        match extend(ctx, tree, target) {
            Extend::Trapped => return None,
            Extend::Reached(v) => return Some(v),
            Extend::Advanced(_) => {}
        }
    }
}

/// Greedy forward shortcut: from each kept node jump to the farthest node
/// reachable by a free segment. Deterministic, every surviving edge has
/// been checked, and probes that would not fit the remaining budget are
/// skipped.
fn shortcut(ctx: &mut PlanContext, configs: Vec<Configuration>, deadline: f64) -> Path {
    if configs.len() <= 2 || ctx.expired(deadline) {
        return Path::new(configs);
    }
    let mut kept = vec![configs[0].clone()];
    let mut i = 0;
    while i + 1 < configs.len() {
        let mut next = i + 1;
        for j in ((i + 2)..configs.len()).rev() {
            let probe_cost = ctx.segment_check_cost(distance(&configs[i], &configs[j]));
            if ctx.elapsed() + probe_cost >= deadline {
                continue;
            }
            if ctx.segment_free(&configs[i], &configs[j]) {
                next = j;
                break;
            }
        }
        kept.push(configs[next].clone());
        i = next;
    }
    Path::new(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::geom::Vec3;
    use crate::cspace::{
        segment_in_collision, BoxObstacle, CollisionWorld, RobotModel, WorldSnapshot,
    };
    use crate::planners::{PlanTimer, PlannerParams, SamplingBounds};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(v: &[f64]) -> Configuration {
        Configuration::new(v.to_vec())
    }

    fn ctx_parts() -> (SamplingBounds, PlannerParams) {
        (SamplingBounds::new(vec![-2.0; 3], vec![2.0; 3]), PlannerParams::default())
    }

    #[test]
    fn empty_world_connects_directly() {
        let (bounds, params) = ctx_parts();
        let world = WorldSnapshot::empty();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut ctx = PlanContext {
            world: &world,
            model: &RobotModel::Point,
            bounds: &bounds,
            params: &params,
            rng: &mut rng,
            timer: PlanTimer::simulated(1e-5),
        };
        let start = cfg(&[-1.0, 0.0, 0.0]);
        let goal = cfg(&[1.0, 0.0, 0.0]);
        let path = rrt_connect(&mut ctx, &start, &goal, &Sampler::Uniform, 1.0).unwrap().unwrap();
        assert_eq!(path.len_nodes(), 2);
        assert_eq!(path.start(), &start);
        assert_eq!(path.goal(), &goal);
        assert_eq!(path.geometric_length(), 2.0);
    }

    #[test]
    fn goal_inside_obstacle_is_a_precondition_violation() {
        let (bounds, params) = ctx_parts();
        let world = CollisionWorld::new(vec![BoxObstacle::cube(Vec3::new(1.0, 0.0, 0.0), 0.2, None)])
            .snapshot(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut ctx = PlanContext {
            world: &world,
            model: &RobotModel::Point,
            bounds: &bounds,
            params: &params,
            rng: &mut rng,
            timer: PlanTimer::simulated(1e-5),
        };
        let err = rrt_connect(&mut ctx, &cfg(&[-1.0, 0.0, 0.0]), &cfg(&[1.0, 0.0, 0.0]), &Sampler::Uniform, 1.0)
            .unwrap_err();
        assert!(matches!(err, Error::GoalInCollision));
    }

    #[test]
    fn wall_with_gap_yields_verified_path() {
        // Wall across x = 0 with a gap around y in [0.6, 2.0].
        let world = CollisionWorld::new(vec![BoxObstacle::new_static(
            Vec3::new(0.0, -0.7, 0.0),
            Vec3::new(0.05, 1.3, 2.0),
        )])
        .snapshot(0.0);
        let (bounds, params) = ctx_parts();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut ctx = PlanContext {
            world: &world,
            model: &RobotModel::Point,
            bounds: &bounds,
            params: &params,
            rng: &mut rng,
            timer: PlanTimer::simulated(1e-5),
        };
        let start = cfg(&[-1.0, 0.0, 0.0]);
        let goal = cfg(&[1.0, 0.0, 0.0]);
        let path = rrt_connect(&mut ctx, &start, &goal, &Sampler::Uniform, 5.0).unwrap().unwrap();
        assert_eq!(path.start(), &start);
        assert_eq!(path.goal(), &goal);
        // Independent re-check of every edge at half the planning resolution.
        for e in 0..path.len_edges() {
            assert!(
                !segment_in_collision(
                    path.node(e).config(),
                    path.node(e + 1).config(),
                    &world,
                    &RobotModel::Point,
                    params.delta / 2.0,
                ),
                "edge {e} failed the finer re-check"
            );
        }
    }

    #[test]
    fn deadline_of_zero_fails_cleanly_when_blocked() {
        let world = CollisionWorld::new(vec![BoxObstacle::new_static(
            Vec3::ZERO,
            Vec3::new(0.05, 1.9, 1.9),
        )])
        .snapshot(0.0);
        let (bounds, params) = ctx_parts();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut ctx = PlanContext {
            world: &world,
            model: &RobotModel::Point,
            bounds: &bounds,
            params: &params,
            rng: &mut rng,
            timer: PlanTimer::simulated(1e-5),
        };
        // The direct segment is blocked and the budget is already spent.
        let out = rrt_connect(
            &mut ctx,
            &cfg(&[-1.0, 0.0, 0.0]),
            &cfg(&[1.0, 0.0, 0.0]),
            &Sampler::Uniform,
            0.0,
        )
        .unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn fixed_seed_reproduces_the_same_path() {
        let world = CollisionWorld::new(vec![BoxObstacle::new_static(
            Vec3::new(0.0, -0.7, 0.0),
            Vec3::new(0.05, 1.3, 2.0),
        )])
        .snapshot(0.0);
        let (bounds, params) = ctx_parts();
        let run = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ctx = PlanContext {
                world: &world,
                model: &RobotModel::Point,
                bounds: &bounds,
                params: &params,
                rng: &mut rng,
                timer: PlanTimer::simulated(1e-5),
            };
            rrt_connect(
                &mut ctx,
                &cfg(&[-1.0, 0.0, 0.0]),
                &cfg(&[1.0, 0.0, 0.0]),
                &Sampler::Uniform,
                5.0,
            )
            .unwrap()
            .unwrap()
        };
        let a = run(77);
        let b = run(77);
        assert_eq!(a.nodes(), b.nodes());
        let c = run(78);
        // Different stream, almost surely a different tree.
        assert!(c.nodes() != a.nodes() || c.geometric_length() == a.geometric_length());
    }
}
