//! The three concurrent loops driving an episode: trajectory execution
//! (high rate), collision checking (lower rate) and re-planning (rate set
//! by its own budget), wired by latest-value message passing.
//!
//! In simulated-clock mode a single-stepped deterministic scheduler drives
//! all three loops: planner compute is charged in virtual seconds, a
//! re-planning invocation started at `t` takes effect at `t + elapsed`, and
//! the world, trajectory and verdicts evolve exactly the same way for the
//! same scenario and seed. Wall-clock mode runs the loops as free-running
//! threads for realism; it makes no determinism promises.
//!
//! Event order at equal timestamps is fixed: obstacle spawns, then the
//! execution tick, then the collision tick, then re-plan completion, then
//! re-plan start. A new re-planning invocation starts at the first
//! collision verdict issued strictly after the previous invocation
//! finished, and budget changes apply at invocation boundaries (an
//! in-flight invocation is never preempted).

mod clock;
mod log;
mod trajectory;
mod wall;

pub use clock::{ClockMode, SimClock};
pub use log::{EpisodeLog, EpisodeOutcome, Event, EventKind, ReplanRecord, TraversedSample};
pub use trajectory::Trajectory;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::cspace::{
    config_in_collision, distance, forward_kinematics, geom::Vec3, interpolate,
    segment_in_collision, BoxObstacle, CollisionWorld, Configuration, RobotModel, WorldSnapshot,
};
use crate::paths::{
    check_path, project_on_path, CollisionReport, Node, ObstructionSpan, Path, PathPoint, PathSet,
};
use crate::planners::{PlanContext, PlanTimer, PlannerParams, SamplingBounds};
use crate::replanner::{informed_online_replanning, update_budget, BudgetMode, TimeBudget};

/// Where a scheduled cube lands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SpawnPlacement {
    /// Uniform point of a uniformly drawn connection of the current tail.
    RandomEdge,
    /// Uniform point of the connection the robot is currently crossing.
    RobotEdge,
    /// Explicit workspace position (controlled experiments).
    Fixed { center: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpawnSpec {
    pub time: f64,
    pub side: f64,
    pub placement: SpawnPlacement,
}

/// Executor tunables, read from the scenario file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExecConfig {
    /// Configuration-space units per second.
    pub speed: f64,
    pub exec_rate_hz: f64,
    pub collision_rate_hz: f64,
    pub reduced_time_s: f64,
    pub relaxed_time_s: f64,
    pub episode_limit_s: f64,
    pub goal_tolerance: f64,
    /// Minimum configuration-space distance between a spawned obstruction
    /// and the robot at spawn time.
    pub spawn_clearance: f64,
    /// Re-draw one scheduled spawn per episode onto the robot's own edge.
    pub one_spawn_on_robot_edge: bool,
    pub spawns: Vec<SpawnSpec>,
}

impl ExecConfig {
    pub fn budget(&self) -> TimeBudget {
        TimeBudget::new(self.reduced_time_s, self.relaxed_time_s)
    }
}

/// The static surroundings of an episode.
pub struct EpisodeEnv<'a> {
    pub model: &'a RobotModel,
    pub bounds: &'a SamplingBounds,
    pub params: &'a PlannerParams,
    pub config: &'a ExecConfig,
}

/// Latest collision verdict published to the re-planning loop.
#[derive(Debug, Clone)]
struct Verdict {
    checked_at: f64,
    path_version: u64,
    report: CollisionReport,
    budget: TimeBudget,
}

/// A re-planning invocation in flight: started at `started`, its outcome
/// takes effect at `done_at`.
struct Pending {
    done_at: f64,
    outcome: crate::replanner::ReplanOutcome,
    wall_s: f64,
    snapshot_time: f64,
    started: f64,
    budget_s: f64,
}

/// Runs one episode and returns the full log.
pub fn run_episode(
    env: &EpisodeEnv,
    world: CollisionWorld,
    set: PathSet,
    rng: &mut ChaCha8Rng,
    mode: ClockMode,
) -> EpisodeLog {
    match mode {
        ClockMode::Simulated => SimEpisode::new(env, world, set, rng).run(),
        ClockMode::Wall => wall::run_episode_wall(env, world, set, rng),
    }
}

struct SimEpisode<'a, 'r> {
    env: &'a EpisodeEnv<'a>,
    clock: SimClock,
    world: CollisionWorld,
    world_version: u64,
    set: PathSet,
    path_version: u64,
    trajectory: Trajectory,
    state: Configuration,
    proj_arc: f64,
    stopped: bool,
    rng: &'r mut ChaCha8Rng,
    /// Per-edge hits of the full current path against the current world;
    /// invalidated by spawns and swaps.
    cur_edge_hits: Option<Vec<bool>>,
    alts_checked_version: Option<u64>,
    verdict: Option<Verdict>,
    pending: Option<Pending>,
    last_replan_done: Option<f64>,
    robot_edge_spawn: Option<usize>,
    events: Vec<Event>,
    replans: Vec<ReplanRecord>,
    traversed: Vec<TraversedSample>,
    spawned: Vec<BoxObstacle>,
    safety_stops: usize,
    skipped_spawns: usize,
    goal_time: Option<f64>,
}

impl<'a, 'r> SimEpisode<'a, 'r> {
    fn new(
        env: &'a EpisodeEnv<'a>,
        world: CollisionWorld,
        set: PathSet,
        rng: &'r mut ChaCha8Rng,
    ) -> Self {
        let state = set.current().start().clone();
        let trajectory = Trajectory::new(set.current().clone(), env.config.speed, 0.0);
        // Draw which scheduled spawn lands on the robot's own connection.
        let robot_edge_spawn = pick_robot_edge_spawn(env.config, rng);
        SimEpisode {
            env,
            clock: SimClock::new(ClockMode::Simulated),
            world,
            world_version: 0,
            set,
            path_version: 0,
            trajectory,
            state,
            proj_arc: 0.0,
            stopped: false,
            rng,
            cur_edge_hits: None,
            alts_checked_version: None,
            verdict: None,
            pending: None,
            last_replan_done: None,
            robot_edge_spawn,
            events: Vec::new(),
            replans: Vec::new(),
            traversed: Vec::new(),
            spawned: Vec::new(),
            safety_stops: 0,
            skipped_spawns: 0,
            goal_time: None,
        }
    }

    fn run(mut self) -> EpisodeLog {
        let cfg = self.env.config;
        let exec_dt = 1.0 / cfg.exec_rate_hz;
        let coll_dt = 1.0 / cfg.collision_rate_hz;
        let limit = cfg.episode_limit_s;
        let initial_paths = self.set.paths().to_vec();
        let initial_index = self.set.current_index();
        let static_boxes = self.world.boxes().to_vec();

        let mut spawn_times: Vec<(usize, f64)> =
            cfg.spawns.iter().enumerate().map(|(i, s)| (i, s.time)).collect();
        spawn_times.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
        let mut spawn_cursor = 0;

        let mut k_exec: u64 = 0;
        let mut k_coll: u64 = 0;
        let mut end_time;

        'episode: loop {
            let next_exec = k_exec as f64 * exec_dt;
            let next_coll = k_coll as f64 * coll_dt;
            let mut t = next_exec.min(next_coll);
            if spawn_cursor < spawn_times.len() {
                t = t.min(spawn_times[spawn_cursor].1);
            }
            if let Some(p) = &self.pending {
                t = t.min(p.done_at);
            }
            if t > limit {
                end_time = limit;
                break 'episode;
            }
            self.clock.advance_to(t);
            end_time = self.clock.now();

            while spawn_cursor < spawn_times.len() && spawn_times[spawn_cursor].1 <= t {
                let idx = spawn_times[spawn_cursor].0;
                self.do_spawn(idx, t);
                spawn_cursor += 1;
            }
            if next_exec <= t {
                k_exec += 1;
                if self.exec_tick(t) {
                    break 'episode; // goal reached
                }
            }
            if next_coll <= t {
                k_coll += 1;
                self.collision_tick(t);
            }
            if self.pending.as_ref().is_some_and(|p| p.done_at <= t) {
                self.complete_replan(t);
            }
            self.maybe_start_replan(t);
        }

        self.skipped_spawns += spawn_times.len() - spawn_cursor;
        let end_time = self.goal_time.unwrap_or(end_time);
        EpisodeLog {
            initial_paths,
            initial_index,
            static_boxes,
            spawned: self.spawned,
            events: self.events,
            replans: self.replans,
            traversed: self.traversed,
            outcome: EpisodeOutcome {
                goal_reached: self.goal_time.is_some(),
                goal_time: self.goal_time,
                safety_stops: self.safety_stops,
                end_time,
                skipped_spawns: self.skipped_spawns,
            },
        }
    }

    /// Returns true when the goal is reached.
    fn exec_tick(&mut self, t: f64) -> bool {
        if !self.stopped {
            self.state = self.trajectory.sample(t);
        }
        self.traversed.push(TraversedSample { t, config: self.state.clone() });
        let goal = self.set.current().goal();
        if distance(&self.state, goal) <= self.env.config.goal_tolerance {
            self.events.push(Event { t, kind: EventKind::GoalReached });
            self.goal_time = Some(t);
            return true;
        }
        false
    }

    fn collision_tick(&mut self, t: f64) {
        let snapshot = self.world.snapshot(t);
        let delta = self.env.params.delta;
        let model = self.env.model;

        if self.alts_checked_version != Some(self.world_version) {
            for i in 0..self.set.paths().len() {
                if i == self.set.current_index() {
                    continue;
                }
                let was_obstructed = self.set.paths()[i].is_obstructed();
                let report = check_path(&self.set.paths()[i], &snapshot, model, delta);
                if report.obstructed && !was_obstructed {
                    self.events.push(Event {
                        t,
                        kind: EventKind::CollisionDetected { path_index: i, current: false },
                    });
                }
                self.set.set_obstruction(i, report.span);
            }
            self.alts_checked_version = Some(self.world_version);
        }

        if self.cur_edge_hits.is_none() {
            let cur = self.set.current();
            let hits: Vec<bool> = (0..cur.len_edges())
                .map(|e| {
                    segment_in_collision(
                        cur.node(e).config(),
                        cur.node(e + 1).config(),
                        &snapshot,
                        model,
                        delta,
                    )
                })
                .collect();
            self.cur_edge_hits = Some(hits);
        }

        let pp = project_on_path(&self.state, self.set.current(), self.proj_arc);
        self.proj_arc = pp.arc;
        let report = tail_report(
            self.set.current(),
            &pp,
            self.cur_edge_hits.as_ref().unwrap(),
            &snapshot,
            model,
            delta,
            t,
        );
        let was_obstructed = self
            .verdict
            .as_ref()
            .is_some_and(|v| v.report.obstructed && v.path_version == self.path_version);
        if report.obstructed && !was_obstructed {
            self.events.push(Event {
                t,
                kind: EventKind::CollisionDetected {
                    path_index: self.set.current_index(),
                    current: true,
                },
            });
        }
        let budget = update_budget(&report, &self.env.config.budget());
        self.verdict =
            Some(Verdict { checked_at: t, path_version: self.path_version, report, budget });
    }

    fn complete_replan(&mut self, t: f64) {
        let Some(pending) = self.pending.take() else { return };
        let out = pending.outcome;
        let accepted = out.improved;
        self.events.push(Event {
            t,
            kind: EventKind::ReplanDone {
                mode: out.mode,
                improved: accepted,
                prev_cost: out.prev_cost,
                new_cost: out.path.cost(),
                prev_length: out.prev_length,
                new_length: out.path.geometric_length(),
                planner_s: out.elapsed,
                wall_ms: pending.wall_s * 1e3,
            },
        });
        self.replans.push(ReplanRecord {
            t_start: pending.started,
            t_done: t,
            mode: out.mode,
            budget_s: pending.budget_s,
            prev_length: out.prev_length,
            prev_cost: out.prev_cost,
            new_length: out.path.geometric_length(),
            new_cost: out.path.cost(),
            accepted,
            elapsed_s: out.elapsed,
            wall_s: pending.wall_s,
            mean_cycle_s: out.mean_cycle,
            cycle_count: out.cycle_count,
            snapshot_time: pending.snapshot_time,
            path: if accepted { Some(out.path.clone()) } else { None },
        });

        if accepted {
            self.set.replace_current(out.path);
            self.path_version += 1;
            self.cur_edge_hits = None;
            // The robot drifted during planning: root the new trajectory at
            // its projection onto the re-planned path.
            let pp = project_on_path(&self.state, self.set.current(), 0.0);
            self.proj_arc = pp.arc;
            self.trajectory = Trajectory::starting_at(
                self.set.current().clone(),
                self.env.config.speed,
                t,
                pp.arc,
            );
            self.stopped = false;
            self.events
                .push(Event { t, kind: EventKind::Swap { new_cost: self.set.current().cost() } });
        } else if !out.path.cost().is_finite() && out.mode == BudgetMode::Avoidance {
            // No feasible route while the current path is obstructed.
            if !self.stopped {
                self.stopped = true;
                self.safety_stops += 1;
                self.events.push(Event { t, kind: EventKind::SafetyStop });
            }
        }
        self.last_replan_done = Some(t);
    }

    fn maybe_start_replan(&mut self, t: f64) {
        if self.pending.is_some() {
            return;
        }
        let Some(v) = self.verdict.clone() else { return };
        if v.path_version != self.path_version {
            return;
        }
        if let Some(done) = self.last_replan_done {
            if v.checked_at <= done {
                return;
            }
        }

        let pp = project_on_path(&self.state, self.set.current(), self.proj_arc);
        self.proj_arc = pp.arc;
        let snapshot = self.world.snapshot(t);
        self.events.push(Event {
            t,
            kind: EventKind::ReplanStart { mode: v.budget.mode, budget_s: v.budget.t_rp() },
        });
        let wall_start = Instant::now();
        let mut ctx = PlanContext {
            world: &snapshot,
            model: self.env.model,
            bounds: self.env.bounds,
            params: self.env.params,
            rng: self.rng,
            timer: PlanTimer::simulated(self.env.params.check_cost_s),
        };
        let outcome = informed_online_replanning(&mut ctx, &self.set, &pp, &v.budget, &v.report);
        let wall_s = wall_start.elapsed().as_secs_f64();
        self.pending = Some(Pending {
            done_at: t + outcome.elapsed,
            budget_s: v.budget.t_rp(),
            outcome,
            wall_s,
            snapshot_time: t,
            started: t,
        });
    }

    fn do_spawn(&mut self, idx: usize, t: f64) {
        let spec = self.env.config.spawns[idx].clone();
        let placement = if self.robot_edge_spawn == Some(idx) {
            SpawnPlacement::RobotEdge
        } else {
            spec.placement
        };
        let center = match placement {
            SpawnPlacement::Fixed { center } => Some(Vec3::new(center[0], center[1], center[2])),
            SpawnPlacement::RandomEdge | SpawnPlacement::RobotEdge => {
                let pp = project_on_path(&self.state, self.set.current(), self.proj_arc);
                self.proj_arc = pp.arc;
                let goal = self.set.current().goal().clone();
                draw_spawn_center(DrawSpawn {
                    current: self.set.current(),
                    projection: &pp,
                    state: &self.state,
                    goal: &goal,
                    model: self.env.model,
                    side: spec.side,
                    clearance: self.env.config.spawn_clearance,
                    robot_edge: placement == SpawnPlacement::RobotEdge,
                    rng: self.rng,
                })
            }
        };
        match center {
            Some(c) => {
                let b = BoxObstacle::cube(c, spec.side, Some(t));
                self.world.add(b.clone());
                self.world_version += 1;
                self.cur_edge_hits = None;
                self.spawned.push(b);
                self.events.push(Event {
                    t,
                    kind: EventKind::ObstacleSpawned { center: [c.x, c.y, c.z], side: spec.side },
                });
            }
            None => {
                self.skipped_spawns += 1;
                self.events
                    .push(Event { t, kind: EventKind::SpawnSkipped { scheduled: spec.time } });
            }
        }
    }
}

fn pick_robot_edge_spawn(cfg: &ExecConfig, rng: &mut ChaCha8Rng) -> Option<usize> {
    if !cfg.one_spawn_on_robot_edge {
        return None;
    }
    let candidates: Vec<usize> = cfg
        .spawns
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s.placement, SpawnPlacement::RandomEdge))
        .map(|(i, _)| i)
        .collect();
    if candidates.is_empty() {
        None
    } else {
        Some(candidates[rng.random_range(0..candidates.len())])
    }
}

/// Collision verdict for the remainder of the current path from the robot's
/// projection, combining a fresh check of the partially crossed edge with
/// the cached per-edge hits of the untouched edges ahead.
fn tail_report(
    cur: &Path,
    pp: &PathPoint,
    edge_hits: &[bool],
    snapshot: &WorldSnapshot,
    model: &RobotModel,
    delta: f64,
    t: f64,
) -> CollisionReport {
    if cur.len_nodes() == 1 {
        return CollisionReport::free(t);
    }
    let remainder_hit =
        segment_in_collision(&pp.config, cur.node(pp.edge + 1).config(), snapshot, model, delta);
    // Tail edge 0 is the remainder of the crossed edge; tail edge k >= 1 is
    // the full edge pp.edge + k.
    let mut hits = vec![remainder_hit];
    hits.extend_from_slice(&edge_hits[(pp.edge + 1)..]);
    let first = hits.iter().position(|&h| h);
    let last = hits.iter().rposition(|&h| h);
    let tail_node = |k: usize| -> Node {
        if k == 0 {
            Node::new(pp.config.clone())
        } else {
            cur.node(pp.edge + k).clone()
        }
    };
    match (first, last) {
        (Some(f), Some(l)) => CollisionReport {
            obstructed: true,
            x_before: Some(tail_node(f)),
            x_after: Some(tail_node(l + 1)),
            span: Some(ObstructionSpan { first_edge: f, last_edge: l }),
            checked_at: t,
        },
        _ => CollisionReport::free(t),
    }
}

struct DrawSpawn<'a, 'r> {
    current: &'a Path,
    projection: &'a PathPoint,
    state: &'a Configuration,
    goal: &'a Configuration,
    model: &'a RobotModel,
    side: f64,
    clearance: f64,
    robot_edge: bool,
    rng: &'r mut ChaCha8Rng,
}

/// Draws a cube center obstructing the current tail. The cube must touch
/// neither the goal configuration nor any configuration within `clearance`
/// of path arc ahead of the robot (the runway it needs to detect the
/// obstruction and re-plan); otherwise the trial would be unrecoverable by
/// construction.
fn draw_spawn_center(args: DrawSpawn) -> Option<Vec3> {
    let (with_xh, idx) = args.current.insert_point(args.projection.edge, args.projection.t);
    let tail = with_xh.subpath(idx, with_xh.len_nodes() - 1);
    if tail.len_edges() == 0 {
        return None;
    }
    for attempt in 0..200 {
        // Prefer the robot's own edge for the first half of the attempts.
        let edge = if args.robot_edge && attempt < 100 {
            0
        } else {
            args.rng.random_range(0..tail.len_edges())
        };
        let s: f64 = args.rng.random_range(0.0..1.0);
        let q = interpolate(tail.node(edge).config(), tail.node(edge + 1).config(), s);
        if distance(&q, args.state) < args.clearance {
            continue;
        }
        let center = match args.model {
            RobotModel::Point => q.as_vec3(),
            RobotModel::SerialChain(_) => {
                forward_kinematics(&q, args.model).last().expect("chain has links").b
            }
        };
        let candidate =
            CollisionWorld::new(vec![BoxObstacle::cube(center, args.side, None)]).snapshot(0.0);
        if config_in_collision(args.goal, &candidate, args.model) {
            continue;
        }
        // Free runway: nothing the robot occupies within the next
        // `clearance` of arc may touch the new cube.
        let runway_steps = 16;
        let runway_hit = (0..=runway_steps).any(|k| {
            let arc = args.projection.arc
                + args.clearance * k as f64 / runway_steps as f64;
            let q = args.current.point_at_arc(arc).config;
            config_in_collision(&q, &candidate, args.model)
        });
        if runway_hit {
            continue;
        }
        return Some(center);
    }
    None
}
