//! Free-running wall-clock episode: the three loops are real threads
//! exchanging latest values through a shared mailbox. No lock is held
//! across a planner call; the re-planning thread snapshots its inputs,
//! plans unlocked, and applies the outcome if the current path has not
//! changed underneath it. This mode trades determinism for realism.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use crate::cspace::{distance, BoxObstacle, CollisionWorld, Configuration};
use crate::paths::{check_path, project_on_path, PathSet};
use crate::planners::{PlanContext, PlanTimer};
use crate::replanner::{informed_online_replanning, update_budget, BudgetMode};

use super::log::{
    EpisodeLog, EpisodeOutcome, Event, EventKind, ReplanRecord, TraversedSample,
};
use super::{
    draw_spawn_center, pick_robot_edge_spawn, tail_report, DrawSpawn, EpisodeEnv, SpawnPlacement,
    Trajectory, Verdict,
};

struct Shared {
    world: CollisionWorld,
    world_version: u64,
    set: PathSet,
    path_version: u64,
    trajectory: Trajectory,
    state: Configuration,
    proj_arc: f64,
    stopped: bool,
    cur_edge_hits: Option<Vec<bool>>,
    alts_checked_version: Option<u64>,
    verdict: Option<Verdict>,
    last_replan_done: Option<f64>,
    rng: ChaCha8Rng,
    spawn_cursor: usize,
    robot_edge_spawn: Option<usize>,
    events: Vec<Event>,
    replans: Vec<ReplanRecord>,
    traversed: Vec<TraversedSample>,
    spawned: Vec<BoxObstacle>,
    safety_stops: usize,
    skipped_spawns: usize,
    goal_time: Option<f64>,
    done: bool,
}

pub(super) fn run_episode_wall(
    env: &EpisodeEnv,
    world: CollisionWorld,
    set: PathSet,
    rng: &mut ChaCha8Rng,
) -> EpisodeLog {
    let cfg = env.config;
    let initial_paths = set.paths().to_vec();
    let initial_index = set.current_index();
    let static_boxes = world.boxes().to_vec();
    let mut episode_rng = ChaCha8Rng::seed_from_u64(rng.random());
    let mut replanner_rng = ChaCha8Rng::seed_from_u64(rng.random());
    let robot_edge_spawn = pick_robot_edge_spawn(cfg, &mut episode_rng);

    let mut spawn_times: Vec<(usize, f64)> =
        cfg.spawns.iter().enumerate().map(|(i, s)| (i, s.time)).collect();
    spawn_times.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));

    let state = set.current().start().clone();
    let trajectory = Trajectory::new(set.current().clone(), cfg.speed, 0.0);
    let shared = Arc::new(Mutex::new(Shared {
        world,
        world_version: 0,
        set,
        path_version: 0,
        trajectory,
        state,
        proj_arc: 0.0,
        stopped: false,
        cur_edge_hits: None,
        alts_checked_version: None,
        verdict: None,
        last_replan_done: None,
        rng: episode_rng,
        spawn_cursor: 0,
        robot_edge_spawn,
        events: Vec::new(),
        replans: Vec::new(),
        traversed: Vec::new(),
        spawned: Vec::new(),
        safety_stops: 0,
        skipped_spawns: 0,
        goal_time: None,
        done: false,
    }));
    let start = Instant::now();
    let limit = cfg.episode_limit_s;

    std::thread::scope(|scope| {
        // Trajectory execution loop.
        {
            let shared = Arc::clone(&shared);
            let env_cfg = cfg.clone();
            scope.spawn(move || {
                let dt = Duration::from_secs_f64(1.0 / env_cfg.exec_rate_hz);
                loop {
                    let now = start.elapsed().as_secs_f64();
                    {
                        let mut sh = shared.lock().unwrap();
                        if sh.done {
                            break;
                        }
                        if now > limit {
                            sh.done = true;
                            break;
                        }
                        if !sh.stopped {
                            let t = now.max(sh.trajectory.start_time());
                            sh.state = sh.trajectory.sample(t);
                        }
                        let sample = TraversedSample { t: now, config: sh.state.clone() };
                        sh.traversed.push(sample);
                        let at_goal = distance(&sh.state, sh.set.current().goal())
                            <= env_cfg.goal_tolerance;
                        if at_goal {
                            sh.events.push(Event { t: now, kind: EventKind::GoalReached });
                            sh.goal_time = Some(now);
                            sh.done = true;
                            break;
                        }
                    }
                    std::thread::sleep(dt);
                }
            });
        }

        // Collision checking loop; also fires scheduled spawns.
        {
            let shared = Arc::clone(&shared);
            let spawn_times = spawn_times.clone();
            scope.spawn(move || {
                let dt = Duration::from_secs_f64(1.0 / cfg.collision_rate_hz);
                loop {
                    let now = start.elapsed().as_secs_f64();
                    {
                        let mut sh = shared.lock().unwrap();
                        if sh.done {
                            break;
                        }
                        while sh.spawn_cursor < spawn_times.len()
                            && spawn_times[sh.spawn_cursor].1 <= now
                        {
                            let idx = spawn_times[sh.spawn_cursor].0;
                            fire_spawn(&mut sh, env, idx, now);
                            sh.spawn_cursor += 1;
                        }
                        collision_pass(&mut sh, env, now);
                    }
                    std::thread::sleep(dt);
                }
            });
        }

        // Re-planning loop.
        {
            let shared = Arc::clone(&shared);
            let rng = &mut replanner_rng;
            scope.spawn(move || loop {
                let inputs = {
                    let mut sh = shared.lock().unwrap();
                    if sh.done {
                        break;
                    }
                    let now = start.elapsed().as_secs_f64();
                    let fresh = match (&sh.verdict, sh.last_replan_done) {
                        (Some(v), done) => {
                            v.path_version == sh.path_version
                                && done.is_none_or(|d| v.checked_at > d)
                        }
                        (None, _) => false,
                    };
                    if fresh {
                        let v = sh.verdict.clone().unwrap();
                        let pp = project_on_path(&sh.state, sh.set.current(), sh.proj_arc);
                        sh.proj_arc = pp.arc;
                        sh.events.push(Event {
                            t: now,
                            kind: EventKind::ReplanStart {
                                mode: v.budget.mode,
                                budget_s: v.budget.t_rp(),
                            },
                        });
                        let snapshot = sh.world.snapshot(now);
                        Some((sh.set.clone(), pp, v, snapshot, sh.path_version, now))
                    } else {
                        None
                    }
                };
                let Some((set, pp, verdict, snapshot, version, t0)) = inputs else {
                    std::thread::sleep(Duration::from_millis(1));
                    continue;
                };
                let wall_start = Instant::now();
                let mut ctx = PlanContext {
                    world: &snapshot,
                    model: env.model,
                    bounds: env.bounds,
                    params: env.params,
                    rng,
                    timer: PlanTimer::wall(),
                };
                let out =
                    informed_online_replanning(&mut ctx, &set, &pp, &verdict.budget, &verdict.report);
                let wall_s = wall_start.elapsed().as_secs_f64();

                let mut sh = shared.lock().unwrap();
                let now = start.elapsed().as_secs_f64();
                let accepted = out.improved && sh.path_version == version;
                sh.events.push(Event {
                    t: now,
                    kind: EventKind::ReplanDone {
                        mode: out.mode,
                        improved: accepted,
                        prev_cost: out.prev_cost,
                        new_cost: out.path.cost(),
                        prev_length: out.prev_length,
                        new_length: out.path.geometric_length(),
                        planner_s: out.elapsed,
                        wall_ms: wall_s * 1e3,
                    },
                });
                sh.replans.push(ReplanRecord {
                    t_start: t0,
                    t_done: now,
                    mode: out.mode,
                    budget_s: verdict.budget.t_rp(),
                    prev_length: out.prev_length,
                    prev_cost: out.prev_cost,
                    new_length: out.path.geometric_length(),
                    new_cost: out.path.cost(),
                    accepted,
                    elapsed_s: out.elapsed,
                    wall_s,
                    mean_cycle_s: out.mean_cycle,
                    cycle_count: out.cycle_count,
                    snapshot_time: t0,
                    path: if accepted { Some(out.path.clone()) } else { None },
                });
                if accepted {
                    sh.set.replace_current(out.path);
                    sh.path_version += 1;
                    sh.cur_edge_hits = None;
                    let pp = project_on_path(&sh.state, sh.set.current(), 0.0);
                    sh.proj_arc = pp.arc;
                    sh.trajectory = Trajectory::starting_at(
                        sh.set.current().clone(),
                        cfg.speed,
                        now,
                        pp.arc,
                    );
                    sh.stopped = false;
                    let cost = sh.set.current().cost();
                    sh.events.push(Event { t: now, kind: EventKind::Swap { new_cost: cost } });
                } else if !out.path.cost().is_finite()
                    && out.mode == BudgetMode::Avoidance
                    && !sh.stopped
                {
                    sh.stopped = true;
                    sh.safety_stops += 1;
                    sh.events.push(Event { t: now, kind: EventKind::SafetyStop });
                }
                sh.last_replan_done = Some(now);
            });
        }
    });

    let mut sh = Arc::try_unwrap(shared).ok().expect("threads joined").into_inner().unwrap();
    sh.events.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    sh.skipped_spawns += spawn_times.len() - sh.spawn_cursor;
    let end_time = sh.goal_time.unwrap_or_else(|| start.elapsed().as_secs_f64().min(limit));
    EpisodeLog {
        initial_paths,
        initial_index,
        static_boxes,
        spawned: sh.spawned,
        events: sh.events,
        replans: sh.replans,
        traversed: sh.traversed,
        outcome: EpisodeOutcome {
            goal_reached: sh.goal_time.is_some(),
            goal_time: sh.goal_time,
            safety_stops: sh.safety_stops,
            end_time,
            skipped_spawns: sh.skipped_spawns,
        },
    }
}

fn collision_pass(sh: &mut Shared, env: &EpisodeEnv, now: f64) {
    let snapshot = sh.world.snapshot(now);
    let delta = env.params.delta;
    if sh.alts_checked_version != Some(sh.world_version) {
        for i in 0..sh.set.paths().len() {
            if i == sh.set.current_index() {
                continue;
            }
            let was = sh.set.paths()[i].is_obstructed();
            let report = check_path(&sh.set.paths()[i], &snapshot, env.model, delta);
            if report.obstructed && !was {
                sh.events.push(Event {
                    t: now,
                    kind: EventKind::CollisionDetected { path_index: i, current: false },
                });
            }
            sh.set.set_obstruction(i, report.span);
        }
        sh.alts_checked_version = Some(sh.world_version);
    }
    if sh.cur_edge_hits.is_none() {
        let cur = sh.set.current();
        let hits: Vec<bool> = (0..cur.len_edges())
            .map(|e| {
                crate::cspace::segment_in_collision(
                    cur.node(e).config(),
                    cur.node(e + 1).config(),
                    &snapshot,
                    env.model,
                    delta,
                )
            })
            .collect();
        sh.cur_edge_hits = Some(hits);
    }
    let pp = project_on_path(&sh.state, sh.set.current(), sh.proj_arc);
    sh.proj_arc = pp.arc;
    let report = tail_report(
        sh.set.current(),
        &pp,
        sh.cur_edge_hits.as_ref().unwrap(),
        &snapshot,
        env.model,
        delta,
        now,
    );
    let was = sh
        .verdict
        .as_ref()
        .is_some_and(|v| v.report.obstructed && v.path_version == sh.path_version);
    if report.obstructed && !was {
        sh.events.push(Event {
            t: now,
            kind: EventKind::CollisionDetected {
                path_index: sh.set.current_index(),
                current: true,
            },
        });
    }
    let budget = update_budget(&report, &env.config.budget());
    sh.verdict =
        Some(Verdict { checked_at: now, path_version: sh.path_version, report, budget });
}

fn fire_spawn(sh: &mut Shared, env: &EpisodeEnv, idx: usize, now: f64) {
    let spec = env.config.spawns[idx].clone();
    let placement = if sh.robot_edge_spawn == Some(idx) {
        SpawnPlacement::RobotEdge
    } else {
        spec.placement
    };
    let center = match placement {
        SpawnPlacement::Fixed { center } => {
            Some(crate::cspace::geom::Vec3::new(center[0], center[1], center[2]))
        }
        SpawnPlacement::RandomEdge | SpawnPlacement::RobotEdge => {
            let pp = project_on_path(&sh.state, sh.set.current(), sh.proj_arc);
            sh.proj_arc = pp.arc;
            let goal = sh.set.current().goal().clone();
            let state = sh.state.clone();
            let current = sh.set.current().clone();
            draw_spawn_center(DrawSpawn {
                current: &current,
                projection: &pp,
                state: &state,
                goal: &goal,
                model: env.model,
                side: spec.side,
                clearance: env.config.spawn_clearance,
                robot_edge: placement == SpawnPlacement::RobotEdge,
                rng: &mut sh.rng,
            })
        }
    };
    match center {
        Some(c) => {
            let b = BoxObstacle::cube(c, spec.side, Some(now));
            sh.world.add(b.clone());
            sh.world_version += 1;
            sh.cur_edge_hits = None;
            sh.spawned.push(b);
            sh.events.push(Event {
                t: now,
                kind: EventKind::ObstacleSpawned { center: [c.x, c.y, c.z], side: spec.side },
            });
        }
        None => {
            sh.skipped_spawns += 1;
            sh.events.push(Event { t: now, kind: EventKind::SpawnSkipped { scheduled: spec.time } });
        }
    }
}
