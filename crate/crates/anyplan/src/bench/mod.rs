//! The experimental protocol: per trial, plan the initial path set on the
//! static world (feasibility first, then length optimization), run an
//! episode with the scheduled obstructions, and record a metrics entry for
//! every accepted re-plan. Aggregation splits by re-planning mode.

mod export;
mod metrics;
mod scenario;

pub use export::export_paths;
pub use metrics::{aggregate, quality_index, AggregateTable, MetricsRecord, ModeAggregate};
pub use scenario::{load_scenario, parse_scenario, Scenario};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::executor::{run_episode, ClockMode, EpisodeEnv, EpisodeLog};
use crate::paths::{Path, PathSet};
use crate::planners::{rrt_connect, rrt_star_optimize, PlanContext, PlanTimer, Sampler};
use crate::Error;

pub struct TrialOutcome {
    pub trial: usize,
    pub log: EpisodeLog,
}

pub struct ProtocolResult {
    pub records: Vec<MetricsRecord>,
    pub table: AggregateTable,
    pub trials: Vec<TrialOutcome>,
    /// Trials whose initial planning failed, with the reason. Never
    /// silently dropped.
    pub skipped: Vec<(usize, String)>,
}

/// Independent, reproducible RNG stream per trial.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Plans the initial path set on the static world: each path is found with
/// the bidirectional planner and then shortened by the optimizing planner,
/// both under virtual budgets.
pub fn plan_initial_paths(scn: &Scenario, rng: &mut ChaCha8Rng) -> crate::Result<Vec<Path>> {
    let world = scn.world().snapshot(0.0);
    let mut paths = Vec::with_capacity(scn.path_count);
    for k in 0..scn.path_count {
        let mut found = None;
        for _attempt in 0..5 {
            let mut ctx = PlanContext {
                world: &world,
                model: &scn.model,
                bounds: &scn.bounds,
                params: &scn.planner,
                rng,
                timer: PlanTimer::simulated(scn.planner.check_cost_s),
            };
            match rrt_connect(&mut ctx, &scn.start, &scn.goal, &Sampler::Uniform, scn.connect_budget_s)?
            {
                Some(p) => {
                    found = Some(p);
                    break;
                }
                None => continue,
            }
        }
        let Some(p) = found else {
            return Err(Error::InitialPlanning(format!(
                "path {k}: no feasible path within {} planner seconds",
                scn.connect_budget_s
            )));
        };
        let mut ctx = PlanContext {
            world: &world,
            model: &scn.model,
            bounds: &scn.bounds,
            params: &scn.planner,
            rng,
            timer: PlanTimer::simulated(scn.planner.check_cost_s),
        };
        let optimized = rrt_star_optimize(&mut ctx, &p, scn.optimize_budget_s);
        paths.push(optimized);
    }
    Ok(paths)
}

/// Runs the full protocol: `scn.trials` independent episodes.
pub fn run_protocol(scn: &Scenario, mode: ClockMode) -> ProtocolResult {
    let mut records = Vec::new();
    let mut trials = Vec::new();
    let mut skipped = Vec::new();

    for trial in 0..scn.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(scn.seed, trial));
        let paths = match plan_initial_paths(scn, &mut rng) {
            Ok(p) => p,
            Err(e) => {
                skipped.push((trial, e.to_string()));
                continue;
            }
        };
        let set = PathSet::new(paths, 0);
        let env = EpisodeEnv {
            model: &scn.model,
            bounds: &scn.bounds,
            params: &scn.planner,
            config: &scn.exec,
        };
        let log = run_episode(&env, scn.world(), set, &mut rng, mode);
        for r in log.replans.iter().filter(|r| r.accepted) {
            records.push(MetricsRecord {
                trial,
                mode: r.mode,
                delta_pct: quality_index(r.prev_length, r.new_length),
                replan_time_s: r.elapsed_s,
                replan_time_ms: r.elapsed_s * 1e3,
                t_sim: r.t_done,
            });
        }
        trials.push(TrialOutcome { trial, log });
    }

    let table = aggregate(&records);
    ProtocolResult { records, table, trials, skipped }
}

/// The metrics stream as newline-delimited JSON; byte-identical for the
/// same scenario and seed in simulated-clock mode.
pub fn metrics_ndjson(records: &[MetricsRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("metrics records serialize"));
        out.push('\n');
    }
    out
}
