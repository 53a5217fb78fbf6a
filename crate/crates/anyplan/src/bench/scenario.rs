//! Scenario files: a TOML document declaring the space, the robot, the
//! obstacles, the spawn schedule and every tunable of a protocol run. The
//! geometry lives in data, not code; validation happens at load time with
//! field-level diagnostics.

use serde::Deserialize;

use crate::cspace::{
    config_in_collision, geom::Vec3, BoxObstacle, Capsule, CollisionWorld, Configuration,
    JointSpec, RobotModel,
};
use crate::executor::{ExecConfig, SpawnPlacement, SpawnSpec};
use crate::planners::{PlannerParams, SamplingBounds};
use crate::Error;

/// A fully validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub dimension: usize,
    pub bounds: SamplingBounds,
    pub model: RobotModel,
    pub start: Configuration,
    pub goal: Configuration,
    pub static_boxes: Vec<BoxObstacle>,
    pub exec: ExecConfig,
    pub planner: PlannerParams,
    pub trials: usize,
    /// Number of pre-computed paths (current one included).
    pub path_count: usize,
    pub seed: u64,
    /// Budget for each initial RRT-Connect query (planner seconds).
    pub connect_budget_s: f64,
    /// Budget for the initial RRT* pass over each path.
    pub optimize_budget_s: f64,
    /// Non-fatal notes emitted while loading (defaults applied, ...).
    pub warnings: Vec<String>,
}

impl Scenario {
    pub fn world(&self) -> CollisionWorld {
        CollisionWorld::new(self.static_boxes.clone())
    }
}

// Raw deserialization targets; defaults and cross-checks applied afterwards.

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    space: RawSpace,
    robot: RawRobot,
    #[serde(default)]
    obstacle: Vec<RawObstacle>,
    #[serde(default)]
    spawn: Vec<RawSpawn>,
    protocol: Option<RawProtocol>,
    budgets: Option<RawBudgets>,
    execution: Option<RawExecution>,
    planner: Option<RawPlanner>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    dimension: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRobot {
    kind: String,
    start: Vec<f64>,
    goal: Vec<f64>,
    base: Option<Vec<f64>>,
    #[serde(default)]
    joint: Vec<RawJoint>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJoint {
    axis: Vec<f64>,
    offset: Vec<f64>,
    capsule_a: Vec<f64>,
    capsule_b: Vec<f64>,
    capsule_radius: f64,
    limits: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObstacle {
    center: Vec<f64>,
    half_extents: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpawn {
    time: f64,
    side: f64,
    placement: Option<String>,
    center: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    trials: Option<usize>,
    paths: Option<usize>,
    seed: Option<u64>,
    one_spawn_on_robot_edge: Option<bool>,
    spawn_clearance: Option<f64>,
    episode_limit_s: Option<f64>,
    goal_tolerance: Option<f64>,
    connect_budget_s: Option<f64>,
    optimize_budget_s: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBudgets {
    reduced_ms: Option<f64>,
    relaxed_ms: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExecution {
    speed: Option<f64>,
    exec_rate_hz: Option<f64>,
    collision_rate_hz: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlanner {
    delta: Option<f64>,
    eta: Option<f64>,
    eps_merge: Option<f64>,
    rejection_budget: Option<u32>,
    check_cost_s: Option<f64>,
}

fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::ScenarioInvalid { field: field.to_string(), reason: reason.into() }
}

fn vec3(field: &str, v: &[f64]) -> crate::Result<Vec3> {
    if v.len() != 3 {
        return Err(invalid(field, format!("expected 3 components, got {}", v.len())));
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

/// Loads and validates a scenario file.
pub fn load_scenario(path: &str) -> crate::Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::ScenarioRead { path: path.to_string(), source })?;
    let raw: RawScenario = toml::from_str(&text)
        .map_err(|source| Error::ScenarioParse { path: path.to_string(), source: Box::new(source) })?;
    build_scenario(raw)
}

/// Parses a scenario from an in-memory TOML string (tests, tooling).
pub fn parse_scenario(text: &str) -> crate::Result<Scenario> {
    let raw: RawScenario = toml::from_str(text).map_err(|source| Error::ScenarioParse {
        path: "<inline>".to_string(),
        source: Box::new(source),
    })?;
    build_scenario(raw)
}

fn build_scenario(raw: RawScenario) -> crate::Result<Scenario> {
    let mut warnings = Vec::new();
    let d = raw.space.dimension;
    if d == 0 {
        return Err(invalid("space.dimension", "must be positive"));
    }
    if raw.space.lower.len() != d || raw.space.upper.len() != d {
        return Err(invalid("space.lower/upper", format!("must have {d} components")));
    }
    if raw.space.lower.iter().zip(&raw.space.upper).any(|(l, u)| l >= u) {
        return Err(invalid("space.lower/upper", "lower must be strictly below upper"));
    }
    let bounds = SamplingBounds::new(raw.space.lower.clone(), raw.space.upper.clone());

    let model = match raw.robot.kind.as_str() {
        "point" => {
            if d != 3 {
                return Err(invalid("robot.kind", "point robot requires dimension = 3"));
            }
            if !raw.robot.joint.is_empty() {
                return Err(invalid("robot.joint", "point robot declares no joints"));
            }
            RobotModel::Point
        }
        "serial-chain" => {
            if raw.robot.joint.len() != d {
                return Err(invalid(
                    "robot.joint",
                    format!("serial chain needs exactly {d} joints, got {}", raw.robot.joint.len()),
                ));
            }
            let base = match &raw.robot.base {
                Some(b) => vec3("robot.base", b)?,
                None => Vec3::ZERO,
            };
            let mut joints = Vec::new();
            for (i, j) in raw.robot.joint.iter().enumerate() {
                let field = format!("robot.joint[{i}]");
                if j.capsule_radius <= 0.0 {
                    return Err(invalid(&field, "capsule_radius must be positive"));
                }
                if j.limits.len() != 2 || j.limits[0] >= j.limits[1] {
                    return Err(invalid(&field, "limits must be [lo, hi] with lo < hi"));
                }
                joints.push(JointSpec {
                    axis: vec3(&field, &j.axis)?,
                    offset: vec3(&field, &j.offset)?,
                    link: Capsule {
                        a: vec3(&field, &j.capsule_a)?,
                        b: vec3(&field, &j.capsule_b)?,
                        radius: j.capsule_radius,
                    },
                    limits: (j.limits[0], j.limits[1]),
                });
            }
            RobotModel::serial_chain(base, joints)
        }
        other => return Err(invalid("robot.kind", format!("unknown robot kind `{other}`"))),
    };

    if raw.robot.start.len() != d || raw.robot.goal.len() != d {
        return Err(invalid("robot.start/goal", format!("must have {d} components")));
    }
    let start = Configuration::new(raw.robot.start.clone());
    let goal = Configuration::new(raw.robot.goal.clone());
    if !bounds.contains(&start) {
        return Err(invalid("robot.start", "outside the sampling bounds"));
    }
    if !bounds.contains(&goal) {
        return Err(invalid("robot.goal", "outside the sampling bounds"));
    }
    if !model.within_limits(&start) || !model.within_limits(&goal) {
        return Err(invalid("robot.start/goal", "outside the joint limits"));
    }

    let mut static_boxes = Vec::new();
    for (i, o) in raw.obstacle.iter().enumerate() {
        let field = format!("obstacle[{i}]");
        let c = vec3(&field, &o.center)?;
        let h = vec3(&field, &o.half_extents)?;
        if h.x <= 0.0 || h.y <= 0.0 || h.z <= 0.0 {
            return Err(invalid(&field, "half_extents must be strictly positive"));
        }
        static_boxes.push(BoxObstacle::new_static(c, h));
    }

    let static_world = CollisionWorld::new(static_boxes.clone()).snapshot(0.0);
    if config_in_collision(&start, &static_world, &model) {
        return Err(invalid("robot.start", "in collision with a static obstacle"));
    }
    if config_in_collision(&goal, &static_world, &model) {
        return Err(invalid("robot.goal", "in collision with a static obstacle"));
    }

    let protocol = raw.protocol.unwrap_or(RawProtocol {
        trials: None,
        paths: None,
        seed: None,
        one_spawn_on_robot_edge: None,
        spawn_clearance: None,
        episode_limit_s: None,
        goal_tolerance: None,
        connect_budget_s: None,
        optimize_budget_s: None,
    });
    let episode_limit_s = protocol.episode_limit_s.unwrap_or(10.0);

    let mut spawns = Vec::new();
    for (i, s) in raw.spawn.iter().enumerate() {
        let field = format!("spawn[{i}]");
        if s.time < 0.0 {
            return Err(invalid(&field, "time must be non-negative"));
        }
        if s.time > episode_limit_s {
            return Err(invalid(&field, "time exceeds the episode limit"));
        }
        if s.side <= 0.0 {
            return Err(invalid(&field, "side must be positive"));
        }
        let placement = match (s.placement.as_deref(), &s.center) {
            (Some("random-edge"), None) | (None, None) => SpawnPlacement::RandomEdge,
            (Some("robot-edge"), None) => SpawnPlacement::RobotEdge,
            (Some("fixed"), Some(c)) | (None, Some(c)) => {
                let v = vec3(&field, c)?;
                SpawnPlacement::Fixed { center: [v.x, v.y, v.z] }
            }
            (Some("fixed"), None) => {
                return Err(invalid(&field, "fixed placement requires a center"))
            }
            (Some("random-edge") | Some("robot-edge"), Some(_)) => {
                return Err(invalid(&field, "center is only valid with fixed placement"))
            }
            (Some(other), _) => {
                return Err(invalid(&field, format!("unknown placement `{other}`")))
            }
        };
        spawns.push(SpawnSpec { time: s.time, side: s.side, placement });
    }

    let budgets = raw.budgets.unwrap_or(RawBudgets { reduced_ms: None, relaxed_ms: None });
    let reduced_ms = budgets.reduced_ms.unwrap_or_else(|| {
        warnings.push("budgets.reduced_ms missing, defaulting to 50 ms".to_string());
        50.0
    });
    let relaxed_ms = budgets.relaxed_ms.unwrap_or_else(|| {
        warnings.push("budgets.relaxed_ms missing, defaulting to 100 ms".to_string());
        100.0
    });
    if !(0.0 < reduced_ms && reduced_ms < relaxed_ms) {
        return Err(invalid("budgets", "need 0 < reduced_ms < relaxed_ms"));
    }

    let execution = raw.execution.unwrap_or(RawExecution {
        speed: None,
        exec_rate_hz: None,
        collision_rate_hz: None,
    });
    let exec = ExecConfig {
        speed: execution.speed.unwrap_or(1.0),
        exec_rate_hz: execution.exec_rate_hz.unwrap_or(100.0),
        collision_rate_hz: execution.collision_rate_hz.unwrap_or(30.0),
        reduced_time_s: reduced_ms / 1e3,
        relaxed_time_s: relaxed_ms / 1e3,
        episode_limit_s,
        goal_tolerance: protocol.goal_tolerance.unwrap_or(1e-3),
        spawn_clearance: protocol.spawn_clearance.unwrap_or(0.15),
        one_spawn_on_robot_edge: protocol.one_spawn_on_robot_edge.unwrap_or(true),
        spawns,
    };
    if exec.speed <= 0.0 {
        return Err(invalid("execution.speed", "must be positive"));
    }
    if exec.exec_rate_hz <= 0.0 || exec.collision_rate_hz <= 0.0 {
        return Err(invalid("execution", "rates must be positive"));
    }

    let planner_raw = raw.planner.unwrap_or(RawPlanner {
        delta: None,
        eta: None,
        eps_merge: None,
        rejection_budget: None,
        check_cost_s: None,
    });
    let defaults = PlannerParams::default();
    let planner = PlannerParams {
        delta: planner_raw.delta.unwrap_or(defaults.delta),
        eta: planner_raw.eta.unwrap_or(defaults.eta),
        eps_merge: planner_raw.eps_merge.unwrap_or(defaults.eps_merge),
        rejection_budget: planner_raw.rejection_budget.unwrap_or(defaults.rejection_budget),
        check_cost_s: planner_raw.check_cost_s.unwrap_or(defaults.check_cost_s),
    };
    if planner.delta <= 0.0 || planner.eta <= 0.0 {
        return Err(invalid("planner", "delta and eta must be positive"));
    }

    let path_count = protocol.paths.unwrap_or(4);
    if path_count < 2 {
        return Err(invalid("protocol.paths", "need at least 2 paths"));
    }

    Ok(Scenario {
        name: raw.name.unwrap_or_else(|| "unnamed".to_string()),
        dimension: d,
        bounds,
        model,
        start,
        goal,
        static_boxes,
        exec,
        planner,
        trials: protocol.trials.unwrap_or(30),
        path_count,
        seed: protocol.seed.unwrap_or(0),
        connect_budget_s: protocol.connect_budget_s.unwrap_or(2.0),
        optimize_budget_s: protocol.optimize_budget_s.unwrap_or(0.5),
        warnings,
    })
}
