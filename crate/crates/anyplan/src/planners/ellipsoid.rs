//! The connector used by the path switcher: a sampling-based plan from one
//! node to another, restricted to the hyper-ellipsoid of configurations that
//! could still improve the incumbent. An infinite bound degenerates to plain
//! uniform sampling (the restriction is vacuous).

use crate::cspace::{distance, Configuration};
use crate::paths::Path;

use super::{rrt_connect, InformedRegion, PlanContext, Sampler};

/// Plans a feasible path from `x_n` to `x_j` with cost strictly below
/// `cost_bound` (which may be `f64::INFINITY`).
///
/// Fails fast when the bound leaves the informed region empty, and returns
/// `None` on budget exhaustion or when the found path does not beat the
/// bound. Endpoints in collision also yield `None`: callers pre-filter, so
/// that is a planner failure here, not a contract violation.
pub fn plan_in_ellipsoid(
    ctx: &mut PlanContext,
    x_n: &Configuration,
    x_j: &Configuration,
    cost_bound: f64,
    deadline: f64,
) -> Option<Path> {
    let c_min = distance(x_n, x_j);
    if cost_bound <= c_min {
        return None; // empty interior, cheap reject
    }
    let sampler = if cost_bound.is_finite() {
        match InformedRegion::new(x_n.clone(), x_j.clone(), cost_bound) {
            Ok(region) => Sampler::Informed(region),
            Err(_) => return None,
        }
    } else {
        Sampler::Uniform
    };
    match rrt_connect(ctx, x_n, x_j, &sampler, deadline) {
        Ok(Some(path)) if path.geometric_length() < cost_bound => Some(path),
        _ => None,
    }
}
