//! RRT*-style anytime optimization of an existing feasible path. The tree is
//! seeded with the path's waypoints (long edges subdivided at the steering
//! resolution so rewiring can splice into them), samples come from the
//! informed region defined by the current best cost, and the usual
//! sample-nearest-steer-choose-parent-rewire loop runs until the budget
//! expires. Neighborhoods use the k-nearest rule with the standard
//! logarithmic shrinkage: a radius capped by the steering step starves the
//! rewiring step of neighbors in six dimensions. The seeded goal vertex
//! means the best cost never exceeds the input cost.

use crate::cspace::{distance, interpolate};
use crate::paths::Path;

use super::tree::Tree;
use super::{InformedRegion, PlanContext, Sampler};

/// Returns a feasible path from `p`'s start to its goal with cost <= cost(p).
/// A zero budget returns the input unchanged.
pub fn rrt_star_optimize(ctx: &mut PlanContext, p: &Path, deadline: f64) -> Path {
    if p.len_nodes() < 2 || ctx.expired(deadline) {
        return p.clone();
    }
    let start = p.start().clone();
    let goal = p.goal().clone();
    let c_min = distance(&start, &goal);
    let d = start.dim() as f64;
    let eta = ctx.params.eta;

    // Seed the tree with the path, subdividing long edges at the steering
    // step so the spine is dense enough to rewire into.
    let mut tree = Tree::new(start.clone());
    let mut prev = 0;
    for i in 1..p.len_nodes() {
        let a = p.node(i - 1).config().clone();
        let b = p.node(i).config().clone();
        let len = distance(&a, &b);
        let pieces = (len / eta).ceil().max(1.0) as usize;
        for k in 1..=pieces {
            let q = interpolate(&a, &b, k as f64 / pieces as f64);
            let edge = distance(&tree.vertex(prev).config, &q);
            prev = tree.add(q, prev, edge);
        }
    }
    let goal_vertex = prev;
    let mut best = tree.cost(goal_vertex);

    // k-nearest neighborhood constant (e + e/d) per the usual practice.
    let k_rrg = std::f64::consts::E * (1.0 + 1.0 / d);

    while !ctx.expired(deadline) {
        if best <= c_min * (1.0 + 1e-9) {
            break; // already the straight line
        }
        let region = match InformedRegion::new(start.clone(), goal.clone(), best) {
            Ok(r) => r,
            Err(_) => break,
        };
        let target = match ctx.sample(&Sampler::Informed(region), deadline) {
            Ok(q) => q,
            Err(_) => break,
        };

        let nearest = tree.nearest(&target);
        let from = tree.vertex(nearest).config.clone();
        let dist = distance(&from, &target);
        if dist == 0.0 {
            continue;
        }
        let q_new = if dist <= eta { target } else { interpolate(&from, &target, eta / dist) };
        if !ctx.segment_free(&from, &q_new) {
            continue;
        }

        let k = (k_rrg * (tree.len() as f64).ln()).ceil().max(1.0) as usize;
        let near = tree.k_nearest(&q_new, k);

        // Choose the cheapest collision-free parent among the neighborhood.
        let mut parent = nearest;
        let mut parent_edge = distance(&tree.vertex(nearest).config, &q_new);
        let best_through = tree.cost(nearest) + parent_edge;
        let mut candidates: Vec<(f64, usize, f64)> = near
            .iter()
            .map(|&v| {
                let edge = distance(&tree.vertex(v).config, &q_new);
                (tree.cost(v) + edge, v, edge)
            })
            .collect();
        candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for (through, v, edge) in &candidates {
            if *through >= best_through {
                break;
            }
            if ctx.segment_free(&tree.vertex(*v).config, &q_new) {
                parent = *v;
                parent_edge = *edge;
                break;
            }
        }
        let new_idx = tree.add(q_new.clone(), parent, parent_edge);

        // Rewire the neighborhood through the new vertex where cheaper.
        for &v in &near {
            if v == parent {
                continue;
            }
            let edge = distance(&tree.vertex(v).config, &q_new);
            if tree.cost(new_idx) + edge < tree.cost(v) - 1e-12
                && ctx.segment_free(&q_new, &tree.vertex(v).config)
            {
                tree.set_parent(v, new_idx, edge);
            }
        }
        best = tree.cost(goal_vertex);
    }

    let improved = Path::new(simplify(&tree, goal_vertex, eta));
    if improved.geometric_length() <= p.geometric_length() {
        improved
    } else {
        p.clone()
    }
}

/// Drops collinear chain vertices introduced by seeding/steering; keeps the
/// geometry identical, so no re-check is needed.
fn simplify(
    tree: &Tree,
    goal_vertex: usize,
    eta: f64,
) -> Vec<crate::cspace::Configuration> {
    let chain = tree.chain_from_root(goal_vertex);
    if chain.len() <= 2 {
        return chain;
    }
    let mut kept = vec![chain[0].clone()];
    for i in 1..chain.len() - 1 {
        let a = kept.last().unwrap();
        let b = &chain[i];
        let c = &chain[i + 1];
        let direct = distance(a, c);
        let through = distance(a, b) + distance(b, c);
        // Collinear within float noise: the middle vertex adds nothing.
        let collinear = through - direct <= 1e-12 * through.max(1.0);
        if !collinear || through > 4.0 * eta {
            kept.push(b.clone());
        }
    }
    kept.push(chain.last().unwrap().clone());
    kept
}
