//! Waypoint paths with the extended cost semantics, subpath/concatenation
//! algebra, state-to-path projection and per-path collision reporting.
//!
//! Paths are value-semantic snapshots: every mutation produces a new `Path`
//! value, and a value published to another loop is never touched again.

mod check;
mod cost;

pub use check::{check_path, CollisionReport};
pub use cost::Cost;

use serde::{Deserialize, Serialize};

use crate::cspace::{distance, interpolate, Configuration};

/// A path waypoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Node {
    config: Configuration,
}

impl Node {
    pub fn new(config: Configuration) -> Self {
        Node { config }
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }
}

/// Inclusive range of edge indices covering every colliding edge found by
/// the latest check: `first_edge` is the first colliding edge, `last_edge`
/// the last one, so the node `last_edge + 1` starts the free remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObstructionSpan {
    pub first_edge: usize,
    pub last_edge: usize,
}

/// Ordered waypoint sequence with cached geometric length and the latest
/// collision status. A degenerate single-node path (cost zero) is allowed;
/// it arises from `subpath(p, k, k)` and acts as the concatenation identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    nodes: Vec<Node>,
    /// Cumulative arc length at each node; `cum[0] == 0`.
    cum: Vec<f64>,
    obstruction: Option<ObstructionSpan>,
}

impl Path {
    pub fn new(configs: Vec<Configuration>) -> Self {
        assert!(!configs.is_empty(), "a path needs at least one waypoint");
        let dim = configs[0].dim();
        assert!(
            configs.iter().all(|c| c.dim() == dim),
            "all waypoints must share one dimension"
        );
        let mut cum = Vec::with_capacity(configs.len());
        cum.push(0.0);
        for w in configs.windows(2) {
            cum.push(cum.last().unwrap() + distance(&w[0], &w[1]));
        }
        Path { nodes: configs.into_iter().map(Node::new).collect(), cum, obstruction: None }
    }

    pub fn len_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn len_edges(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn start(&self) -> &Configuration {
        self.nodes.first().unwrap().config()
    }

    pub fn goal(&self) -> &Configuration {
        self.nodes.last().unwrap().config()
    }

    /// Sum of Euclidean edge lengths, independent of collision status.
    pub fn geometric_length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Arc length from the path start to node `i`.
    pub fn arc_at_node(&self, i: usize) -> f64 {
        self.cum[i]
    }

    /// Extended cost: the geometric length while the latest collision status
    /// is free, infinite once marked obstructed.
    pub fn cost(&self) -> Cost {
        if self.obstruction.is_some() {
            Cost::Infinite
        } else {
            Cost::Finite(self.geometric_length())
        }
    }

    pub fn obstruction(&self) -> Option<ObstructionSpan> {
        self.obstruction
    }

    pub fn is_obstructed(&self) -> bool {
        self.obstruction.is_some()
    }

    /// Same waypoints with the collision status replaced.
    pub fn with_obstruction(&self, span: Option<ObstructionSpan>) -> Path {
        if let Some(s) = span {
            assert!(s.first_edge <= s.last_edge && s.last_edge < self.len_edges());
        }
        Path { nodes: self.nodes.clone(), cum: self.cum.clone(), obstruction: span }
    }

    /// Extended cost of the suffix starting at node `k`: infinite while any
    /// colliding edge lies at or after `k`, the suffix length otherwise.
    pub fn tail_cost(&self, k: usize) -> Cost {
        match self.obstruction {
            Some(span) if k <= span.last_edge => Cost::Infinite,
            _ => Cost::Finite(self.geometric_length() - self.cum[k]),
        }
    }

    /// Index of the waypoint with exactly these coordinate bits, if any.
    pub fn locate(&self, config: &Configuration) -> Option<usize> {
        self.nodes.iter().position(|n| n.config() == config)
    }

    /// The sub-sequence of nodes from `i` to `j` (inclusive), with the
    /// obstruction span restricted to the surviving edges.
    ///
    /// Panics when `i > j` or `j` is out of bounds (contract violation).
    pub fn subpath(&self, i: usize, j: usize) -> Path {
        assert!(i <= j, "subpath endpoints out of order: {i} > {j}");
        assert!(j < self.nodes.len(), "subpath end {j} out of bounds");
        let configs: Vec<Configuration> =
            self.nodes[i..=j].iter().map(|n| n.config().clone()).collect();
        let mut p = Path::new(configs);
        p.obstruction = self.obstruction.and_then(|span| {
            // Edges of the subpath are the original edges i..j.
            if j == i || span.first_edge >= j || span.last_edge < i {
                None
            } else {
                Some(ObstructionSpan {
                    first_edge: span.first_edge.max(i) - i,
                    last_edge: span.last_edge.min(j - 1) - i,
                })
            }
        });
        p
    }

    /// Concatenation: the duplicated junction node appears once; the result
    /// is obstructed when either part is.
    ///
    /// Panics when the junction gap exceeds `eps_merge` (contract violation).
    pub fn concat(&self, other: &Path, eps_merge: f64) -> Path {
        let gap = distance(self.goal(), other.start());
        assert!(
            gap <= eps_merge,
            "concat endpoint mismatch: junction gap {gap} exceeds {eps_merge}"
        );
        let mut configs: Vec<Configuration> =
            self.nodes.iter().map(|n| n.config().clone()).collect();
        configs.extend(other.nodes[1..].iter().map(|n| n.config().clone()));
        let mut p = Path::new(configs);
        let off = self.len_edges();
        p.obstruction = match (self.obstruction, other.obstruction) {
            (None, None) => None,
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(ObstructionSpan {
                first_edge: b.first_edge + off,
                last_edge: b.last_edge + off,
            }),
            (Some(a), Some(b)) => Some(ObstructionSpan {
                first_edge: a.first_edge,
                last_edge: b.last_edge + off,
            }),
        };
        p
    }

    /// Inserts the point at parameter `t` of edge `edge` as a waypoint and
    /// returns the new path plus the node index of the point. Points within
    /// `SNAP_EPS` of an existing endpoint reuse that endpoint.
    pub fn insert_point(&self, edge: usize, t: f64) -> (Path, usize) {
        const SNAP_EPS: f64 = 1e-9;
        assert!(edge < self.len_edges(), "edge {edge} out of bounds");
        assert!((0.0..=1.0).contains(&t), "edge parameter {t} outside [0, 1]");
        let a = self.nodes[edge].config();
        let b = self.nodes[edge + 1].config();
        let q = interpolate(a, b, t);
        if distance(&q, a) <= SNAP_EPS {
            return (self.clone(), edge);
        }
        if distance(&q, b) <= SNAP_EPS {
            return (self.clone(), edge + 1);
        }
        let mut configs: Vec<Configuration> =
            self.nodes.iter().map(|n| n.config().clone()).collect();
        configs.insert(edge + 1, q);
        let mut p = Path::new(configs);
        p.obstruction = self.obstruction.map(|span| ObstructionSpan {
            first_edge: if span.first_edge > edge { span.first_edge + 1 } else { span.first_edge },
            last_edge: if span.last_edge >= edge { span.last_edge + 1 } else { span.last_edge },
        });
        (p, edge + 1)
    }

    /// Waypoints as plain coordinate rows, one per node (plot-ready dump).
    pub fn waypoint_rows(&self) -> Vec<Vec<f64>> {
        self.nodes.iter().map(|n| n.config().coords().to_vec()).collect()
    }

    /// The point at arc length `arc` from the start, clamped to the path.
    pub fn point_at_arc(&self, arc: f64) -> PathPoint {
        let arc = arc.clamp(0.0, self.geometric_length());
        if self.len_nodes() == 1 {
            return PathPoint { edge: 0, t: 0.0, arc: 0.0, config: self.start().clone(), dist: 0.0 };
        }
        // Last edge whose start is at or before `arc`; zero-length edges skip.
        let edge = match self.cum.binary_search_by(|c| c.partial_cmp(&arc).unwrap()) {
            Ok(i) => i.min(self.len_edges() - 1),
            Err(i) => i - 1,
        }
        .min(self.len_edges() - 1);
        let len = self.cum[edge + 1] - self.cum[edge];
        let t = if len == 0.0 { 0.0 } else { ((arc - self.cum[edge]) / len).clamp(0.0, 1.0) };
        let config = interpolate(self.nodes[edge].config(), self.nodes[edge + 1].config(), t);
        PathPoint { edge, t, arc, config, dist: 0.0 }
    }
}

/// The closest point of a path to some state, with enough context to insert
/// it as a waypoint.
#[derive(Debug, Clone)]
pub struct PathPoint {
    pub edge: usize,
    pub t: f64,
    pub arc: f64,
    pub config: Configuration,
    pub dist: f64,
}

/// Projects `state` onto `p`, restricted to arc lengths at or after
/// `min_arc`. When two edges are equidistant the earlier one wins, which
/// keeps the projection from jumping backward on self-approaching paths.
pub fn project_on_path(state: &Configuration, p: &Path, min_arc: f64) -> PathPoint {
    if p.len_nodes() == 1 {
        let config = p.start().clone();
        let dist = distance(state, &config);
        return PathPoint { edge: 0, t: 0.0, arc: 0.0, config, dist };
    }
    let min_arc = min_arc.clamp(0.0, p.geometric_length());
    let mut best: Option<PathPoint> = None;
    for edge in 0..p.len_edges() {
        let (lo, hi) = (p.cum[edge], p.cum[edge + 1]);
        if hi < min_arc {
            continue;
        }
        let a = p.nodes[edge].config();
        let b = p.nodes[edge + 1].config();
        let len = hi - lo;
        let t = if len == 0.0 {
            0.0
        } else {
            let dot: f64 = state
                .coords()
                .iter()
                .zip(a.coords().iter().zip(b.coords()))
                .map(|(s, (x, y))| (s - x) * (y - x))
                .sum();
            let t_lo = ((min_arc - lo) / len).clamp(0.0, 1.0);
            (dot / (len * len)).clamp(t_lo, 1.0)
        };
        let q = interpolate(a, b, t);
        let d = distance(state, &q);
        if best.as_ref().is_none_or(|b| d < b.dist) {
            best = Some(PathPoint { edge, t, arc: lo + t * len, config: q, dist: d });
        }
    }
    best.expect("path with edges always yields a projection")
}

/// The pre-computed path set plus the index of the path being executed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathSet {
    paths: Vec<Path>,
    current_index: usize,
}

impl PathSet {
    pub fn new(paths: Vec<Path>, current_index: usize) -> Self {
        assert!(current_index < paths.len(), "current index out of range");
        let goal = paths[current_index].goal();
        assert!(
            paths.iter().all(|p| p.goal() == goal),
            "all paths in a set must share the goal"
        );
        PathSet { paths, current_index }
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn current_index(&self) -> usize {
        self.current_index
    }

    pub fn current(&self) -> &Path {
        &self.paths[self.current_index]
    }

    /// The alternatives: every path except the current one, in set order.
    pub fn others(&self) -> impl Iterator<Item = &Path> {
        self.paths
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.current_index)
            .map(|(_, p)| p)
    }

    pub fn replace_current(&mut self, p: Path) {
        assert!(p.goal() == self.paths[self.current_index].goal());
        self.paths[self.current_index] = p;
    }

    pub fn set_obstruction(&mut self, index: usize, span: Option<ObstructionSpan>) {
        self.paths[index] = self.paths[index].with_obstruction(span);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(v: &[f64]) -> Configuration {
        Configuration::new(v.to_vec())
    }

    fn line_path(points: &[[f64; 3]]) -> Path {
        Path::new(points.iter().map(|p| cfg(p)).collect())
    }

    #[test]
    fn cost_of_unit_edge() {
        let p = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        assert_eq!(p.cost(), Cost::Finite(1.0));
    }

    #[test]
    fn obstructed_path_costs_infinite() {
        let p = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
            .with_obstruction(Some(ObstructionSpan { first_edge: 0, last_edge: 0 }));
        assert_eq!(p.cost(), Cost::Infinite);
    }

    #[test]
    fn collinear_costs_add() {
        let p = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        assert_eq!(p.cost(), Cost::Finite(2.0));
    }

    #[test]
    fn full_range_subpath_is_identity() {
        let p = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 2.0, 0.0]]);
        let s = p.subpath(0, p.len_nodes() - 1);
        assert_eq!(s.nodes(), p.nodes());
        assert_eq!(s.cost(), p.cost());
    }

    #[test]
    fn degenerate_subpath_has_zero_cost() {
        let p = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let s = p.subpath(1, 1);
        assert_eq!(s.len_nodes(), 1);
        assert_eq!(s.cost(), Cost::Finite(0.0));
    }

    #[test]
    fn subpath_cost_is_complementary() {
        let p = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 3.0, 0.0]]);
        let tail = p.subpath(1, 2);
        let expected = p.geometric_length() - 1.0;
        assert!((tail.geometric_length() - expected).abs() < 1e-12);
    }

    #[test]
    fn concat_identity_with_degenerate_endpoint() {
        let p = line_path(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        let end = p.subpath(1, 1);
        let q = p.concat(&end, 0.05);
        assert_eq!(q.nodes(), p.nodes());
        assert_eq!(q.cost(), p.cost());
    }

    #[test]
    fn concat_adds_costs() {
        let p1 = line_path(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        let p2 = line_path(&[[2.0, 0.0, 0.0], [2.0, 3.0, 0.0]]);
        let q = p1.concat(&p2, 0.05);
        assert_eq!(q.cost(), Cost::Finite(5.0));
        assert_eq!(q.len_nodes(), 3);
    }

    #[test]
    fn concat_absorbs_infinite_cost() {
        let p1 = line_path(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        let p2 = line_path(&[[2.0, 0.0, 0.0], [2.0, 3.0, 0.0]])
            .with_obstruction(Some(ObstructionSpan { first_edge: 0, last_edge: 0 }));
        assert_eq!(p1.concat(&p2, 0.05).cost(), Cost::Infinite);
    }

    #[test]
    #[should_panic(expected = "concat endpoint mismatch")]
    fn concat_rejects_gap() {
        let p1 = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let p2 = line_path(&[[5.0, 0.0, 0.0], [6.0, 0.0, 0.0]]);
        p1.concat(&p2, 0.05);
    }

    #[test]
    fn tail_cost_respects_span() {
        let p = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [3.0, 0.0, 0.0]])
            .with_obstruction(Some(ObstructionSpan { first_edge: 1, last_edge: 1 }));
        assert_eq!(p.tail_cost(0), Cost::Infinite);
        assert_eq!(p.tail_cost(1), Cost::Infinite);
        assert_eq!(p.tail_cost(2), Cost::Finite(1.0));
        assert_eq!(p.tail_cost(3), Cost::Finite(0.0));
    }

    #[test]
    fn projection_hits_waypoint_exactly() {
        let p = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]);
        let pp = project_on_path(&cfg(&[1.0, 0.0, 0.0]), &p, 0.0);
        assert_eq!(pp.config, cfg(&[1.0, 0.0, 0.0]));
        assert!(pp.dist < 1e-12);
    }

    #[test]
    fn projection_orthogonal_drop() {
        let p = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let pp = project_on_path(&cfg(&[0.5, 0.3, 0.0]), &p, 0.0);
        assert_eq!(pp.config, cfg(&[0.5, 0.0, 0.0]));
        assert!((pp.dist - 0.3).abs() < 1e-12);
    }

    #[test]
    fn projection_tie_breaks_to_earlier_edge() {
        // U-shaped path: the state sits exactly between the two parallel legs.
        let p = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]);
        let pp = project_on_path(&cfg(&[0.5, 0.5, 0.0]), &p, 0.0);
        assert_eq!(pp.edge, 0);
    }

    #[test]
    fn projection_is_monotone_along_execution() {
        let p = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]);
        let mut arc = 0.0;
        for k in 0..=30 {
            // March a noisy state along the path.
            let s = k as f64 / 30.0 * p.geometric_length();
            let edge = p.cum.iter().rposition(|&c| c <= s + 1e-12).unwrap().min(p.len_edges() - 1);
            let t = ((s - p.cum[edge]) / (p.cum[edge + 1] - p.cum[edge])).clamp(0.0, 1.0);
            let mut state = interpolate(p.nodes[edge].config(), p.nodes[edge + 1].config(), t);
            state = Configuration::new(
                state.coords().iter().enumerate().map(|(i, c)| c + 0.01 * ((k + i) as f64).sin()).collect(),
            );
            let pp = project_on_path(&state, &p, arc);
            assert!(pp.arc + 1e-12 >= arc, "projection moved backward");
            arc = pp.arc;
        }
    }

    #[test]
    fn insert_point_splits_edge_and_remaps_span() {
        let p = line_path(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
            .with_obstruction(Some(ObstructionSpan { first_edge: 1, last_edge: 1 }));
        let (q, idx) = p.insert_point(0, 0.5);
        assert_eq!(idx, 1);
        assert_eq!(q.len_nodes(), 4);
        assert_eq!(q.obstruction(), Some(ObstructionSpan { first_edge: 2, last_edge: 2 }));
        // Snapping to an existing endpoint does not insert.
        let (q2, idx2) = p.insert_point(0, 1.0);
        assert_eq!(q2.len_nodes(), 3);
        assert_eq!(idx2, 1);
    }

    fn arb_path() -> impl Strategy<Value = Path> {
        prop::collection::vec(prop::collection::vec(-5.0..5.0_f64, 3), 2..8).prop_map(|pts| {
            Path::new(pts.into_iter().map(Configuration::new).collect())
        })
    }

    proptest! {
        #[test]
        fn subpath_concat_roundtrip(p in arb_path(), split in 0usize..8) {
            let k = split.min(p.len_nodes() - 1);
            let head = p.subpath(0, k);
            let tail = p.subpath(k, p.len_nodes() - 1);
            let rebuilt = head.concat(&tail, 1e-9);
            prop_assert_eq!(rebuilt.nodes(), p.nodes());
            prop_assert!((rebuilt.geometric_length() - p.geometric_length()).abs() < 1e-9);
        }

        #[test]
        fn cost_is_sum_of_edge_distances(p in arb_path()) {
            let direct: f64 = (0..p.len_edges())
                .map(|i| distance(p.node(i).config(), p.node(i + 1).config()))
                .sum();
            prop_assert!((p.geometric_length() - direct).abs() < 1e-9);
            prop_assert!(p.geometric_length() >= 0.0);
        }
    }
}
