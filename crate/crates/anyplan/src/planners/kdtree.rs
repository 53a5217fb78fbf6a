//! Incremental kd-tree for nearest-neighbor queries over low-dimensional
//! configurations. Tree vertices are inserted as planning progresses; no
//! rebalancing, which is fine for the few thousand vertices a budgeted
//! planner produces.

#[derive(Debug, Clone)]
struct KdNode {
    point: Vec<f64>,
    /// Caller-supplied payload, typically a tree vertex index.
    payload: usize,
    axis: usize,
    left: Option<usize>,
    right: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct KdTree {
    nodes: Vec<KdNode>,
}

impl KdTree {
    pub fn new() -> Self {
        KdTree { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn insert(&mut self, point: &[f64], payload: usize) {
        let dim = point.len();
        if self.nodes.is_empty() {
            self.nodes.push(KdNode { point: point.to_vec(), payload, axis: 0, left: None, right: None });
            return;
        }
        let mut cur = 0;
        loop {
            let axis = self.nodes[cur].axis;
            let go_left = point[axis] < self.nodes[cur].point[axis];
            let child = if go_left { self.nodes[cur].left } else { self.nodes[cur].right };
            match child {
                Some(c) => cur = c,
                None => {
                    let idx = self.nodes.len();
                    self.nodes.push(KdNode {
                        point: point.to_vec(),
                        payload,
                        axis: (axis + 1) % dim,
                        left: None,
                        right: None,
                    });
                    if go_left {
                        self.nodes[cur].left = Some(idx);
                    } else {
                        self.nodes[cur].right = Some(idx);
                    }
                    return;
                }
            }
        }
    }

    /// Payload and squared distance of the nearest stored point.
    pub fn nearest(&self, query: &[f64]) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (self.nodes[0].payload, f64::INFINITY);
        self.nearest_rec(0, query, &mut best);
        Some(best)
    }

    fn nearest_rec(&self, node: usize, query: &[f64], best: &mut (usize, f64)) {
        let n = &self.nodes[node];
        let d2 = dist2(&n.point, query);
        if d2 < best.1 {
            *best = (n.payload, d2);
        }
        let diff = query[n.axis] - n.point[n.axis];
        let (near, far) = if diff < 0.0 { (n.left, n.right) } else { (n.right, n.left) };
        if let Some(c) = near {
            self.nearest_rec(c, query, best);
        }
        if let Some(c) = far {
            if diff * diff < best.1 {
                self.nearest_rec(c, query, best);
            }
        }
    }

    /// Payloads of every stored point within `radius` of the query.
    pub fn within_radius(&self, query: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if !self.nodes.is_empty() {
            self.radius_rec(0, query, radius * radius, &mut out);
        }
        out
    }

    fn radius_rec(&self, node: usize, query: &[f64], r2: f64, out: &mut Vec<usize>) {
        let n = &self.nodes[node];
        if dist2(&n.point, query) <= r2 {
            out.push(n.payload);
        }
        let diff = query[n.axis] - n.point[n.axis];
        let (near, far) = if diff < 0.0 { (n.left, n.right) } else { (n.right, n.left) };
        if let Some(c) = near {
            self.radius_rec(c, query, r2, out);
        }
        if let Some(c) = far {
            if diff * diff <= r2 {
                self.radius_rec(c, query, r2, out);
            }
        }
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn nearest_matches_linear_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let points: Vec<Vec<f64>> = (0..500)
            .map(|_| (0..3).map(|_| rng.random_range(-5.0..5.0)).collect())
            .collect();
        let mut tree = KdTree::new();
        for (i, p) in points.iter().enumerate() {
            tree.insert(p, i);
        }
        for _ in 0..200 {
            let q: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let (found, d2) = tree.nearest(&q).unwrap();
            let brute = points
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| dist2(a, &q).partial_cmp(&dist2(b, &q)).unwrap())
                .unwrap()
                .0;
            assert!((d2 - dist2(&points[brute], &q)).abs() < 1e-12, "found {found}");
        }
    }

    #[test]
    fn radius_query_matches_linear_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        let points: Vec<Vec<f64>> = (0..300)
            .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let mut tree = KdTree::new();
        for (i, p) in points.iter().enumerate() {
            tree.insert(p, i);
        }
        for _ in 0..50 {
            let q: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let r = rng.random_range(0.1..1.5);
            let mut got = tree.within_radius(&q, r);
            got.sort_unstable();
            let mut expect: Vec<usize> = points
                .iter()
                .enumerate()
                .filter(|(_, p)| dist2(p, &q) <= r * r)
                .map(|(i, _)| i)
                .collect();
            expect.sort_unstable();
            assert_eq!(got, expect);
        }
    }
}
