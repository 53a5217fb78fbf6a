//! Search tree shared by the RRT planners: vertices with parent links and
//! cached cost-to-root. Nearest-neighbor queries use a kd-tree up to three
//! dimensions and a linear scan above that, where kd-trees stop paying off
//! for trees this small.

use crate::cspace::{distance, Configuration};

use super::kdtree::KdTree;

#[derive(Debug, Clone)]
pub struct TreeVertex {
    pub config: Configuration,
    pub parent: Option<usize>,
    pub edge_cost: f64,
    pub cost: f64,
}

#[derive(Debug, Clone)]
enum NnIndex {
    Kd(KdTree),
    Linear,
}

#[derive(Debug, Clone)]
pub struct Tree {
    vertices: Vec<TreeVertex>,
    children: Vec<Vec<usize>>,
    nn: NnIndex,
}

impl Tree {
    pub fn new(root: Configuration) -> Self {
        let nn = if root.dim() <= 3 {
            let mut kd = KdTree::new();
            kd.insert(root.coords(), 0);
            NnIndex::Kd(kd)
        } else {
            NnIndex::Linear
        };
        Tree {
            vertices: vec![TreeVertex { config: root, parent: None, edge_cost: 0.0, cost: 0.0 }],
            children: vec![Vec::new()],
            nn,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a tree always has its root
    }

    pub fn vertex(&self, i: usize) -> &TreeVertex {
        &self.vertices[i]
    }

    pub fn cost(&self, i: usize) -> f64 {
        self.vertices[i].cost
    }

    pub fn add(&mut self, config: Configuration, parent: usize, edge_cost: f64) -> usize {
        let idx = self.vertices.len();
        let cost = self.vertices[parent].cost + edge_cost;
        if let NnIndex::Kd(kd) = &mut self.nn {
            kd.insert(config.coords(), idx);
        }
        self.vertices.push(TreeVertex { config, parent: Some(parent), edge_cost, cost });
        self.children.push(Vec::new());
        self.children[parent].push(idx);
        idx
    }

    /// Index of the vertex closest to `q`.
    pub fn nearest(&self, q: &Configuration) -> usize {
        match &self.nn {
            NnIndex::Kd(kd) => kd.nearest(q.coords()).expect("tree is never empty").0,
            NnIndex::Linear => self
                .vertices
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    distance(&a.config, q).partial_cmp(&distance(&b.config, q)).unwrap()
                })
                .unwrap()
                .0,
        }
    }

    /// Vertices within `radius` of `q`, in index order (deterministic).
    pub fn near(&self, q: &Configuration, radius: f64) -> Vec<usize> {
        let mut out = match &self.nn {
            NnIndex::Kd(kd) => kd.within_radius(q.coords(), radius),
            NnIndex::Linear => self
                .vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| distance(&v.config, q) <= radius)
                .map(|(i, _)| i)
                .collect(),
        };
        out.sort_unstable();
        out
    }

    /// The `k` vertices closest to `q`, ascending by distance (ties by
    /// index). A linear scan: tree sizes stay small enough that the scan is
    /// noise next to the collision checks it feeds.
    pub fn k_nearest(&self, q: &Configuration, k: usize) -> Vec<usize> {
        let mut dists: Vec<(f64, usize)> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (distance(&v.config, q), i))
            .collect();
        dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        dists.truncate(k);
        dists.into_iter().map(|(_, i)| i).collect()
    }

    /// Re-hangs `v` under `parent` and propagates the cost change through
    /// the subtree.
    pub fn set_parent(&mut self, v: usize, parent: usize, edge_cost: f64) {
        assert!(v != 0, "cannot reparent the root");
        assert!(!self.is_descendant(parent, v), "reparenting would create a cycle");
        if let Some(old) = self.vertices[v].parent {
            self.children[old].retain(|&c| c != v);
        }
        self.vertices[v].parent = Some(parent);
        self.vertices[v].edge_cost = edge_cost;
        self.children[parent].push(v);
        // Recompute costs down the subtree.
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            let parent_cost = self.vertices[u].parent.map_or(0.0, |p| self.vertices[p].cost);
            self.vertices[u].cost = parent_cost + self.vertices[u].edge_cost;
            stack.extend(self.children[u].iter().copied());
        }
    }

    fn is_descendant(&self, candidate: usize, ancestor: usize) -> bool {
        let mut cur = Some(candidate);
        while let Some(u) = cur {
            if u == ancestor {
                return true;
            }
            cur = self.vertices[u].parent;
        }
        false
    }

    /// Configurations from the root to vertex `v`, inclusive.
    pub fn chain_from_root(&self, v: usize) -> Vec<Configuration> {
        let mut chain = Vec::new();
        let mut cur = Some(v);
        while let Some(u) = cur {
            chain.push(self.vertices[u].config.clone());
            cur = self.vertices[u].parent;
        }
        chain.reverse();
        chain
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: &[f64]) -> Configuration {
        Configuration::new(v.to_vec())
    }

    #[test]
    fn cost_to_root_accumulates() {
        let mut t = Tree::new(cfg(&[0.0, 0.0, 0.0]));
        let a = t.add(cfg(&[1.0, 0.0, 0.0]), 0, 1.0);
        let b = t.add(cfg(&[1.0, 2.0, 0.0]), a, 2.0);
        assert_eq!(t.cost(b), 3.0);
        assert_eq!(t.chain_from_root(b).len(), 3);
    }

    #[test]
    fn reparenting_updates_subtree_costs() {
        let mut t = Tree::new(cfg(&[0.0, 0.0, 0.0]));
        let a = t.add(cfg(&[3.0, 0.0, 0.0]), 0, 3.0);
        let b = t.add(cfg(&[3.0, 1.0, 0.0]), a, 1.0);
        let c = t.add(cfg(&[0.0, 1.0, 0.0]), 0, 1.0);
        // Shorter route to `a` through `c`.
        t.set_parent(a, c, 1.5);
        assert_eq!(t.cost(a), 2.5);
        assert_eq!(t.cost(b), 3.5);
    }

    #[test]
    fn nearest_in_high_dimension_uses_linear_scan() {
        let mut t = Tree::new(cfg(&[0.0; 6]));
        let far = t.add(cfg(&[1.0, 1.0, 1.0, 1.0, 1.0, 1.0]), 0, 2.44);
        assert_eq!(t.nearest(&cfg(&[0.9, 1.0, 1.0, 1.0, 1.0, 1.0])), far);
        assert_eq!(t.nearest(&cfg(&[0.1, 0.0, 0.0, 0.0, 0.0, 0.0])), 0);
    }

    #[test]
    fn vertex_cost_equals_edge_sum_along_parents() {
        let mut t = Tree::new(cfg(&[0.0, 0.0, 0.0]));
        let mut prev = 0;
        for i in 1..=5 {
            prev = t.add(cfg(&[i as f64, 0.0, 0.0]), prev, 1.0);
        }
        let mut cur = Some(prev);
        let mut sum = 0.0;
        while let Some(u) = cur {
            sum += t.vertex(u).edge_cost;
            cur = t.vertex(u).parent;
        }
        assert_eq!(sum, t.cost(prev));
    }
}
