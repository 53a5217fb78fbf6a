//! Configuration-space samplers: componentwise uniform over a box, and the
//! informed hyper-ellipsoid whose foci are the connector endpoints and whose
//! focal-sum bound is the cost budget. Points outside the ellipsoid cannot
//! improve the incumbent, so restricting samples to it loses nothing.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cspace::{distance, Configuration};
use crate::Error;

/// Axis-aligned sampling box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SamplingBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert!(lower.len() == upper.len() && !lower.is_empty());
        assert!(
            lower.iter().zip(&upper).all(|(l, u)| l <= u),
            "lower bound must not exceed upper bound"
        );
        SamplingBounds { lower, upper }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, q: &Configuration) -> bool {
        q.coords()
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(c, (l, u))| c >= l && c <= u)
    }

    /// Volume of the box, used for the RRT* rewiring radius.
    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }
}

/// Componentwise uniform draw.
pub fn sample_uniform<R: Rng>(bounds: &SamplingBounds, rng: &mut R) -> Configuration {
    Configuration::new(
        bounds
            .lower
            .iter()
            .zip(&bounds.upper)
            .map(|(&l, &u)| if l == u { l } else { rng.random_range(l..=u) })
            .collect(),
    )
}

/// The hyper-ellipsoid of configurations whose focal-distance sum stays
/// below `cost_bound`: semi-axis `cost_bound / 2` along the focal axis,
/// `sqrt(cost_bound^2 - c_min^2) / 2` across it.
#[derive(Debug, Clone)]
pub struct InformedRegion {
    focus_a: Configuration,
    focus_b: Configuration,
    cost_bound: f64,
    c_min: f64,
    center: Vec<f64>,
    /// Householder vector mapping e1 onto the focal axis (empty = identity).
    householder: Vec<f64>,
    radii: Vec<f64>,
}

impl InformedRegion {
    /// Fails with [`Error::EmptyInformedRegion`] when the bound does not
    /// exceed the focal distance (the ellipsoid has no interior).
    pub fn new(
        focus_a: Configuration,
        focus_b: Configuration,
        cost_bound: f64,
    ) -> crate::Result<Self> {
        let c_min = distance(&focus_a, &focus_b);
        // Negated form on purpose: a NaN bound must land in the error arm.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(cost_bound > c_min) {
            return Err(Error::EmptyInformedRegion { cost_bound, focal_distance: c_min });
        }
        let d = focus_a.dim();
        let center: Vec<f64> = focus_a
            .coords()
            .iter()
            .zip(focus_b.coords())
            .map(|(a, b)| 0.5 * (a + b))
            .collect();

        let householder = if c_min > 0.0 {
            // v = e1 - a1 reflects e1 onto the focal axis direction a1.
            let mut v: Vec<f64> = focus_b
                .coords()
                .iter()
                .zip(focus_a.coords())
                .map(|(b, a)| -(b - a) / c_min)
                .collect();
            v[0] += 1.0;
            let norm2: f64 = v.iter().map(|x| x * x).sum();
            if norm2 < 1e-24 {
                Vec::new()
            } else {
                v
            }
        } else {
            Vec::new()
        };

        let transverse = (cost_bound * cost_bound - c_min * c_min).sqrt() / 2.0;
        let mut radii = vec![transverse; d];
        radii[0] = cost_bound / 2.0;

        Ok(InformedRegion { focus_a, focus_b, cost_bound, c_min, center, householder, radii })
    }

    pub fn cost_bound(&self) -> f64 {
        self.cost_bound
    }

    pub fn focal_distance(&self) -> f64 {
        self.c_min
    }

    /// Strict membership test from the defining inequality.
    pub fn contains(&self, q: &Configuration) -> bool {
        distance(q, &self.focus_a) + distance(&self.focus_b, q) < self.cost_bound
    }

    /// One draw; returns the sample and the number of rejected attempts.
    pub fn sample_counting<R: Rng>(
        &self,
        bounds: &SamplingBounds,
        rng: &mut R,
        rejection_budget: u32,
    ) -> crate::Result<(Configuration, u32)> {
        let d = self.center.len();
        let mut rejected = 0;
        while rejected <= rejection_budget {
            let ball = sample_unit_ball(d, rng);
            let mut y: Vec<f64> = ball.iter().zip(&self.radii).map(|(x, r)| x * r).collect();
            if !self.householder.is_empty() {
                let v = &self.householder;
                let vv: f64 = v.iter().map(|x| x * x).sum();
                let proj: f64 = y.iter().zip(v).map(|(a, b)| a * b).sum();
                let k = 2.0 * proj / vv;
                for (yi, vi) in y.iter_mut().zip(v) {
                    *yi -= k * vi;
                }
            }
            for (yi, c) in y.iter_mut().zip(&self.center) {
                *yi += c;
            }
            let q = Configuration::new(y);
            // Guard against boundary round-off: membership is strict.
            if self.contains(&q) && bounds.contains(&q) {
                return Ok((q, rejected));
            }
            rejected += 1;
        }
        Err(Error::SamplingExhausted { attempts: rejected })
    }
}

/// Draw from the informed region, rejecting against the bounds.
pub fn sample_informed<R: Rng>(
    region: &InformedRegion,
    bounds: &SamplingBounds,
    rng: &mut R,
    rejection_budget: u32,
) -> crate::Result<Configuration> {
    region.sample_counting(bounds, rng, rejection_budget).map(|(q, _)| q)
}

/// Uniform point of the unit d-ball: gaussian direction, radius `u^(1/d)`.
fn sample_unit_ball<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| gaussian(rng)).collect();
        let norm: f64 = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let radius = rng.random_range(0.0..1.0_f64).powf(1.0 / d as f64);
        return g.into_iter().map(|x| x / norm * radius).collect();
    }
}

/// Box-Muller standard normal.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// The sampler a planner draws from.
#[derive(Debug, Clone)]
pub enum Sampler {
    Uniform,
    Informed(InformedRegion),
}
