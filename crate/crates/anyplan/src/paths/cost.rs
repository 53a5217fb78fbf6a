//! Extended path cost: a non-negative length, or an infinite sentinel for
//! obstructed paths. The sentinel absorbs addition and compares above every
//! finite value, so pruning inequalities hold exactly when a path is
//! infeasible.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cost {
    Finite(f64),
    Infinite,
}

impl Cost {
    pub fn is_finite(&self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Cost::Finite(v) => Some(*v),
            Cost::Infinite => None,
        }
    }

    /// Numeric view for logs; infinite maps to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        match self {
            Cost::Finite(v) => *v,
            Cost::Infinite => f64::INFINITY,
        }
    }
}

impl From<f64> for Cost {
    fn from(v: f64) -> Self {
        assert!(!v.is_nan(), "cost cannot be NaN");
        if v.is_infinite() {
            Cost::Infinite
        } else {
            assert!(v >= 0.0, "finite cost must be non-negative: {v}");
            Cost::Finite(v)
        }
    }
}

impl std::ops::Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Cost) -> Option<Ordering> {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.partial_cmp(b),
            (Cost::Finite(_), Cost::Infinite) => Some(Ordering::Less),
            (Cost::Infinite, Cost::Finite(_)) => Some(Ordering::Greater),
            (Cost::Infinite, Cost::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl std::fmt::Display for Cost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cost::Finite(v) => write!(f, "{v}"),
            Cost::Infinite => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_is_absorbing() {
        assert_eq!(Cost::Finite(2.0) + Cost::Finite(3.0), Cost::Finite(5.0));
        assert_eq!(Cost::Finite(2.0) + Cost::Infinite, Cost::Infinite);
        assert_eq!(Cost::Infinite + Cost::Infinite, Cost::Infinite);
    }

    #[test]
    fn ordering_places_infinite_on_top() {
        assert!(Cost::Finite(1e12) < Cost::Infinite);
        assert!(Cost::Infinite > Cost::Finite(0.0));
        assert!(!(Cost::Infinite < Cost::Infinite));
        assert!(Cost::Finite(1.0) < Cost::Finite(2.0));
    }
}
