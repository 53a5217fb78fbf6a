//! Re-planning time budgets: the cycle budget switches between a reduced
//! value (current path obstructed, find anything fast) and a relaxed value
//! (current path fine, spend time improving it). Within one path-switch
//! call, once a feasible solution exists a new cycle only starts if the
//! remaining time exceeds the mean duration of the previous successful
//! cycles, so one stubborn connector cannot eat the whole budget.

use serde::{Deserialize, Serialize};

use crate::paths::CollisionReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetMode {
    Avoidance,
    Optimization,
}

impl std::fmt::Display for BudgetMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BudgetMode::Avoidance => write!(f, "avoidance"),
            BudgetMode::Optimization => write!(f, "optimization"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeBudget {
    pub reduced_time: f64,
    pub relaxed_time: f64,
    pub mode: BudgetMode,
}

impl TimeBudget {
    pub fn new(reduced_time: f64, relaxed_time: f64) -> Self {
        assert!(
            0.0 < reduced_time && reduced_time < relaxed_time,
            "need 0 < reduced ({reduced_time}) < relaxed ({relaxed_time})"
        );
        TimeBudget { reduced_time, relaxed_time, mode: BudgetMode::Optimization }
    }

    /// The cycle budget implied by the current mode.
    pub fn t_rp(&self) -> f64 {
        match self.mode {
            BudgetMode::Avoidance => self.reduced_time,
            BudgetMode::Optimization => self.relaxed_time,
        }
    }
}

/// Applies the collision verdict for the current path: obstructed means the
/// reduced budget, free means the relaxed one.
pub fn update_budget(report: &CollisionReport, budget: &TimeBudget) -> TimeBudget {
    TimeBudget {
        mode: if report.obstructed { BudgetMode::Avoidance } else { BudgetMode::Optimization },
        ..*budget
    }
}

/// Durations of the successful cycles within one path-switch call.
#[derive(Debug, Clone, Default)]
pub struct CycleTimeTracker {
    durations: Vec<f64>,
}

impl CycleTimeTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, duration: f64) {
        self.durations.push(duration);
    }

    pub fn len(&self) -> usize {
        self.durations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.durations.is_empty()
    }

    pub fn mean(&self) -> Option<f64> {
        if self.durations.is_empty() {
            None
        } else {
            Some(self.durations.iter().sum::<f64>() / self.durations.len() as f64)
        }
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }
}

/// Whether a new path-switch cycle may start. Before a feasible solution
/// exists the only constraint is positive remaining time; after, the
/// remaining time must exceed the mean of the previous successful cycles
/// (an empty tracker imposes no cap).
pub fn cycle_gate(tracker: &CycleTimeTracker, remaining: f64, has_solution: bool) -> bool {
    if !has_solution {
        return remaining > 0.0;
    }
    match tracker.mean() {
        Some(mean) => remaining > mean,
        None => remaining > 0.0,
    }
}
