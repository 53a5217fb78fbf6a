//! Quality metrics: the relative-length index of each accepted re-plan and
//! the per-mode aggregate table.

use serde::{Deserialize, Serialize};

use crate::replanner::BudgetMode;

/// Percent relative variation of the path length: positive when the new
/// path is shorter.
///
/// Panics on non-finite or non-positive previous length (contract
/// violation): the index is only recorded for finite pre/post lengths.
pub fn quality_index(cur_len: f64, new_len: f64) -> f64 {
    assert!(
        cur_len.is_finite() && new_len.is_finite(),
        "quality index needs finite lengths, got {cur_len} and {new_len}"
    );
    assert!(cur_len > 0.0, "previous length must be positive, got {cur_len}");
    100.0 * (cur_len - new_len) / cur_len
}

/// One accepted re-plan, as written to the metrics stream. Every field is
/// deterministic for a fixed scenario and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub trial: usize,
    pub mode: BudgetMode,
    pub delta_pct: f64,
    pub replan_time_s: f64,
    pub replan_time_ms: f64,
    /// Simulated timestamp of the re-plan completion.
    pub t_sim: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeAggregate {
    pub count: usize,
    pub mean_delta_pct: f64,
    pub std_delta_pct: f64,
    pub mean_time_s: f64,
    pub std_time_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateTable {
    pub avoidance: ModeAggregate,
    pub optimization: ModeAggregate,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    // Sample (n-1) convention.
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn aggregate_mode(records: &[&MetricsRecord]) -> ModeAggregate {
    let deltas: Vec<f64> = records.iter().map(|r| r.delta_pct).collect();
    let times: Vec<f64> = records.iter().map(|r| r.replan_time_s).collect();
    let (mean_delta_pct, std_delta_pct) = mean_std(&deltas);
    let (mean_time_s, std_time_s) = mean_std(&times);
    ModeAggregate { count: records.len(), mean_delta_pct, std_delta_pct, mean_time_s, std_time_s }
}

pub fn aggregate(records: &[MetricsRecord]) -> AggregateTable {
    let avoidance: Vec<&MetricsRecord> =
        records.iter().filter(|r| r.mode == BudgetMode::Avoidance).collect();
    let optimization: Vec<&MetricsRecord> =
        records.iter().filter(|r| r.mode == BudgetMode::Optimization).collect();
    AggregateTable {
        avoidance: aggregate_mode(&avoidance),
        optimization: aggregate_mode(&optimization),
    }
}

impl AggregateTable {
    /// Human-readable summary mirroring the per-mode layout of the results
    /// tables: mean/std of the length variation and of the re-planning
    /// time, plus the number of re-plans.
    pub fn render(&self, title: &str) -> String {
        let mut out = String::new();
        use std::fmt::Write;
        let _ = writeln!(out, "{title}");
        let _ = writeln!(
            out,
            "{:<28} {:>18} {:>18}",
            "", "obstacle avoidance", "path optimization"
        );
        type Cell = fn(&ModeAggregate) -> String;
        let rows: [(&str, Cell); 5] = [
            ("mean(delta) (%)", |m| format!("{:.2}", m.mean_delta_pct)),
            ("std(delta) (%)", |m| format!("{:.2}", m.std_delta_pct)),
            ("mean(time) (ms)", |m| format!("{:.3}", m.mean_time_s * 1e3)),
            ("std(time) (ms)", |m| format!("{:.3}", m.std_time_s * 1e3)),
            ("number of re-plans", |m| format!("{}", m.count)),
        ];
        for (label, f) in rows {
            let _ = writeln!(out, "{:<28} {:>18} {:>18}", label, f(&self.avoidance), f(&self.optimization));
        }
        out
    }
}
