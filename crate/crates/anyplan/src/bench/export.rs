//! Plot-ready exports: line-oriented text dumps of the initial path set,
//! every accepted re-planned path, the obstacle boxes and the traversed
//! state sequence. One row per waypoint, space-separated reals.

use std::io::Write;
use std::path::Path as FsPath;

use crate::executor::EpisodeLog;

fn write_rows(path: &FsPath, rows: &[Vec<f64>]) -> crate::Result<()> {
    let mut f = std::fs::File::create(path)?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(f, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Writes the episode's dumps into `out_dir` (created if missing):
///
/// - `initial_path_<k>.txt`: waypoints of each pre-computed path;
/// - `replan_<k>.txt`: waypoints of each accepted re-planned path, in order;
/// - `obstacles.txt`: one box per row as `cx cy cz hx hy hz spawn_time`
///   (static boxes use `-1` for the spawn time);
/// - `traversed.txt`: the executed state sequence, one configuration per
///   row (only written when non-empty).
pub fn export_paths(log: &EpisodeLog, out_dir: &FsPath) -> crate::Result<()> {
    std::fs::create_dir_all(out_dir)?;

    for (k, p) in log.initial_paths.iter().enumerate() {
        write_rows(&out_dir.join(format!("initial_path_{k}.txt")), &p.waypoint_rows())?;
    }

    let mut k = 0;
    for r in &log.replans {
        if let Some(p) = &r.path {
            write_rows(&out_dir.join(format!("replan_{k}.txt")), &p.waypoint_rows())?;
            k += 1;
        }
    }

    let obstacle_rows: Vec<Vec<f64>> = log
        .static_boxes
        .iter()
        .chain(log.spawned.iter())
        .map(|b| {
            vec![
                b.center.x,
                b.center.y,
                b.center.z,
                b.half_extents.x,
                b.half_extents.y,
                b.half_extents.z,
                b.spawn_time.unwrap_or(-1.0),
            ]
        })
        .collect();
    write_rows(&out_dir.join("obstacles.txt"), &obstacle_rows)?;

    if !log.traversed.is_empty() {
        let rows: Vec<Vec<f64>> =
            log.traversed.iter().map(|s| s.config.coords().to_vec()).collect();
        write_rows(&out_dir.join("traversed.txt"), &rows)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cspace::{geom::Vec3, BoxObstacle, Configuration};
    use crate::executor::{EpisodeOutcome, ReplanRecord, TraversedSample};
    use crate::paths::{Cost, Path};
    use crate::replanner::BudgetMode;

    fn cfg(v: &[f64]) -> Configuration {
        Configuration::new(v.to_vec())
    }

    fn sample_record(accepted: bool) -> ReplanRecord {
        let path = Path::new(vec![cfg(&[0.0, 0.0, 0.0]), cfg(&[1.0, 0.0, 0.0])]);
        ReplanRecord {
            t_start: 0.0,
            t_done: 0.1,
            mode: BudgetMode::Optimization,
            budget_s: 0.1,
            prev_length: 2.0,
            prev_cost: Cost::Finite(2.0),
            new_length: 1.0,
            new_cost: Cost::Finite(1.0),
            accepted,
            elapsed_s: 0.05,
            wall_s: 0.001,
            mean_cycle_s: None,
            cycle_count: 0,
            snapshot_time: 0.0,
            path: if accepted { Some(path) } else { None },
        }
    }

    fn empty_log() -> EpisodeLog {
        EpisodeLog {
            initial_paths: vec![Path::new(vec![cfg(&[0.0, 0.0, 0.0]), cfg(&[1.0, 0.0, 0.0])])],
            initial_index: 0,
            static_boxes: vec![BoxObstacle::new_static(Vec3::ZERO, Vec3::new(0.1, 0.1, 0.1))],
            spawned: vec![],
            events: vec![],
            replans: vec![],
            traversed: vec![],
            outcome: EpisodeOutcome {
                goal_reached: false,
                goal_time: None,
                safety_stops: 0,
                end_time: 0.0,
                skipped_spawns: 0,
            },
        }
    }

    #[test]
    fn empty_log_writes_obstacles_and_initial_paths_only() {
        let dir = std::env::temp_dir().join("anyplan_export_empty");
        let _ = std::fs::remove_dir_all(&dir);
        export_paths(&empty_log(), &dir).unwrap();
        let names: Vec<String> = std::fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        assert!(names.contains(&"obstacles.txt".to_string()));
        assert!(names.contains(&"initial_path_0.txt".to_string()));
        assert_eq!(names.len(), 2, "{names:?}");
    }

    #[test]
    fn accepted_replans_produce_exactly_that_many_files() {
        let mut log = empty_log();
        log.replans = vec![sample_record(true), sample_record(false), sample_record(true)];
        log.traversed = vec![
            TraversedSample { t: 0.0, config: cfg(&[0.0, 0.0, 0.0]) },
            TraversedSample { t: 0.01, config: cfg(&[0.01, 0.0, 0.0]) },
        ];
        let dir = std::env::temp_dir().join("anyplan_export_two");
        let _ = std::fs::remove_dir_all(&dir);
        export_paths(&log, &dir).unwrap();
        assert!(dir.join("replan_0.txt").exists());
        assert!(dir.join("replan_1.txt").exists());
        assert!(!dir.join("replan_2.txt").exists());
        let traversed = std::fs::read_to_string(dir.join("traversed.txt")).unwrap();
        assert_eq!(traversed.lines().count(), 2);
        let first_line = traversed.lines().next().unwrap();
        assert_eq!(first_line.split(' ').count(), 3);
    }
}
