//! Command-line entry point: run the experimental protocol over a scenario
//! file, validate a scenario, or export plot-ready dumps from a stored
//! episode log.

use clap::{Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

use anyplan::bench::{export_paths, load_scenario, metrics_ndjson, run_protocol};
use anyplan::executor::{ClockMode, EpisodeLog};

#[derive(Parser)]
#[command(name = "anyplan", version, about = "Anytime path re-planning among moving obstacles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol described by a scenario file.
    Run {
        scenario: PathBuf,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the scenario trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Output directory for metrics, logs and the summary table.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Run the episode loops as free-running threads on the wall clock
        /// instead of the deterministic simulated clock.
        #[arg(long)]
        wall_clock: bool,
    },
    /// Parse and validate a scenario file.
    Validate { scenario: PathBuf },
    /// Write plot-ready path/obstacle/trajectory dumps from an episode log.
    Export { log: PathBuf, dir: PathBuf },
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        let mut source = std::error::Error::source(&e);
        while let Some(s) = source {
            eprintln!("  caused by: {s}");
            source = s.source();
        }
        std::process::exit(1);
    }
}

fn run() -> anyplan::Result<()> {
    match Cli::parse().command {
        Command::Run { scenario, seed, trials, out, wall_clock } => {
            let mut scn = load_scenario(&scenario.to_string_lossy())?;
            for w in &scn.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(s) = seed {
                scn.seed = s;
            }
            if let Some(t) = trials {
                scn.trials = t;
            }
            let mode = if wall_clock { ClockMode::Wall } else { ClockMode::Simulated };
            let result = run_protocol(&scn, mode);

            std::fs::create_dir_all(&out)?;
            std::fs::write(out.join("metrics.ndjson"), metrics_ndjson(&result.records))?;

            let mut summary = result.table.render(&format!(
                "{} | trials: {} completed, {} skipped",
                scn.name,
                result.trials.len(),
                result.skipped.len()
            ));
            let goals = result.trials.iter().filter(|t| t.log.outcome.goal_reached).count();
            let stops: usize = result.trials.iter().map(|t| t.log.outcome.safety_stops).sum();
            summary.push_str(&format!(
                "goal reached in {goals}/{} trials; safety stops: {stops}\n",
                result.trials.len()
            ));
            for (trial, reason) in &result.skipped {
                summary.push_str(&format!("trial {trial} skipped: {reason}\n"));
            }
            std::fs::write(out.join("summary.txt"), &summary)?;
            print!("{summary}");

            for t in &result.trials {
                let dir = out.join(format!("trial_{:03}", t.trial));
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("episode.json"), t.log.to_json()?)?;
                let mut f = std::fs::File::create(dir.join("events.log"))?;
                f.write_all(t.log.event_lines().as_bytes())?;
            }

            if result.trials.is_empty() && scn.trials > 0 {
                return Err(anyplan::Error::InitialPlanning(
                    "every trial failed initial planning".to_string(),
                ));
            }
            Ok(())
        }
        Command::Validate { scenario } => {
            let scn = load_scenario(&scenario.to_string_lossy())?;
            for w in &scn.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "ok: {} (dimension {}, {} static boxes, {} spawns, {} trials)",
                scn.name,
                scn.dimension,
                scn.static_boxes.len(),
                scn.exec.spawns.len(),
                scn.trials
            );
            Ok(())
        }
        Command::Export { log, dir } => {
            let text = std::fs::read_to_string(&log)?;
            let episode = EpisodeLog::from_json(&text)?;
            export_paths(&episode, &dir)?;
            println!("exported to {}", dir.display());
            Ok(())
        }
    }
}
