//! Episode clock: a deterministic simulated clock stepped by the scheduler,
//! or the wall clock for realism runs.

use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockMode {
    Simulated,
    Wall,
}

#[derive(Debug)]
pub enum SimClock {
    Simulated { now: f64 },
    Wall { start: Instant },
}

impl SimClock {
    pub fn new(mode: ClockMode) -> Self {
        match mode {
            ClockMode::Simulated => SimClock::Simulated { now: 0.0 },
            ClockMode::Wall => SimClock::Wall { start: Instant::now() },
        }
    }

    pub fn now(&self) -> f64 {
        match self {
            SimClock::Simulated { now } => *now,
            SimClock::Wall { start } => start.elapsed().as_secs_f64(),
        }
    }

    /// Advances a simulated clock; time never moves backward.
    pub fn advance_to(&mut self, t: f64) {
        if let SimClock::Simulated { now } = self {
            assert!(t + 1e-12 >= *now, "clock cannot move backward: {t} < {now}");
            *now = now.max(t);
        }
    }
}
