//! Crate-wide error type.
//!
//! Recoverable, data-driven failures are surfaced as [`Error`] values.
//! Contract violations (dimension mismatches, out-of-range interpolation
//! parameters, subpath endpoints that are not on the path, ...) are panics:
//! they indicate caller bugs, not runtime conditions.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The informed region has no interior: the cost bound does not exceed
    /// the distance between the two foci.
    #[error("informed region is empty: cost bound {cost_bound} <= focal distance {focal_distance}")]
    EmptyInformedRegion { cost_bound: f64, focal_distance: f64 },

    /// The rejection sampler gave up before finding a point inside both the
    /// ellipsoid and the sampling bounds.
    #[error("informed sampling exhausted after {attempts} rejected draws")]
    SamplingExhausted { attempts: u32 },

    /// A planner was asked to start from a configuration in collision.
    #[error("start configuration is in collision")]
    StartInCollision,

    /// A planner was asked to reach a configuration in collision.
    #[error("goal configuration is in collision")]
    GoalInCollision,

    /// Scenario file could not be read.
    #[error("cannot read scenario file {path}: {source}")]
    ScenarioRead {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Scenario file could not be parsed; the TOML error carries line/column
    /// diagnostics.
    #[error("cannot parse scenario file {path}: {source}")]
    ScenarioParse {
        path: String,
        #[source]
        source: Box<toml::de::Error>,
    },

    /// Scenario parsed but failed validation.
    #[error("invalid scenario, field `{field}`: {reason}")]
    ScenarioInvalid { field: String, reason: String },

    /// Initial path-set planning failed for a trial.
    #[error("initial planning failed: {0}")]
    InitialPlanning(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("cannot decode episode log: {0}")]
    LogDecode(#[from] serde_json::Error),
}
