//! Anytime path re-planning and optimization for robots in changing environments.
//!
//! Given a set of pre-computed paths to a goal, the library continuously
//! improves the path a simulated robot is executing and re-plans around
//! obstacles that appear at runtime. The re-planner connects nodes of the
//! current path to nodes of the alternative paths through informed
//! ellipsoidal sampling, under strict per-cycle time budgets, while three
//! concurrent loops (trajectory execution, collision checking, re-planning)
//! drive the robot towards the goal.
//!
//! Module layout:
//! - [`cspace`]: configuration space, robot geometry, collision queries;
//! - [`paths`]: waypoint paths with extended (infinite-on-obstruction) cost;
//! - [`planners`]: samplers, RRT-Connect, RRT* and the ellipsoid connector;
//! - [`replanner`]: path switching and informed online re-planning;
//! - [`executor`]: the three-loop episode driver over a simulated or wall clock;
//! - [`bench`]: scenario files, the experimental protocol, metrics and exports.

pub mod bench;
pub mod cspace;
pub mod error;
pub mod executor;
pub mod paths;
pub mod planners;
pub mod replanner;

pub use error::Error;

/// Convenience result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
