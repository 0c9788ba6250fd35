//! Artificial bee colony optimizers and an ETV scheduling model for an
//! automated air-cargo warehouse.
//!
//! * [`colony`]: the optimizer (classic ABC plus full-dimensional,
//!   parallel full-dimensional and random multi-dimensional search).
//! * [`benchmarks`]: continuous test functions and a trial-statistics harness.
//! * [`kinematics`]: trapezoidal ETV travel times and the time-cost matrix.
//! * [`scheduling`]: warehouse layout, task set, random-key decoding and
//!   schedule evaluation.
//! * [`cli`]: the `beesched` command-line front end.

pub mod benchmarks;
pub mod cli;
pub mod colony;
pub mod config;
pub mod error;
pub mod kinematics;
pub mod scheduling;

pub use colony::{run, Bounds, Colony, ColonyConfig, FoodSource, Objective, RunResult, Strategy};
pub use error::{Error, Result};
pub use kinematics::{KinematicParams, Position, TimeMatrix};
