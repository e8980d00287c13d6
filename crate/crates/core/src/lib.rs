//! Simulation of positional tasks on a rhythmically moving 6-DOF platform.
//!
//! The crate models a tracked platform moving periodically, estimates the
//! motion from noisy camera samples, and compares three ways of issuing
//! robot commands against it: ignoring the motion, compensating every
//! command at its predicted completion time, and timing commands to land on
//! the motion's extrema. Cutting and debridement benchmarks sit on top, and
//! [`harness`] drives seeded Monte Carlo experiments from JSON scenarios.

pub mod control;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod motion;
pub mod rng;
pub mod sensing;
pub mod tasks;

pub use error::{Error, Result};
pub use motion::{Pose6, RhythmicMotion};
