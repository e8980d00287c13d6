//! Synchronization policies, actuation, and plan execution.
//!
//! A [`Controller`] turns each nominal target into a [`Decision`]; the
//! [`Executor`] then plays decisions against the true platform motion with
//! a speed-limited robot and jittered latency, logging the error.

mod executor;
mod planner;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motion::Pose6;

pub use executor::{cumulative_error, execute, ExecutionLog, Executor, LogEntry};
pub use planner::{
    controller_for, plan_full_sync, plan_intermittent, plan_no_sync, FullSync, Intermittent, NoSync,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Execute nominal targets, ignoring the motion.
    None,
    /// Offset every command by the predicted motion at its predicted completion.
    Full,
    /// Time every command to complete at an extremum of the dominant axis.
    Intermittent,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::None, Policy::Full, Policy::Intermittent];

    pub fn name(&self) -> &'static str {
        match self {
            Policy::None => "none",
            Policy::Full => "full",
            Policy::Intermittent => "intermittent",
        }
    }

    pub fn needs_fit(&self) -> bool {
        !matches!(self, Policy::None)
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::validation("policies", format!("unknown policy {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub u: Pose6,
    /// Intended completion time; `None` when the policy does not care.
    pub tau: Option<f64>,
    /// Requested start time; `None` means as soon as the robot is free.
    pub issue: Option<f64>,
}

/// What a controller can see when it decides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    /// Time the robot finished its previous command.
    pub now: f64,
    /// Translational position of the tool.
    pub position: Vector3<f64>,
}

pub trait Controller {
    fn decide(&mut self, g: &Pose6, state: &RobotState) -> Decision;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ActuationModel {
    /// Translational speed cap, mm/s.
    pub speed: f64,
    /// Mean command latency, s.
    pub latency_mean: f64,
    /// Std of the Gaussian latency jitter, s; total latency is clamped at 0.
    pub latency_jitter: f64,
    /// Jitter seed. Scenario runs overwrite it with the trial seed.
    #[serde(skip)]
    pub seed: u64,
}

impl ActuationModel {
    /// Jitter produced by `calibrate` for a 0.576 s latency spread over a
    /// 21-command task.
    pub const CALIBRATED_JITTER: f64 = 0.161_852;

    pub fn ideal(speed: f64) -> Self {
        ActuationModel {
            speed,
            latency_mean: 0.0,
            latency_jitter: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(Error::validation(
                "actuation.speed",
                "must be finite and > 0",
            ));
        }
        if !(self.latency_mean >= 0.0 && self.latency_mean.is_finite()) {
            return Err(Error::validation(
                "actuation.latency_mean",
                "must be finite and >= 0",
            ));
        }
        if !(self.latency_jitter >= 0.0 && self.latency_jitter.is_finite()) {
            return Err(Error::validation(
                "actuation.latency_jitter",
                "must be finite and >= 0",
            ));
        }
        Ok(())
    }

    pub fn travel_time(&self, from: &Vector3<f64>, to: &Vector3<f64>) -> f64 {
        (to - from).norm() / self.speed
    }
}

impl Default for ActuationModel {
    fn default() -> Self {
        ActuationModel {
            speed: 30.0,
            latency_mean: 1.25,
            latency_jitter: ActuationModel::CALIBRATED_JITTER,
            seed: 0,
        }
    }
}
