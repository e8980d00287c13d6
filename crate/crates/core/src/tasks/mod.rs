//! Benchmark tasks built on the controllers: cutting along a line and
//! removing inclusions from a phantom.

mod cutting;
mod debridement;

use serde::{Deserialize, Serialize};

use crate::control::{ActuationModel, Policy};
use crate::error::{Error, Result};
use crate::estimation::{fit_all, SineFit};
use crate::motion::{PerturbedMotion, PlatformVariation, RhythmicMotion};
use crate::rng::{self, Stream};
use crate::sensing::{observe, SensorModel};

pub use cutting::{run_cutting, CuttingTask};
pub use debridement::{place_inclusions, run_debridement, DebridementTask, Inclusion};

/// Everything about the world a trial runs in, apart from the task itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    pub motion: RhythmicMotion,
    pub variation: PlatformVariation,
    pub sensor: SensorModel,
    pub actuation: ActuationModel,
}

impl Environment {
    pub fn new(motion: RhythmicMotion) -> Self {
        Environment {
            motion,
            variation: PlatformVariation::default(),
            sensor: SensorModel::default(),
            actuation: ActuationModel::default(),
        }
    }

    /// No platform variation, sensor noise, or latency jitter.
    pub fn ideal(motion: RhythmicMotion) -> Self {
        Environment {
            motion,
            variation: PlatformVariation::NONE,
            sensor: SensorModel::noiseless(),
            actuation: ActuationModel {
                latency_jitter: 0.0,
                ..ActuationModel::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sensor.validate()?;
        self.actuation.validate()?;
        self.sensor.check_motion(if self.motion.is_static() {
            0.0
        } else {
            self.motion.frequency()
        })?;
        let v = &self.variation;
        if !(v.frequency_sigma >= 0.0 && v.frequency_sigma < 0.5) {
            return Err(Error::validation(
                "motion.variation.frequency_sigma",
                "must be in [0, 0.5)",
            ));
        }
        if !(v.phase_sigma >= 0.0 && v.phase_sigma.is_finite()) {
            return Err(Error::validation(
                "motion.variation.phase_sigma",
                "must be finite and >= 0",
            ));
        }
        Ok(())
    }

    /// Time execution starts: right after the observation window.
    pub fn clock(&self) -> f64 {
        self.sensor.duration
    }
}

/// One trial's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub scenario: String,
    pub policy: Policy,
    pub trial: usize,
    pub seed: u64,
    pub finished: bool,
    /// Cutting only: largest excursion outside the line band, mm.
    pub max_error: Option<f64>,
    pub cumulative_error: f64,
    /// Execution time after the observation window, s.
    pub duration: f64,
    pub attempts: Option<u32>,
    pub successes: Option<u32>,
    /// Why the trial degraded, if it did (estimation failure, fallback).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn grasp_rate(report: &TrialReport) -> Result<f64> {
    if report.duration.is_nan() || report.duration <= 0.0 {
        return Err(Error::ZeroDuration);
    }
    Ok(report.attempts.unwrap_or(0) as f64 * 60.0 / report.duration)
}

/// The realized platform and, for policies that need it, the fitted model.
pub(crate) struct Prepared {
    pub truth: PerturbedMotion,
    pub fits: Vec<SineFit>,
    pub note: Option<String>,
}

pub(crate) fn prepare(env: &Environment, policy: Policy, seed: u64) -> Result<Prepared> {
    env.validate()?;
    let truth = env
        .variation
        .realize(&env.motion, &mut rng::stream(seed, Stream::Variation));
    let mut fits = vec![SineFit::flat(0.0, 0.0); 6];
    let mut note = None;
    if policy.needs_fit() {
        let sensor = SensorModel { seed, ..env.sensor };
        let track = observe(&truth, &sensor)?;
        for (axis, fit) in fit_all(&track).into_iter().enumerate() {
            match fit {
                Ok(f) => fits[axis] = f,
                Err(e) => {
                    log::warn!("axis {axis} fit failed: {e}");
                    note = Some(format!("axis {axis} fit failed: {e}"));
                }
            }
        }
        if policy == Policy::Intermittent && fits.iter().all(|f| f.flat) {
            note.get_or_insert_with(|| "no oscillation detected; ran without sync".into());
        }
    }
    Ok(Prepared { truth, fits, note })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(attempts: Option<u32>, duration: f64) -> TrialReport {
        TrialReport {
            scenario: "t".into(),
            policy: Policy::None,
            trial: 0,
            seed: 0,
            finished: true,
            max_error: None,
            cumulative_error: 0.0,
            duration,
            attempts,
            successes: None,
            note: None,
        }
    }

    #[test]
    fn grasp_rate_examples() {
        assert_eq!(grasp_rate(&report(Some(10), 60.0)).unwrap(), 10.0);
        assert!((grasp_rate(&report(Some(12), 100.0)).unwrap() - 7.2).abs() < 1e-12);
        assert!(matches!(
            grasp_rate(&report(None, 0.0)),
            Err(Error::ZeroDuration)
        ));
    }
}
