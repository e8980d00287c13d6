//! Tuning of the platform-variation and latency-jitter magnitudes so that
//! the estimation pipeline reproduces measured uncertainties.

use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::control::ActuationModel;
use crate::error::{Error, Result};
use crate::estimation::{dominant_axis, fit_all, SineFit};
use crate::motion::{MotionSource, PlatformVariation, RhythmicMotion};
use crate::rng::{self, Stream};
use crate::sensing::{observe, SensorModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measurement {
    /// RMSE of (fitted − commanded) frequency, relative to the commanded frequency.
    pub frequency_rel_rmse: f64,
    /// RMSE of the fitted phase against the commanded phase, s, wrapped to
    /// the nearest fitted period.
    pub phase_rmse: f64,
    /// Mean over seeds of the range of per-command latencies in one task, s.
    pub latency_spread: f64,
}

impl Measurement {
    pub const TARGET: Measurement = Measurement {
        frequency_rel_rmse: 0.03,
        phase_rmse: 0.22,
        latency_spread: 0.576,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSetup {
    pub motion: RhythmicMotion,
    pub sensor: SensorModel,
    pub actuation: ActuationModel,
    /// Commands per task when measuring latency spread.
    pub commands: usize,
    pub seeds: u64,
}

impl Default for CalibrationSetup {
    /// 25 mm X-axis motion at 0.2 Hz observed for a minute; a 21-waypoint cut.
    fn default() -> Self {
        CalibrationSetup {
            motion: RhythmicMotion::sinusoidal([25.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0.2, 0.0)
                .expect("valid motion"),
            sensor: SensorModel::default(),
            actuation: ActuationModel::default(),
            commands: 21,
            seeds: 10,
        }
    }
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

fn dominant_fit(fits: Vec<Result<SineFit>>) -> Result<SineFit> {
    let fits: Vec<SineFit> = fits
        .into_iter()
        .map(|f| f.unwrap_or_else(|_| SineFit::flat(0.0, 0.0)))
        .collect();
    Ok(fits[dominant_axis(&fits)?])
}

pub fn measure(
    setup: &CalibrationSetup,
    variation: &PlatformVariation,
    jitter: f64,
) -> Result<Measurement> {
    let f = setup.motion.frequency();
    let mut freq_err = Vec::new();
    let mut phase_err = Vec::new();
    let mut spreads = Vec::new();
    for seed in 0..setup.seeds {
        let truth = variation.realize(&setup.motion, &mut rng::stream(seed, Stream::Variation));
        let sensor = SensorModel {
            seed,
            ..setup.sensor
        };
        sensor.check_motion(truth.frequency())?;
        let fit = dominant_fit(fit_all(&observe(&truth, &sensor)?))?;
        freq_err.push(fit.frequency() / f - 1.0);
        // the fitted phase is defined modulo the fitted period
        let fitted_period = 1.0 / fit.frequency();
        let d = (fit.phi - setup.motion.phase()).rem_euclid(fitted_period);
        phase_err.push(d.min(fitted_period - d));

        let mut rng = rng::stream(seed, Stream::Actuation);
        let normal = Normal::new(0.0, jitter)
            .map_err(|e| Error::validation("actuation.latency_jitter", e.to_string()))?;
        let lat: Vec<f64> = (0..setup.commands)
            .map(|_| (setup.actuation.latency_mean + normal.sample(&mut rng)).max(0.0))
            .collect();
        let hi = lat.iter().copied().fold(f64::MIN, f64::max);
        let lo = lat.iter().copied().fold(f64::MAX, f64::min);
        spreads.push(hi - lo);
    }
    Ok(Measurement {
        frequency_rel_rmse: rms(&freq_err),
        phase_rmse: rms(&phase_err),
        latency_spread: spreads.iter().sum::<f64>() / spreads.len() as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub frequency_sigma: f64,
    pub phase_sigma: f64,
    pub latency_jitter: f64,
    pub measurement: Measurement,
    pub evaluations: usize,
    pub converged: bool,
}

/// Relative tolerance on each target before the search stops.
pub const TOLERANCE: f64 = 1e-3;

/// Multiplicative fixed-point search: each measured quantity grows roughly in
/// proportion to its knob, so every round rescales each knob by
/// target/measured (clamped to [¼, 4]).
pub fn calibrate(
    setup: &CalibrationSetup,
    target: &Measurement,
    max_evals: usize,
) -> Result<Calibration> {
    let mut knobs = [0.01, 0.1, 0.1];
    let goals = [
        target.frequency_rel_rmse,
        target.phase_rmse,
        target.latency_spread,
    ];
    let mut evaluations = 0;
    loop {
        let variation = PlatformVariation {
            frequency_sigma: knobs[0],
            phase_sigma: knobs[1],
        };
        let m = measure(setup, &variation, knobs[2])?;
        evaluations += 1;
        let got = [m.frequency_rel_rmse, m.phase_rmse, m.latency_spread];
        let converged = got
            .iter()
            .zip(&goals)
            .all(|(g, t)| (g / t - 1.0).abs() <= TOLERANCE);
        if converged || evaluations >= max_evals {
            return Ok(Calibration {
                frequency_sigma: knobs[0],
                phase_sigma: knobs[1],
                latency_jitter: knobs[2],
                measurement: m,
                evaluations,
                converged,
            });
        }
        for i in 0..3 {
            let ratio = if got[i] > 0.0 { goals[i] / got[i] } else { 4.0 };
            knobs[i] *= ratio.clamp(0.25, 4.0);
        }
    }
}
